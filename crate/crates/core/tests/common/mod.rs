#![allow(dead_code)]

use std::cell::Cell;
use std::sync::Arc;

use proptest::prelude::*;
use revelation_core::profile::ProductSpace;
use revelation_core::rational::{q, Rational};
use revelation_core::{
    CostModel, Mechanism, Outcome, OutcomeId, OutcomeSet, StrategyProfile, TypeSpace, UtilityTable,
};

/// A small random Bayesian game: 2 agents, at most 2 types and 3 actions
/// each, up to 4 outcomes, utilities in [0, 1] with denominator 6.
#[derive(Debug, Clone)]
pub struct Instance {
    pub types: TypeSpace,
    pub mechanism: Mechanism,
    pub utility: UtilityTable,
    pub costs: CostModel,
    pub zero_costs: CostModel,
}

/// Deterministic byte stream consumed while building an instance.
struct Bytes<'a> {
    raw: &'a [u8],
    pos: Cell<usize>,
}

impl Bytes<'_> {
    fn next(&self, modulo: u8) -> u8 {
        let pos = self.pos.get();
        self.pos.set(pos + 1);
        self.raw[pos % self.raw.len()] % modulo
    }
}

pub fn build_instance(
    type_counts: [usize; 2],
    action_counts: [usize; 2],
    outcomes: usize,
    raw: &[u8],
) -> Instance {
    let bytes = Bytes {
        raw,
        pos: Cell::new(0),
    };
    let type_labels: Vec<Vec<String>> = type_counts
        .iter()
        .map(|&n| (0..n).map(|t| format!("t{t}")).collect())
        .collect();
    let priors = type_counts
        .iter()
        .map(|&n| {
            if n == 1 {
                vec![q(1, 1)]
            } else {
                let k = i64::from(bytes.next(3)) + 1;
                vec![q(k, 4), q(4 - k, 4)]
            }
        })
        .collect();
    let types = TypeSpace::new(type_labels, priors).unwrap();
    let outcome_set = Arc::new(
        OutcomeSet::new(
            (0..outcomes)
                .map(|k| Outcome::new(format!("x{k}"), vec![]))
                .collect(),
        )
        .unwrap(),
    );
    let actions: Vec<Vec<String>> = action_counts
        .iter()
        .map(|&n| (0..n).map(|a| format!("a{a}")).collect())
        .collect();
    let space = ProductSpace::new(action_counts.to_vec());
    let table = (0..space.len())
        .map(|_| OutcomeId(usize::from(bytes.next(outcomes as u8))))
        .collect();
    let mechanism = Mechanism::new(actions, outcome_set.clone(), table).unwrap();
    let utility = UtilityTable::from_fn(&types, &outcome_set, |_, _, _, _| {
        q(i64::from(bytes.next(7)), 6)
    })
    .unwrap();
    let costs = CostModel::from_fns(
        &mechanism,
        &types,
        |_, _, _| q(i64::from(bytes.next(4)), 6),
        |_, t, r| {
            if t == r {
                q(0, 1)
            } else {
                q(i64::from(bytes.next(4)), 6)
            }
        },
    )
    .unwrap();
    let zero_costs = CostModel::zero(&mechanism, &types).unwrap();
    Instance {
        types,
        mechanism,
        utility,
        costs,
        zero_costs,
    }
}

pub fn instance_strategy() -> impl Strategy<Value = Instance> {
    (
        [1usize..=2, 1usize..=2],
        [1usize..=3, 1usize..=3],
        1usize..=4,
        proptest::collection::vec(any::<u8>(), 64),
    )
        .prop_map(|(t, a, o, raw)| build_instance(t, a, o, &raw))
}

/// Ex-ante expected payoff of `agent` when it plays `choice` (type -> action)
/// and everyone else follows `profile`. Computed directly from the joint
/// prior and the tables, without going through interim payoffs.
pub fn ex_ante_payoff(
    inst: &Instance,
    costs: &CostModel,
    profile: &StrategyProfile,
    agent: usize,
    choice: &[usize],
    with_costs: bool,
) -> Rational {
    let mut total = q(0, 1);
    for types in inst.types.profile_space().iter() {
        let mut actions = profile.actions_at(&types);
        actions[agent] = choice[types[agent]];
        let x = inst.mechanism.outcome_id(&actions).unwrap();
        let mut v = inst
            .utility
            .utility(agent, x, types[agent])
            .unwrap()
            .clone();
        if with_costs {
            v -= costs
                .strategic_cost(agent, actions[agent], types[agent])
                .unwrap();
        }
        total += inst.types.joint_prior(&types).unwrap() * v;
    }
    total
}

/// Equilibrium against every full-strategy deviation (full-support prior).
pub fn is_bne_full_deviation(
    inst: &Instance,
    costs: &CostModel,
    profile: &StrategyProfile,
    with_costs: bool,
) -> bool {
    (0..inst.types.agent_count()).all(|agent| {
        let base = ex_ante_payoff(
            inst,
            costs,
            profile,
            agent,
            &profile.strategy(agent).choice,
            with_costs,
        );
        let space = ProductSpace::new(vec![
            inst.mechanism.action_count(agent);
            inst.types.type_count(agent)
        ]);
        space
            .iter()
            .all(|alt| ex_ante_payoff(inst, costs, profile, agent, &alt, with_costs) <= base)
    })
}
