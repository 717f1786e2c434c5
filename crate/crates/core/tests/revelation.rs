mod common;

use std::sync::Arc;

use common::instance_strategy;
use proptest::prelude::*;
use revelation_core::labor::{build_labor_scenario, separating_profile, LaborParams, HIGH, LOW};
use revelation_core::rational::{q, Rational};
use revelation_core::{
    audit_by_search, audit_proof_chain, audit_revelation_principle, induced_scf,
    is_truthfully_implementable, BayesianGame, CostModel, DirectMechanism, EquilibriumMode,
    Outcome, OutcomeId, OutcomeSet, SocialChoiceFunction, StrategyProfile, TypeSpace, UtilityTable,
    DEFAULT_PROFILE_CAP,
};

/// Report profit of the labor direct mechanism, written out case by case:
/// a low type pays `c_mis` whenever it claims to be high.
fn labor_report_profit(
    p: &LaborParams,
    truth: usize,
    report: usize,
    other_report: usize,
) -> Rational {
    let w = &p.wage;
    let share = match report.cmp(&other_report) {
        std::cmp::Ordering::Greater => w.clone(),
        std::cmp::Ordering::Equal => w / q(2, 1),
        std::cmp::Ordering::Less => q(0, 1),
    };
    if truth == LOW && report == HIGH {
        share - &p.misreport_cost
    } else {
        share
    }
}

/// Truthful reporting is an equilibrium iff no (true type, report) gains
/// against a truthful opponent.
fn labor_truthful_oracle(p: &LaborParams) -> bool {
    let opp_high = &p.prior_high[1];
    let opp_low = q(1, 1) - opp_high;
    [LOW, HIGH].iter().all(|&truth| {
        let value = |report| {
            labor_report_profit(p, truth, report, LOW) * &opp_low
                + labor_report_profit(p, truth, report, HIGH) * opp_high
        };
        value(truth) >= value(1 - truth)
    })
}

#[test]
fn direct_mechanism_construction() {
    let s = build_labor_scenario(&LaborParams::canonical()).unwrap();
    let d = DirectMechanism::from_scf(&s.scf, &s.types, &s.costs).unwrap();
    for agent in 0..2 {
        assert_eq!(
            d.mechanism().actions_of(agent).unwrap(),
            s.types.types_of(agent).unwrap()
        );
    }
    for reports in s.types.profile_space().iter() {
        assert_eq!(
            d.mechanism().outcome_id(&reports).unwrap(),
            s.scf.outcome_id(&reports).unwrap()
        );
        for agent in 0..2 {
            for t in 0..2 {
                assert_eq!(
                    d.strategic_cost(agent, reports[agent], t).unwrap(),
                    &q(0, 1)
                );
            }
        }
    }
    assert_eq!(d.misreport_cost(0, LOW, HIGH).unwrap(), &q(1, 2));
    assert_eq!(d.misreport_cost(0, HIGH, LOW).unwrap(), &q(0, 1));

    // idempotent
    let again = DirectMechanism::from_scf(&d.scf(&s.types).unwrap(), &s.types, d.costs()).unwrap();
    assert_eq!(again, d);
}

#[test]
fn constant_scf_direct_mechanism() {
    let s = build_labor_scenario(&LaborParams::canonical()).unwrap();
    let tie = s.outcomes.id_of("(1/2,1/2)").unwrap();
    let f = SocialChoiceFunction::from_fn(&s.types, s.outcomes.clone(), |_| tie).unwrap();
    let d = DirectMechanism::from_scf(&f, &s.types, &s.costs).unwrap();
    assert!(d.mechanism().table().iter().all(|&x| x == tie));
    let v = is_truthfully_implementable(&f, &s.types, &s.costs, &s.utility).unwrap();
    assert!(v.truthful);
}

#[test]
fn mismatched_type_space_is_rejected() {
    let s = build_labor_scenario(&LaborParams::canonical()).unwrap();
    let other = TypeSpace::uniform(vec![vec!["a".into()], vec!["b".into()]]).unwrap();
    assert!(DirectMechanism::from_scf(&s.scf, &other, &s.costs).is_err());
}

#[test]
fn truthful_examples() {
    let p = LaborParams::canonical();
    let s = build_labor_scenario(&p).unwrap();
    let v = is_truthfully_implementable(&s.scf, &s.types, &s.costs, &s.utility).unwrap();
    assert!(!v.truthful);
    assert_eq!(v.truthful, labor_truthful_oracle(&p));
    let w = v.witness.unwrap();
    assert_eq!((w.agent, w.ty, w.action, w.gap), (0, LOW, HIGH, q(1, 4)));

    let p = LaborParams::canonical().with_misreport_cost(q(1, 1));
    let s = build_labor_scenario(&p).unwrap();
    let v = is_truthfully_implementable(&s.scf, &s.types, &s.costs, &s.utility).unwrap();
    assert!(v.truthful);
    assert!(labor_truthful_oracle(&p));
}

#[test]
fn audit_examples() {
    let s = build_labor_scenario(&LaborParams::canonical()).unwrap();
    let r = s.audit().unwrap();
    assert!(r.implemented && !r.truthful_is_bne && r.violation);
    assert!(r.is_consistent());

    let zero = s.clone().with_zero_costs().unwrap();
    let r = zero.audit().unwrap();
    assert!(!r.violation);
    assert!(
        !r.implemented,
        "without education costs low types imitate high types"
    );
    assert!(r.is_consistent());

    let pooling = StrategyProfile::from_choices(vec![vec![0, 0], vec![0, 0]]);
    let r = audit_revelation_principle(
        &s.mechanism,
        &pooling,
        &s.scf,
        &s.types,
        &s.utility,
        &s.costs,
    )
    .unwrap();
    assert!(!r.implemented && !r.violation);
}

#[test]
fn audit_by_search_finds_the_separating_equilibrium() {
    let s = build_labor_scenario(&LaborParams::canonical()).unwrap();
    let r = audit_by_search(
        &s.mechanism,
        &s.scf,
        &s.types,
        &s.utility,
        &s.costs,
        DEFAULT_PROFILE_CAP,
    )
    .unwrap();
    assert_eq!(r.indirect_equilibrium, Some(separating_profile()));
    assert!(r.violation);
}

#[test]
fn proof_chain_breaks_at_zero_misreport_cost() {
    let s = build_labor_scenario(&LaborParams::canonical().with_misreport_cost(q(0, 1))).unwrap();
    let chain = audit_proof_chain(
        &s.mechanism,
        &separating_profile(),
        &s.scf,
        &s.types,
        &s.utility,
        &s.costs,
    )
    .unwrap();
    assert!(!chain.vacuous);
    assert!(chain.equilibrium_with_costs);
    assert!(chain.restricted_with_costs);
    assert!(chain.restricted_all_actions);
    assert!(!chain.truthful_cost_free);
    assert!(chain.implication_breaks());
    let b = chain.break_point.unwrap();
    // truth gives w/4, claiming high gives 3w/4
    assert_eq!((b.agent, b.ty, b.action, b.gap), (0, LOW, HIGH, q(3, 4)));
}

#[test]
fn proof_chain_on_non_equilibrium_is_vacuous() {
    let s = build_labor_scenario(&LaborParams::canonical()).unwrap();
    let pooling = StrategyProfile::from_choices(vec![vec![1, 1], vec![1, 1]]);
    let chain = audit_proof_chain(
        &s.mechanism,
        &pooling,
        &s.scf,
        &s.types,
        &s.utility,
        &s.costs,
    )
    .unwrap();
    assert!(chain.vacuous);
}

#[test]
fn misreport_cost_monotonicity() {
    let grid: Vec<Rational> = (0..=24).map(|k| q(k, 12)).collect();
    let mut seen_truthful = false;
    for c in grid {
        let s =
            build_labor_scenario(&LaborParams::canonical().with_misreport_cost(c.clone())).unwrap();
        let t = is_truthfully_implementable(&s.scf, &s.types, &s.costs, &s.utility)
            .unwrap()
            .truthful;
        assert!(
            !seen_truthful || t,
            "truthfulness lost when c_mis rose to {c}"
        );
        seen_truthful |= t;
        assert_eq!(t, c >= q(3, 4));
    }
    assert!(seen_truthful);
}

#[test]
fn one_agent_one_type_chain() {
    let outcomes = Arc::new(
        OutcomeSet::new(vec![Outcome::new("a", vec![]), Outcome::new("b", vec![])]).unwrap(),
    );
    let ts = TypeSpace::uniform(vec![vec!["t".into()]]).unwrap();
    let m = revelation_core::Mechanism::from_fn(
        vec![vec!["x".into(), "y".into()]],
        outcomes.clone(),
        |a| OutcomeId(a[0]),
    )
    .unwrap();
    let u = UtilityTable::from_fn(&ts, &outcomes, |_, x, _, _| q(x.0 as i64, 1)).unwrap();
    let c = CostModel::zero(&m, &ts).unwrap();
    let p = StrategyProfile::from_choices(vec![vec![1]]);
    let f = induced_scf(&m, &p, &ts).unwrap();
    let chain = audit_proof_chain(&m, &p, &f, &ts, &u, &c).unwrap();
    assert!(
        chain.equilibrium_with_costs && chain.restricted_with_costs && chain.truthful_cost_free
    );
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    /// With no costs anywhere, every scf implemented by a pure equilibrium is
    /// truthfully implementable and no audit reports a violation.
    #[test]
    fn classical_revelation_principle(inst in instance_strategy()) {
        let game = BayesianGame::new(&inst.mechanism, &inst.types, &inst.utility, &inst.zero_costs).unwrap();
        for p in game.find_all_pure_bne(EquilibriumMode::ProfitBased, DEFAULT_PROFILE_CAP).unwrap() {
            let f = induced_scf(&inst.mechanism, &p, &inst.types).unwrap();
            let v = is_truthfully_implementable(&f, &inst.types, &inst.zero_costs, &inst.utility).unwrap();
            prop_assert!(v.truthful, "counterexample to the classical principle: {:?}", v.witness);
            let r = audit_revelation_principle(&inst.mechanism, &p, &f, &inst.types, &inst.utility, &inst.zero_costs).unwrap();
            prop_assert!(r.implemented);
            prop_assert!(!r.violation);
            let chain = r.chain.unwrap();
            prop_assert!(chain.truthful_cost_free);
            prop_assert!(chain.break_point.is_none());
        }
    }

    #[test]
    fn chain_record_is_consistent(inst in instance_strategy()) {
        let game = BayesianGame::new(&inst.mechanism, &inst.types, &inst.utility, &inst.costs).unwrap();
        for p in game.enumerate_profiles(DEFAULT_PROFILE_CAP).unwrap() {
            let f = induced_scf(&inst.mechanism, &p, &inst.types).unwrap();
            let chain = audit_proof_chain(&inst.mechanism, &p, &f, &inst.types, &inst.utility, &inst.costs).unwrap();
            if chain.restricted_with_costs {
                prop_assert_eq!(chain.truthful_cost_free, chain.break_point.is_none());
            }
            if !chain.vacuous {
                // with f = g∘s*, restricting the equilibrium condition loses nothing
                prop_assert!(chain.restricted_with_costs && chain.restricted_all_actions);
            }
            let r = audit_revelation_principle(&inst.mechanism, &p, &f, &inst.types, &inst.utility, &inst.costs).unwrap();
            prop_assert!(r.is_consistent());
        }
    }

    #[test]
    fn truthful_check_matches_direct_enumeration(inst in instance_strategy()) {
        // brute force over every (agent, truth, report) with misreport charges
        let game = BayesianGame::new(&inst.mechanism, &inst.types, &inst.utility, &inst.zero_costs).unwrap();
        let p = &game.enumerate_profiles(DEFAULT_PROFILE_CAP).unwrap()[0];
        let f = induced_scf(&inst.mechanism, p, &inst.types).unwrap();
        let ts = &inst.types;
        let mut expected = true;
        for agent in 0..2 {
            for truth in 0..ts.type_count(agent) {
                let value = |report: usize| -> Rational {
                    let mut v = q(0, 1);
                    for mut prof in ts.profile_space().iter().filter(|pr| pr[agent] == truth) {
                        let w = ts.conditional_prior(agent, &prof).unwrap();
                        prof[agent] = report;
                        v += w * inst.utility.utility(agent, f.outcome_id(&prof).unwrap(), truth).unwrap();
                    }
                    v - inst.costs.misreport_cost(agent, truth, report).unwrap()
                };
                let base = value(truth);
                if (0..ts.type_count(agent)).any(|r| value(r) > base) {
                    expected = false;
                }
            }
        }
        let v = is_truthfully_implementable(&f, ts, &inst.costs, &inst.utility).unwrap();
        prop_assert_eq!(v.truthful, expected);
    }
}
