//! Seeded random mechanisms without costs, checked against the classical
//! revelation principle.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use revelation_core::rational::q;
use revelation_core::{
    audit_revelation_principle, induced_scf, BayesianGame, CostModel, EquilibriumMode, Mechanism,
    Outcome, OutcomeId, OutcomeSet, TypeSpace, UtilityTable, DEFAULT_PROFILE_CAP,
};
use serde::{Deserialize, Serialize};

pub const DEFAULT_SEED: u64 = 20_231_116;
pub const DEFAULT_COUNT: usize = 256;

#[derive(Debug, Clone)]
pub struct RandomModel {
    pub types: TypeSpace,
    pub mechanism: Mechanism,
    pub utility: UtilityTable,
    pub costs: CostModel,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RegressionSummary {
    pub seed: u64,
    pub mechanisms: usize,
    pub equilibria: usize,
    pub implemented_scfs: usize,
    pub violations: usize,
    /// Index of the first mechanism with a violation.
    pub first_violation: Option<usize>,
}

/// Two agents, up to 2 types and 3 actions each, up to 4 outcomes,
/// utilities `k/d` with `|k| <= 6` and `1 <= d <= 6`, all costs zero.
pub fn random_model(rng: &mut ChaCha8Rng) -> revelation_core::Result<RandomModel> {
    let type_counts: Vec<usize> = (0..2).map(|_| rng.gen_range(1..=2)).collect();
    let action_counts: Vec<usize> = (0..2).map(|_| rng.gen_range(1..=3)).collect();
    let outcome_count = rng.gen_range(1..=4);

    let labels =
        |prefix: &str, n: usize| (0..n).map(|k| format!("{prefix}{k}")).collect::<Vec<_>>();
    let priors = type_counts
        .iter()
        .map(|&n| {
            if n == 1 {
                vec![q(1, 1)]
            } else {
                let d = rng.gen_range(2..=6);
                let k = rng.gen_range(1..d);
                vec![q(k, d), q(d - k, d)]
            }
        })
        .collect();
    let types = TypeSpace::new(
        type_counts.iter().map(|&n| labels("t", n)).collect(),
        priors,
    )?;
    let outcomes = Arc::new(OutcomeSet::new(
        (0..outcome_count)
            .map(|k| Outcome::new(format!("x{k}"), vec![]))
            .collect(),
    )?);
    let mechanism = Mechanism::from_fn(
        action_counts.iter().map(|&n| labels("a", n)).collect(),
        outcomes.clone(),
        |_| OutcomeId(rng.gen_range(0..outcome_count)),
    )?;
    let utility = UtilityTable::from_fn(&types, &outcomes, |_, _, _, _| {
        q(rng.gen_range(-6..=6), rng.gen_range(1..=6))
    })?;
    let costs = CostModel::zero(&mechanism, &types)?;
    Ok(RandomModel {
        types,
        mechanism,
        utility,
        costs,
    })
}

/// Every social choice function implemented by a pure equilibrium must be
/// truthfully implementable when nothing is costly.
pub fn run_regression(seed: u64, count: usize) -> revelation_core::Result<RegressionSummary> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut summary = RegressionSummary {
        seed,
        mechanisms: 0,
        equilibria: 0,
        implemented_scfs: 0,
        violations: 0,
        first_violation: None,
    };
    for k in 0..count {
        let m = random_model(&mut rng)?;
        let game = BayesianGame::new(&m.mechanism, &m.types, &m.utility, &m.costs)?;
        let equilibria =
            game.find_all_pure_bne(EquilibriumMode::ProfitBased, DEFAULT_PROFILE_CAP)?;
        summary.mechanisms += 1;
        summary.equilibria += equilibria.len();
        for p in &equilibria {
            let f = induced_scf(&m.mechanism, p, &m.types)?;
            let audit =
                audit_revelation_principle(&m.mechanism, p, &f, &m.types, &m.utility, &m.costs)?;
            summary.implemented_scfs += usize::from(audit.implemented);
            if audit.violation {
                summary.violations += 1;
                summary.first_violation.get_or_insert(k);
            }
        }
    }
    Ok(summary)
}
