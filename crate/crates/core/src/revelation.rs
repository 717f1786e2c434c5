//! Direct revelation mechanisms, truthful implementability, and an audit of
//! the classical argument that Bayesian implementation implies truthful
//! implementation.
//!
//! A direct mechanism lets each agent report a type and applies the social
//! choice function to the reports. Reporting carries no strategic cost. The
//! only possible charge is the misreporting schedule of the [`CostModel`].
//! [`DirectMechanism`] drops the strategic component of any cost model it is
//! built from, so a direct mechanism with strategic costs cannot be built.

use serde::{Deserialize, Serialize};

use crate::equilibrium::{
    implements_scf, BayesianGame, Deviation, EquilibriumMode, PureStrategy, StrategyProfile,
};
use crate::error::Result;
use crate::game::{CostModel, Mechanism, SocialChoiceFunction, TypeSpace, UtilityTable};
use crate::profile::ProductSpace;
use crate::rational::{self, Rational};

/// `Γ' = (Θ_1, ..., Θ_I, f)` together with its misreporting charges.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DirectMechanism {
    base: Mechanism,
    costs: CostModel,
}

impl DirectMechanism {
    /// Action sets are the type sets, the outcome function is `f`, and the
    /// strategic component of `costs` is discarded.
    pub fn from_scf(scf: &SocialChoiceFunction, ts: &TypeSpace, costs: &CostModel) -> Result<Self> {
        scf.check_type_space(ts)?;
        costs.check_misreport_against(ts)?;
        let actions = (0..ts.agent_count())
            .map(|i| ts.types_of(i).map(<[String]>::to_vec))
            .collect::<Result<Vec<_>>>()?;
        let base = Mechanism::new(actions, scf.outcomes().clone(), scf.table().to_vec())?;
        let strategic = (0..ts.agent_count())
            .map(|i| vec![vec![rational::zero(); ts.type_count(i)]; ts.type_count(i)])
            .collect();
        let misreport = (0..ts.agent_count())
            .map(|i| {
                (0..ts.type_count(i))
                    .map(|t| {
                        (0..ts.type_count(i))
                            .map(|r| costs.misreport_cost(i, t, r).cloned())
                            .collect::<Result<Vec<_>>>()
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            base,
            costs: CostModel::new(strategic, misreport)?,
        })
    }

    pub fn mechanism(&self) -> &Mechanism {
        &self.base
    }

    /// Zero strategic costs plus the misreporting schedule.
    pub fn costs(&self) -> &CostModel {
        &self.costs
    }

    /// Always zero.
    pub fn strategic_cost(&self, agent: usize, report: usize, ty: usize) -> Result<&Rational> {
        self.costs.strategic_cost(agent, report, ty)
    }

    pub fn misreport_cost(&self, agent: usize, truth: usize, report: usize) -> Result<&Rational> {
        self.costs.misreport_cost(agent, truth, report)
    }

    /// The social choice function the mechanism applies to reports.
    pub fn scf(&self, ts: &TypeSpace) -> Result<SocialChoiceFunction> {
        SocialChoiceFunction::new(ts, self.base.outcomes().clone(), self.base.table().to_vec())
    }

    /// `s'_i(θ_i) = θ_i` for every agent.
    pub fn truthful_profile(&self, ts: &TypeSpace) -> StrategyProfile {
        StrategyProfile::from_choices(
            (0..ts.agent_count())
                .map(|i| (0..ts.type_count(i)).collect())
                .collect(),
        )
    }

    /// The reporting game. In profit mode each report pays its misreport cost.
    pub fn game<'a>(
        &'a self,
        ts: &'a TypeSpace,
        utility: &'a UtilityTable,
    ) -> Result<BayesianGame<'a>> {
        BayesianGame::with_report_charges(&self.base, ts, utility, &self.costs)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TruthfulVerdict {
    pub truthful: bool,
    /// Most profitable misreport: `type` is the true type, `action` the report.
    pub witness: Option<Deviation>,
}

/// Whether truth-telling is a profit-based Bayesian Nash equilibrium of the
/// direct mechanism for `scf`, with misreports charged per `costs`.
pub fn is_truthfully_implementable(
    scf: &SocialChoiceFunction,
    ts: &TypeSpace,
    costs: &CostModel,
    utility: &UtilityTable,
) -> Result<TruthfulVerdict> {
    let direct = DirectMechanism::from_scf(scf, ts, costs)?;
    let game = direct.game(ts, utility)?;
    let verdict =
        game.is_bayesian_nash(&direct.truthful_profile(ts), EquilibriumMode::ProfitBased)?;
    Ok(TruthfulVerdict {
        truthful: verdict.is_equilibrium,
        witness: verdict.witness,
    })
}

/// Each step of the textbook argument evaluated on a concrete equilibrium.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChainRecord {
    /// The profile is not a profit-based equilibrium implementing `f`, so
    /// the argument has no premise to start from.
    pub vacuous: bool,
    /// Profit-based equilibrium condition at the profile, against every
    /// action.
    pub equilibrium_with_costs: bool,
    /// Equilibrium condition with `f` on the left and deviations restricted
    /// to `s*_i(θ̂_i)`, costs retained.
    pub restricted_with_costs: bool,
    /// Same left side, deviations over the whole action set, costs retained.
    pub restricted_all_actions: bool,
    /// Cost-free truthful-reporting condition on `f`.
    pub truthful_cost_free: bool,
    /// A `(agent, true type, report)` where the restricted inequality holds
    /// but the truthful one fails; `action` is the report and `gap` its
    /// utility gain.
    pub break_point: Option<Deviation>,
}

impl ChainRecord {
    /// Restricted inequality holds everywhere yet truthfulness fails.
    pub fn implication_breaks(&self) -> bool {
        self.restricted_with_costs && !self.truthful_cost_free
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AuditReport {
    pub indirect_equilibrium: Option<StrategyProfile>,
    /// Profit-based equilibrium of the indirect mechanism that reproduces `f`.
    pub implemented: bool,
    pub indirect_witness: Option<Deviation>,
    pub truthful_is_bne: bool,
    pub violation: bool,
    pub truthful_witness: Option<Deviation>,
    pub chain: Option<ChainRecord>,
    /// Equilibria are searched over pure strategies only.
    pub pure_strategies_only: bool,
}

impl AuditReport {
    pub fn is_consistent(&self) -> bool {
        self.violation == (self.implemented && !self.truthful_is_bne)
    }
}

/// Audit one candidate equilibrium of `mechanism` against `scf`.
pub fn audit_revelation_principle(
    mechanism: &Mechanism,
    profile: &StrategyProfile,
    scf: &SocialChoiceFunction,
    ts: &TypeSpace,
    utility: &UtilityTable,
    costs: &CostModel,
) -> Result<AuditReport> {
    let game = BayesianGame::new(mechanism, ts, utility, costs)?;
    let bne = game.is_bayesian_nash(profile, EquilibriumMode::ProfitBased)?;
    let implemented = bne.is_equilibrium && implements_scf(mechanism, profile, scf, ts)?;
    let truthful = is_truthfully_implementable(scf, ts, costs, utility)?;
    let chain = audit_proof_chain(mechanism, profile, scf, ts, utility, costs)?;
    Ok(AuditReport {
        indirect_equilibrium: Some(profile.clone()),
        implemented,
        indirect_witness: bne.witness,
        truthful_is_bne: truthful.truthful,
        violation: implemented && !truthful.truthful,
        truthful_witness: truthful.witness,
        chain: Some(chain),
        pure_strategies_only: true,
    })
}

/// Audit without a candidate: search all profit-based pure equilibria and
/// use the first one that implements `scf`, or report non-implementation.
pub fn audit_by_search(
    mechanism: &Mechanism,
    scf: &SocialChoiceFunction,
    ts: &TypeSpace,
    utility: &UtilityTable,
    costs: &CostModel,
    cap: u64,
) -> Result<AuditReport> {
    let game = BayesianGame::new(mechanism, ts, utility, costs)?;
    for p in game.find_all_pure_bne(EquilibriumMode::ProfitBased, cap)? {
        if implements_scf(mechanism, &p, scf, ts)? {
            return audit_revelation_principle(mechanism, &p, scf, ts, utility, costs);
        }
    }
    let truthful = is_truthfully_implementable(scf, ts, costs, utility)?;
    Ok(AuditReport {
        indirect_equilibrium: None,
        implemented: false,
        indirect_witness: None,
        truthful_is_bne: truthful.truthful,
        violation: false,
        truthful_witness: truthful.witness,
        chain: None,
        pure_strategies_only: true,
    })
}

/// `E_{θ_-i}[u_i(f(θ̂_i, θ_-i), θ_i) | θ_i]`.
fn expected_scf_utility(
    scf: &SocialChoiceFunction,
    ts: &TypeSpace,
    utility: &UtilityTable,
    agent: usize,
    ty: usize,
    report: usize,
) -> Result<Rational> {
    let mut dims = ts.profile_space().dims().to_vec();
    dims[agent] = 1;
    let mut total = rational::zero();
    for mut types in ProductSpace::new(dims).iter() {
        types[agent] = ty;
        let weight = ts.conditional_prior(agent, &types)?;
        types[agent] = report;
        total += weight * utility.utility(agent, scf.outcome_id(&types)?, ty)?;
    }
    Ok(total)
}

fn better(candidate: &Deviation, current: &Option<Deviation>) -> bool {
    current.as_ref().is_none_or(|c| candidate.gap > c.gap)
}

/// Evaluate, for every agent and type, the equilibrium condition with costs,
/// its restriction to deviations of the form `s*_i(θ̂_i)` (costs retained,
/// `f` substituted on the left), and the cost-free truthful condition on
/// `f`. The break point is the (agent, true type, report) with the largest
/// truthful-condition violation among those where the restricted condition
/// holds.
pub fn audit_proof_chain(
    mechanism: &Mechanism,
    profile: &StrategyProfile,
    scf: &SocialChoiceFunction,
    ts: &TypeSpace,
    utility: &UtilityTable,
    costs: &CostModel,
) -> Result<ChainRecord> {
    let game = BayesianGame::new(mechanism, ts, utility, costs)?;
    scf.check_type_space(ts)?;
    let equilibrium = game
        .is_bayesian_nash(profile, EquilibriumMode::ProfitBased)?
        .is_equilibrium;
    let implemented = implements_scf(mechanism, profile, scf, ts)?;

    let mut restricted = true;
    let mut all_actions = true;
    let mut truthful = true;
    let mut break_point: Option<Deviation> = None;

    for agent in 0..ts.agent_count() {
        let strategy: &PureStrategy = profile.strategy(agent);
        for ty in 0..ts.type_count(agent) {
            let own_cost = costs.strategic_cost(agent, strategy.action_at(ty), ty)?;
            let truth_utility = expected_scf_utility(scf, ts, utility, agent, ty, ty)?;
            let lhs = &truth_utility - own_cost;

            for action in 0..mechanism.action_count(agent) {
                let rhs = game.interim_expected_payoff(
                    profile,
                    agent,
                    ty,
                    Some(action),
                    EquilibriumMode::ProfitBased,
                )?;
                if rhs > lhs {
                    all_actions = false;
                }
            }

            for report in 0..ts.type_count(agent) {
                let mimic = strategy.action_at(report);
                let rhs = game.interim_expected_payoff(
                    profile,
                    agent,
                    ty,
                    Some(mimic),
                    EquilibriumMode::ProfitBased,
                )?;
                let restricted_here = lhs >= rhs;
                restricted &= restricted_here;

                let gain =
                    expected_scf_utility(scf, ts, utility, agent, ty, report)? - &truth_utility;
                if rational::is_positive(&gain) {
                    truthful = false;
                    let candidate = Deviation {
                        agent,
                        ty,
                        action: report,
                        gap: gain,
                    };
                    if restricted_here && better(&candidate, &break_point) {
                        break_point = Some(candidate);
                    }
                }
            }
        }
    }

    Ok(ChainRecord {
        vacuous: !(equilibrium && implemented),
        equilibrium_with_costs: equilibrium,
        restricted_with_costs: restricted,
        restricted_all_actions: all_actions,
        truthful_cost_free: truthful,
        break_point,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::{Outcome, OutcomeId, OutcomeSet};
    use crate::rational::q;
    use std::sync::Arc;

    fn trivial() -> (
        Mechanism,
        TypeSpace,
        UtilityTable,
        CostModel,
        SocialChoiceFunction,
    ) {
        let outcomes = Arc::new(OutcomeSet::new(vec![Outcome::new("x", vec![])]).unwrap());
        let ts = TypeSpace::uniform(vec![vec!["t".into()]]).unwrap();
        let m =
            Mechanism::from_fn(vec![vec!["a".into()]], outcomes.clone(), |_| OutcomeId(0)).unwrap();
        let u = UtilityTable::from_fn(&ts, &outcomes, |_, _, _, _| q(1, 1)).unwrap();
        let c = CostModel::zero(&m, &ts).unwrap();
        let f = SocialChoiceFunction::from_fn(&ts, outcomes, |_| OutcomeId(0)).unwrap();
        (m, ts, u, c, f)
    }

    #[test]
    fn single_agent_single_type_chain_holds() {
        let (m, ts, u, c, f) = trivial();
        let p = StrategyProfile::from_choices(vec![vec![0]]);
        let chain = audit_proof_chain(&m, &p, &f, &ts, &u, &c).unwrap();
        assert!(!chain.vacuous);
        assert!(chain.equilibrium_with_costs);
        assert!(chain.restricted_with_costs);
        assert!(chain.restricted_all_actions);
        assert!(chain.truthful_cost_free);
        assert!(chain.break_point.is_none());
    }

    #[test]
    fn direct_mechanism_drops_strategic_costs() {
        let (m, ts, _, _, f) = trivial();
        let costly = CostModel::new(vec![vec![vec![q(5, 1)]]], vec![vec![vec![q(0, 1)]]]).unwrap();
        costly.check_against(&m, &ts).unwrap();
        let d = DirectMechanism::from_scf(&f, &ts, &costly).unwrap();
        assert_eq!(d.strategic_cost(0, 0, 0).unwrap(), &q(0, 1));
        assert!(d.costs().has_zero_strategic());
    }
}
