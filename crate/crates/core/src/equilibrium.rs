//! Pure-strategy Bayesian Nash equilibrium by exhaustive search.
//!
//! Interim payoffs are computed exactly. Equilibrium is the weak `>=`
//! condition against every single-type deviation, which is equivalent to
//! checking every full-strategy deviation because the prior is independent
//! and interim payoffs at distinct own types do not interact.

use serde::{Deserialize, Serialize};

use crate::error::{check_index, Error, Result};
use crate::game::{CostModel, Mechanism, OutcomeId, SocialChoiceFunction, TypeSpace, UtilityTable};
use crate::normal_form::NormalFormGame;
use crate::profile::ProductSpace;
use crate::rational::{self, Rational};

/// Default cap on brute-force enumeration sizes.
pub const DEFAULT_PROFILE_CAP: u64 = 1_000_000;

/// Which payoff the equilibrium inequality compares.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum EquilibriumMode {
    /// Outcome utility only; action costs are ignored.
    UtilityBased,
    /// Utility minus the cost of the chosen action.
    ProfitBased,
}

/// A map from an agent's types to its actions, stored as action indices in
/// type order.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PureStrategy {
    pub agent: usize,
    pub choice: Vec<usize>,
}

impl PureStrategy {
    pub fn new(agent: usize, choice: Vec<usize>) -> Self {
        Self { agent, choice }
    }

    pub fn constant(agent: usize, action: usize, type_count: usize) -> Self {
        Self::new(agent, vec![action; type_count])
    }

    pub fn action_at(&self, ty: usize) -> usize {
        self.choice[ty]
    }
}

/// One pure strategy per agent, in agent order.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct StrategyProfile {
    strategies: Vec<PureStrategy>,
}

impl StrategyProfile {
    pub fn new(strategies: Vec<PureStrategy>) -> Result<Self> {
        for (i, s) in strategies.iter().enumerate() {
            if s.agent != i {
                return Err(Error::InvalidModel(format!(
                    "strategy in position {i} belongs to agent {}",
                    s.agent
                )));
            }
        }
        Ok(Self { strategies })
    }

    /// Build from per-agent action choices (`choices[i][type] = action`).
    pub fn from_choices(choices: Vec<Vec<usize>>) -> Self {
        Self {
            strategies: choices
                .into_iter()
                .enumerate()
                .map(|(i, c)| PureStrategy::new(i, c))
                .collect(),
        }
    }

    pub fn strategies(&self) -> &[PureStrategy] {
        &self.strategies
    }

    pub fn strategy(&self, agent: usize) -> &PureStrategy {
        &self.strategies[agent]
    }

    /// `s(θ)`: the action profile played at a type profile.
    pub fn actions_at(&self, types: &[usize]) -> Vec<usize> {
        self.strategies
            .iter()
            .zip(types)
            .map(|(s, &t)| s.action_at(t))
            .collect()
    }

    pub fn validate(&self, mechanism: &Mechanism, ts: &TypeSpace) -> Result<()> {
        if self.strategies.len() != ts.agent_count() || mechanism.agent_count() != ts.agent_count()
        {
            return Err(Error::DimensionMismatch(format!(
                "profile has {} strategies for {} agents",
                self.strategies.len(),
                ts.agent_count()
            )));
        }
        for (i, s) in self.strategies.iter().enumerate() {
            if s.choice.len() != ts.type_count(i) {
                return Err(Error::DimensionMismatch(format!(
                    "agent {i}: strategy covers {} types, expected {}",
                    s.choice.len(),
                    ts.type_count(i)
                )));
            }
            for &a in &s.choice {
                check_index("action", a, mechanism.action_count(i))?;
            }
        }
        Ok(())
    }
}

/// A unilateral change of one agent's action at one of its types.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Deviation {
    pub agent: usize,
    #[serde(rename = "type")]
    pub ty: usize,
    pub action: usize,
    /// Interim payoff gain over the prescribed action; positive for a
    /// profitable deviation.
    #[serde(with = "rational::serde_str")]
    pub gap: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BneVerdict {
    pub is_equilibrium: bool,
    pub witness: Option<Deviation>,
}

/// `|S_i|^|Θ_i|` as an exact count, or `None` on overflow.
pub fn strategy_count(mechanism: &Mechanism, ts: &TypeSpace, agent: usize) -> Option<u128> {
    let base = mechanism.action_count(agent) as u128;
    let exp = u32::try_from(ts.type_count(agent)).ok()?;
    base.checked_pow(exp)
}

fn guard(size: Option<u128>, cap: u64) -> Result<()> {
    match size {
        Some(n) if n <= u128::from(cap) => Ok(()),
        Some(n) => Err(Error::SearchSpaceTooLarge {
            size: n.to_string(),
            cap,
        }),
        None => Err(Error::SearchSpaceTooLarge {
            size: "overflow".into(),
            cap,
        }),
    }
}

/// All maps `Θ_i -> S_i`, lexicographic in (type order, action order).
pub fn enumerate_pure_strategies(
    mechanism: &Mechanism,
    ts: &TypeSpace,
    agent: usize,
    cap: u64,
) -> Result<Vec<PureStrategy>> {
    check_index("agent", agent, ts.agent_count())?;
    check_index("agent", agent, mechanism.agent_count())?;
    guard(strategy_count(mechanism, ts, agent), cap)?;
    let space = ProductSpace::new(vec![mechanism.action_count(agent); ts.type_count(agent)]);
    Ok(space.iter().map(|c| PureStrategy::new(agent, c)).collect())
}

/// Whether `g(s(θ)) = f(θ)` at every type profile.
pub fn implements_scf(
    mechanism: &Mechanism,
    profile: &StrategyProfile,
    scf: &SocialChoiceFunction,
    ts: &TypeSpace,
) -> Result<bool> {
    profile.validate(mechanism, ts)?;
    scf.check_type_space(ts)?;
    if mechanism.outcomes() != scf.outcomes() {
        return Err(Error::DimensionMismatch(
            "mechanism and social choice function use different outcome sets".into(),
        ));
    }
    for types in ts.profile_space().iter() {
        if mechanism.outcome_id(&profile.actions_at(&types))? != scf.outcome_id(&types)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// The social choice function `θ -> g(s(θ))` induced by a profile.
pub fn induced_scf(
    mechanism: &Mechanism,
    profile: &StrategyProfile,
    ts: &TypeSpace,
) -> Result<SocialChoiceFunction> {
    profile.validate(mechanism, ts)?;
    let table = ts
        .profile_space()
        .iter()
        .map(|types| mechanism.outcome_id(&profile.actions_at(&types)))
        .collect::<Result<Vec<OutcomeId>>>()?;
    SocialChoiceFunction::new(ts, mechanism.outcomes().clone(), table)
}

/// A mechanism together with the type space, utilities and costs needed to
/// evaluate interim payoffs.
#[derive(Debug, Clone, Copy)]
pub struct BayesianGame<'a> {
    mechanism: &'a Mechanism,
    types: &'a TypeSpace,
    utility: &'a UtilityTable,
    costs: &'a CostModel,
    charge_misreport: bool,
}

impl<'a> BayesianGame<'a> {
    pub fn new(
        mechanism: &'a Mechanism,
        types: &'a TypeSpace,
        utility: &'a UtilityTable,
        costs: &'a CostModel,
    ) -> Result<Self> {
        if mechanism.agent_count() != types.agent_count() {
            return Err(Error::DimensionMismatch(format!(
                "mechanism has {} agents, type space {}",
                mechanism.agent_count(),
                types.agent_count()
            )));
        }
        utility.check_against(mechanism.outcomes(), types)?;
        costs.check_against(mechanism, types)?;
        Ok(Self {
            mechanism,
            types,
            utility,
            costs,
            charge_misreport: false,
        })
    }

    /// A game whose actions are type reports. In profit mode each report is
    /// charged `misreport_cost(agent, true type, report)` on top of the
    /// strategic cost.
    pub(crate) fn with_report_charges(
        mechanism: &'a Mechanism,
        types: &'a TypeSpace,
        utility: &'a UtilityTable,
        costs: &'a CostModel,
    ) -> Result<Self> {
        check_reports_are_types(mechanism, types)?;
        let mut game = Self::new(mechanism, types, utility, costs)?;
        game.charge_misreport = true;
        Ok(game)
    }

    pub fn mechanism(&self) -> &'a Mechanism {
        self.mechanism
    }

    pub fn types(&self) -> &'a TypeSpace {
        self.types
    }

    pub fn utility(&self) -> &'a UtilityTable {
        self.utility
    }

    pub fn costs(&self) -> &'a CostModel {
        self.costs
    }

    /// Cost charged to `agent` of type `ty` for playing `action` in profit mode.
    pub fn action_cost(&self, agent: usize, action: usize, ty: usize) -> Result<Rational> {
        let mut c = self.costs.strategic_cost(agent, action, ty)?.clone();
        if self.charge_misreport {
            c += self.costs.misreport_cost(agent, ty, action)?;
        }
        Ok(c)
    }

    /// `E_{θ_-i}[payoff | θ_i]` for `agent` of type `ty` when everyone follows
    /// `profile`, except that `agent` plays `deviation` (at this type only)
    /// when given.
    pub fn interim_expected_payoff(
        &self,
        profile: &StrategyProfile,
        agent: usize,
        ty: usize,
        deviation: Option<usize>,
        mode: EquilibriumMode,
    ) -> Result<Rational> {
        profile.validate(self.mechanism, self.types)?;
        check_index("agent", agent, self.types.agent_count())?;
        check_index("type", ty, self.types.type_count(agent))?;
        let own = match deviation {
            Some(a) => {
                check_index("action", a, self.mechanism.action_count(agent))?;
                a
            }
            None => profile.strategy(agent).action_at(ty),
        };
        let cost = match mode {
            EquilibriumMode::UtilityBased => rational::zero(),
            EquilibriumMode::ProfitBased => self.action_cost(agent, own, ty)?,
        };

        let mut dims = self.types.profile_space().dims().to_vec();
        dims[agent] = 1;
        let mut total = rational::zero();
        for mut types in ProductSpace::new(dims).iter() {
            types[agent] = ty;
            let weight = self.types.conditional_prior(agent, &types)?;
            let mut actions = profile.actions_at(&types);
            actions[agent] = own;
            let x = self.mechanism.outcome_id(&actions)?;
            let payoff = self.utility.utility(agent, x, ty)? - &cost;
            total += weight * payoff;
        }
        Ok(total)
    }

    /// Weak-inequality Bayesian Nash check against every single-type
    /// deviation. The witness is the deviation with the largest gain, ties
    /// broken by (agent, type, action) order.
    pub fn is_bayesian_nash(
        &self,
        profile: &StrategyProfile,
        mode: EquilibriumMode,
    ) -> Result<BneVerdict> {
        profile.validate(self.mechanism, self.types)?;
        let mut witness: Option<Deviation> = None;
        for agent in 0..self.types.agent_count() {
            for ty in 0..self.types.type_count(agent) {
                let prescribed = profile.strategy(agent).action_at(ty);
                let base = self.interim_expected_payoff(profile, agent, ty, None, mode)?;
                for action in 0..self.mechanism.action_count(agent) {
                    if action == prescribed {
                        continue;
                    }
                    let alt =
                        self.interim_expected_payoff(profile, agent, ty, Some(action), mode)?;
                    let gap = alt - &base;
                    if rational::is_positive(&gap) && witness.as_ref().is_none_or(|w| gap > w.gap) {
                        witness = Some(Deviation {
                            agent,
                            ty,
                            action,
                            gap,
                        });
                    }
                }
            }
        }
        Ok(BneVerdict {
            is_equilibrium: witness.is_none(),
            witness,
        })
    }

    /// Number of pure strategy profiles, or `None` on overflow.
    pub fn profile_count(&self) -> Option<u128> {
        (0..self.types.agent_count()).try_fold(1u128, |acc, i| {
            acc.checked_mul(strategy_count(self.mechanism, self.types, i)?)
        })
    }

    /// Every pure strategy profile, lexicographic with agent 0 most significant.
    pub fn enumerate_profiles(&self, cap: u64) -> Result<Vec<StrategyProfile>> {
        guard(self.profile_count(), cap)?;
        let per_agent = (0..self.types.agent_count())
            .map(|i| enumerate_pure_strategies(self.mechanism, self.types, i, cap))
            .collect::<Result<Vec<_>>>()?;
        let space = ProductSpace::new(per_agent.iter().map(Vec::len).collect());
        Ok(space
            .iter()
            .map(|pick| {
                StrategyProfile::from_choices(
                    pick.iter()
                        .zip(&per_agent)
                        .map(|(&k, all)| all[k].choice.clone())
                        .collect(),
                )
            })
            .collect())
    }

    /// All pure-strategy Bayesian Nash equilibria. Uniqueness claims derived
    /// from this list are over pure profiles only.
    pub fn find_all_pure_bne(
        &self,
        mode: EquilibriumMode,
        cap: u64,
    ) -> Result<Vec<StrategyProfile>> {
        let mut found = Vec::new();
        for p in self.enumerate_profiles(cap)? {
            if self.is_bayesian_nash(&p, mode)?.is_equilibrium {
                found.push(p);
            }
        }
        Ok(found)
    }

    /// Complete-information game at fixed true types. With `apply_misreport`
    /// the actions must be type reports and each agent additionally pays
    /// `misreport_cost(agent, true type, report)`.
    pub fn expost_normal_form(
        &self,
        true_types: &[usize],
        apply_misreport: bool,
        mode: EquilibriumMode,
    ) -> Result<NormalFormGame> {
        self.types.check_profile(true_types)?;
        if apply_misreport {
            check_reports_are_types(self.mechanism, self.types)?;
        }
        let agents = self.types.agent_count();
        let space = self.mechanism.action_space();
        let mut payoffs = Vec::with_capacity(space.len());
        for actions in space.iter() {
            let x = self.mechanism.outcome_id(&actions)?;
            let mut row = Vec::with_capacity(agents);
            for agent in 0..agents {
                let (a, t) = (actions[agent], true_types[agent]);
                let mut v = self.utility.utility(agent, x, t)?.clone();
                if mode == EquilibriumMode::ProfitBased {
                    v -= self.costs.strategic_cost(agent, a, t)?;
                }
                if apply_misreport {
                    v -= self.costs.misreport_cost(agent, t, a)?;
                }
                row.push(v);
            }
            payoffs.push(row);
        }
        let actions = (0..agents)
            .map(|i| self.mechanism.actions_of(i).map(<[String]>::to_vec))
            .collect::<Result<Vec<_>>>()?;
        NormalFormGame::new(actions, payoffs)
    }
}

fn check_reports_are_types(mechanism: &Mechanism, ts: &TypeSpace) -> Result<()> {
    for agent in 0..ts.agent_count() {
        if mechanism.actions_of(agent)? != ts.types_of(agent)? {
            return Err(Error::InvalidModel(format!(
                "agent {agent}: actions are not the agent's type reports"
            )));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::{Outcome, OutcomeSet};
    use crate::rational::q;
    use std::sync::Arc;

    fn single_agent(payoffs: &[Rational]) -> (Mechanism, TypeSpace, UtilityTable, CostModel) {
        let outcomes = Arc::new(
            OutcomeSet::new(
                (0..payoffs.len())
                    .map(|k| Outcome::new(format!("x{k}"), vec![]))
                    .collect(),
            )
            .unwrap(),
        );
        let actions = vec![(0..payoffs.len()).map(|k| format!("a{k}")).collect()];
        let m = Mechanism::from_fn(actions, outcomes.clone(), |a| OutcomeId(a[0])).unwrap();
        let ts = TypeSpace::uniform(vec![vec!["t".into()]]).unwrap();
        let u = UtilityTable::from_fn(&ts, &outcomes, |_, x, _, _| payoffs[x.0].clone()).unwrap();
        let c = CostModel::zero(&m, &ts).unwrap();
        (m, ts, u, c)
    }

    #[test]
    fn strategy_enumeration_counts() {
        let (m, ts, _, _) = single_agent(&[q(0, 1), q(1, 1), q(2, 1)]);
        assert_eq!(
            enumerate_pure_strategies(&m, &ts, 0, DEFAULT_PROFILE_CAP)
                .unwrap()
                .len(),
            3
        );
    }

    #[test]
    fn size_guard_refuses_large_spaces() {
        let (m, ts, _, _) = single_agent(&[q(0, 1), q(1, 1), q(2, 1)]);
        assert!(matches!(
            enumerate_pure_strategies(&m, &ts, 0, 2),
            Err(Error::SearchSpaceTooLarge { .. })
        ));
    }

    #[test]
    fn ties_are_weak_equilibria() {
        let (m, ts, u, c) = single_agent(&[q(1, 2), q(1, 2)]);
        let game = BayesianGame::new(&m, &ts, &u, &c).unwrap();
        let all = game
            .find_all_pure_bne(EquilibriumMode::ProfitBased, DEFAULT_PROFILE_CAP)
            .unwrap();
        assert_eq!(all.len(), 2);
    }

    #[test]
    fn witness_picks_largest_gap() {
        let (m, ts, u, c) = single_agent(&[q(0, 1), q(2, 1), q(3, 1)]);
        let game = BayesianGame::new(&m, &ts, &u, &c).unwrap();
        let v = game
            .is_bayesian_nash(
                &StrategyProfile::from_choices(vec![vec![0]]),
                EquilibriumMode::UtilityBased,
            )
            .unwrap();
        assert!(!v.is_equilibrium);
        let w = v.witness.unwrap();
        assert_eq!((w.action, w.gap), (2, q(3, 1)));
    }

    #[test]
    fn profile_validation() {
        let (m, ts, u, c) = single_agent(&[q(0, 1), q(1, 1)]);
        let game = BayesianGame::new(&m, &ts, &u, &c).unwrap();
        let bad = StrategyProfile::from_choices(vec![vec![5]]);
        assert!(game
            .is_bayesian_nash(&bad, EquilibriumMode::ProfitBased)
            .is_err());
        assert!(StrategyProfile::new(vec![PureStrategy::new(1, vec![0])]).is_err());
    }
}
