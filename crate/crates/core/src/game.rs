//! Primitive data model: type spaces with independent priors, outcomes,
//! social choice functions, mechanisms, utilities and costs.
//!
//! All finite sets are ordered. Types, actions and outcomes are addressed by
//! their position in that order; labels are kept for lookup and reporting.

use std::collections::HashSet;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{check_index, Error, Result};
use crate::profile::ProductSpace;
use crate::rational::{self, Rational};

fn check_unique(kind: &str, labels: &[String]) -> Result<()> {
    let mut seen = HashSet::new();
    for l in labels {
        if !seen.insert(l.as_str()) {
            return Err(Error::InvalidModel(format!("duplicate {kind} label `{l}`")));
        }
    }
    Ok(())
}

fn position(kind: &'static str, labels: &[String], label: &str) -> Result<usize> {
    labels
        .iter()
        .position(|l| l == label)
        .ok_or_else(|| Error::UnknownLabel {
            kind,
            label: label.to_string(),
        })
}

/// Per-agent finite type sets with an independent, full-support prior.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TypeSpace {
    labels: Vec<Vec<String>>,
    priors: Vec<Vec<Rational>>,
}

impl TypeSpace {
    pub fn new(labels: Vec<Vec<String>>, priors: Vec<Vec<Rational>>) -> Result<Self> {
        if labels.is_empty() {
            return Err(Error::InvalidModel(
                "a type space needs at least one agent".into(),
            ));
        }
        if labels.len() != priors.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} type lists but {} priors",
                labels.len(),
                priors.len()
            )));
        }
        for (agent, (types, prior)) in labels.iter().zip(&priors).enumerate() {
            if types.is_empty() {
                return Err(Error::InvalidModel(format!("agent {agent} has no types")));
            }
            check_unique("type", types)?;
            if types.len() != prior.len() {
                return Err(Error::DimensionMismatch(format!(
                    "agent {agent}: {} types but {} prior weights",
                    types.len(),
                    prior.len()
                )));
            }
            if let Some(p) = prior.iter().find(|p| !rational::is_positive(p)) {
                return Err(Error::InvalidModel(format!(
                    "agent {agent}: prior weight {p} is not strictly positive"
                )));
            }
            let total: Rational = prior.iter().sum();
            if total != rational::one() {
                return Err(Error::InvalidModel(format!(
                    "agent {agent}: prior sums to {total}, not 1"
                )));
            }
        }
        Ok(Self { labels, priors })
    }

    /// Uniform prior over each agent's types.
    pub fn uniform(labels: Vec<Vec<String>>) -> Result<Self> {
        let priors = labels
            .iter()
            .map(|ts| {
                let n = i64::try_from(ts.len().max(1)).expect("type count fits in i64");
                vec![rational::q(1, n); ts.len()]
            })
            .collect();
        Self::new(labels, priors)
    }

    pub fn agent_count(&self) -> usize {
        self.labels.len()
    }

    pub fn types_of(&self, agent: usize) -> Result<&[String]> {
        check_index("agent", agent, self.labels.len())?;
        Ok(&self.labels[agent])
    }

    pub fn prior_of(&self, agent: usize) -> Result<&[Rational]> {
        check_index("agent", agent, self.labels.len())?;
        Ok(&self.priors[agent])
    }

    pub fn type_count(&self, agent: usize) -> usize {
        self.labels.get(agent).map_or(0, Vec::len)
    }

    pub fn type_index(&self, agent: usize, label: &str) -> Result<usize> {
        position("type", self.types_of(agent)?, label)
    }

    pub fn type_label(&self, agent: usize, index: usize) -> Result<&str> {
        let types = self.types_of(agent)?;
        check_index("type", index, types.len())?;
        Ok(&types[index])
    }

    /// Resolve a profile of type labels into type indices.
    pub fn profile_from_labels(&self, labels: &[&str]) -> Result<Vec<usize>> {
        if labels.len() != self.agent_count() {
            return Err(Error::DimensionMismatch(format!(
                "type profile has {} entries, expected {}",
                labels.len(),
                self.agent_count()
            )));
        }
        labels
            .iter()
            .enumerate()
            .map(|(agent, l)| self.type_index(agent, l))
            .collect()
    }

    pub fn profile_space(&self) -> ProductSpace {
        ProductSpace::new(self.labels.iter().map(Vec::len).collect())
    }

    pub fn check_profile(&self, profile: &[usize]) -> Result<()> {
        self.profile_space().index_of(profile).map(|_| ())
    }

    /// Probability of a full type profile under the independent prior.
    pub fn joint_prior(&self, profile: &[usize]) -> Result<Rational> {
        self.check_profile(profile)?;
        Ok(profile
            .iter()
            .enumerate()
            .map(|(agent, &t)| &self.priors[agent][t])
            .product())
    }

    /// Probability of `profile`'s opponents' types given `agent`'s own type,
    /// i.e. the joint prior with `agent`'s marginal divided out.
    pub fn conditional_prior(&self, agent: usize, profile: &[usize]) -> Result<Rational> {
        self.check_profile(profile)?;
        check_index("agent", agent, self.agent_count())?;
        Ok(profile
            .iter()
            .enumerate()
            .filter(|&(j, _)| j != agent)
            .map(|(j, &t)| &self.priors[j][t])
            .product())
    }
}

/// An element of the outcome set `X`. The payload is model specific and
/// never interpreted by the engine.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Outcome {
    pub label: String,
    #[serde(with = "rational::serde_vec_str")]
    pub payload: Vec<Rational>,
}

impl Outcome {
    pub fn new(label: impl Into<String>, payload: Vec<Rational>) -> Self {
        Self {
            label: label.into(),
            payload,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct OutcomeId(pub usize);

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OutcomeSet {
    outcomes: Vec<Outcome>,
}

impl OutcomeSet {
    pub fn new(outcomes: Vec<Outcome>) -> Result<Self> {
        if outcomes.is_empty() {
            return Err(Error::InvalidModel("outcome set is empty".into()));
        }
        let labels: Vec<String> = outcomes.iter().map(|o| o.label.clone()).collect();
        check_unique("outcome", &labels)?;
        Ok(Self { outcomes })
    }

    pub fn len(&self) -> usize {
        self.outcomes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.outcomes.is_empty()
    }

    pub fn get(&self, id: OutcomeId) -> Result<&Outcome> {
        check_index("outcome", id.0, self.outcomes.len())?;
        Ok(&self.outcomes[id.0])
    }

    pub fn id_of(&self, label: &str) -> Result<OutcomeId> {
        self.outcomes
            .iter()
            .position(|o| o.label == label)
            .map(OutcomeId)
            .ok_or_else(|| Error::UnknownLabel {
                kind: "outcome",
                label: label.to_string(),
            })
    }

    pub fn iter(&self) -> impl Iterator<Item = (OutcomeId, &Outcome)> {
        self.outcomes
            .iter()
            .enumerate()
            .map(|(i, o)| (OutcomeId(i), o))
    }
}

fn check_table(
    what: &str,
    space: &ProductSpace,
    outcomes: &OutcomeSet,
    table: &[OutcomeId],
) -> Result<()> {
    if table.len() != space.len() {
        return Err(Error::InvalidModel(format!(
            "{what} table has {} entries but the profile space has {}",
            table.len(),
            space.len()
        )));
    }
    for id in table {
        check_index("outcome", id.0, outcomes.len())?;
    }
    Ok(())
}

/// A total map from type profiles to outcomes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SocialChoiceFunction {
    outcomes: Arc<OutcomeSet>,
    space: ProductSpace,
    table: Vec<OutcomeId>,
}

impl SocialChoiceFunction {
    /// `table` is indexed by the type profile in lexicographic order.
    pub fn new(ts: &TypeSpace, outcomes: Arc<OutcomeSet>, table: Vec<OutcomeId>) -> Result<Self> {
        let space = ts.profile_space();
        check_table("social choice", &space, &outcomes, &table)?;
        Ok(Self {
            outcomes,
            space,
            table,
        })
    }

    pub fn from_fn(
        ts: &TypeSpace,
        outcomes: Arc<OutcomeSet>,
        mut rule: impl FnMut(&[usize]) -> OutcomeId,
    ) -> Result<Self> {
        let table = ts.profile_space().iter().map(|p| rule(&p)).collect();
        Self::new(ts, outcomes, table)
    }

    pub fn outcomes(&self) -> &Arc<OutcomeSet> {
        &self.outcomes
    }

    pub fn type_dims(&self) -> &[usize] {
        self.space.dims()
    }

    pub fn table(&self) -> &[OutcomeId] {
        &self.table
    }

    pub fn outcome_id(&self, profile: &[usize]) -> Result<OutcomeId> {
        Ok(self.table[self.space.index_of(profile)?])
    }

    /// `f(θ)` for a profile of type indices.
    pub fn evaluate(&self, profile: &[usize]) -> Result<&Outcome> {
        self.outcomes.get(self.outcome_id(profile)?)
    }

    /// `f(θ)` for a profile of type labels.
    pub fn evaluate_labels(&self, ts: &TypeSpace, labels: &[&str]) -> Result<&Outcome> {
        self.check_type_space(ts)?;
        self.evaluate(&ts.profile_from_labels(labels)?)
    }

    pub fn check_type_space(&self, ts: &TypeSpace) -> Result<()> {
        if ts.profile_space() != self.space {
            return Err(Error::DimensionMismatch(format!(
                "social choice function is defined over type counts {:?}, type space has {:?}",
                self.space.dims(),
                ts.profile_space().dims()
            )));
        }
        Ok(())
    }
}

/// Per-agent action sets plus an outcome function over action profiles.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Mechanism {
    actions: Vec<Vec<String>>,
    outcomes: Arc<OutcomeSet>,
    space: ProductSpace,
    table: Vec<OutcomeId>,
}

impl Mechanism {
    /// `table` is indexed by the action profile in lexicographic order.
    pub fn new(
        actions: Vec<Vec<String>>,
        outcomes: Arc<OutcomeSet>,
        table: Vec<OutcomeId>,
    ) -> Result<Self> {
        if actions.is_empty() {
            return Err(Error::InvalidModel(
                "a mechanism needs at least one agent".into(),
            ));
        }
        for (agent, set) in actions.iter().enumerate() {
            if set.is_empty() {
                return Err(Error::InvalidModel(format!("agent {agent} has no actions")));
            }
            check_unique("action", set)?;
        }
        let space = ProductSpace::new(actions.iter().map(Vec::len).collect());
        check_table("outcome function", &space, &outcomes, &table)?;
        Ok(Self {
            actions,
            outcomes,
            space,
            table,
        })
    }

    pub fn from_fn(
        actions: Vec<Vec<String>>,
        outcomes: Arc<OutcomeSet>,
        mut rule: impl FnMut(&[usize]) -> OutcomeId,
    ) -> Result<Self> {
        let space = ProductSpace::new(actions.iter().map(Vec::len).collect());
        let table = space.iter().map(|p| rule(&p)).collect();
        Self::new(actions, outcomes, table)
    }

    pub fn agent_count(&self) -> usize {
        self.actions.len()
    }

    pub fn actions_of(&self, agent: usize) -> Result<&[String]> {
        check_index("agent", agent, self.actions.len())?;
        Ok(&self.actions[agent])
    }

    pub fn action_count(&self, agent: usize) -> usize {
        self.actions.get(agent).map_or(0, Vec::len)
    }

    pub fn action_index(&self, agent: usize, label: &str) -> Result<usize> {
        position("action", self.actions_of(agent)?, label)
    }

    pub fn action_label(&self, agent: usize, index: usize) -> Result<&str> {
        let set = self.actions_of(agent)?;
        check_index("action", index, set.len())?;
        Ok(&set[index])
    }

    pub fn action_space(&self) -> &ProductSpace {
        &self.space
    }

    pub fn outcomes(&self) -> &Arc<OutcomeSet> {
        &self.outcomes
    }

    pub fn table(&self) -> &[OutcomeId] {
        &self.table
    }

    /// `g(s)` as an outcome id.
    pub fn outcome_id(&self, actions: &[usize]) -> Result<OutcomeId> {
        Ok(self.table[self.space.index_of(actions)?])
    }

    pub fn outcome_of(&self, actions: &[usize]) -> Result<&Outcome> {
        self.outcomes.get(self.outcome_id(actions)?)
    }
}

type Cube = Vec<Vec<Vec<Rational>>>;

fn cube_shape(cube: &Cube) -> Vec<(usize, Vec<usize>)> {
    cube.iter()
        .map(|rows| (rows.len(), rows.iter().map(Vec::len).collect()))
        .collect()
}

/// Strategic cost `c_i(s_i, θ_i)` and the misreporting schedule
/// `c_mis(i, θ, θ̂)` of direct mechanisms.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CostModel {
    /// `[agent][action][true type]`
    strategic: Cube,
    /// `[agent][true type][reported type]`
    misreport: Cube,
}

impl CostModel {
    pub fn new(strategic: Cube, misreport: Cube) -> Result<Self> {
        if strategic.len() != misreport.len() {
            return Err(Error::DimensionMismatch(format!(
                "strategic costs cover {} agents, misreport costs {}",
                strategic.len(),
                misreport.len()
            )));
        }
        for (agent, rows) in strategic.iter().enumerate() {
            for row in rows {
                if let Some(c) = row.iter().find(|c| rational::is_negative(c)) {
                    return Err(Error::InvalidModel(format!(
                        "agent {agent}: negative strategic cost {c}"
                    )));
                }
            }
        }
        for (agent, rows) in misreport.iter().enumerate() {
            for (t, row) in rows.iter().enumerate() {
                if row.len() != rows.len() {
                    return Err(Error::DimensionMismatch(format!(
                        "agent {agent}: misreport row {t} has {} entries, expected {}",
                        row.len(),
                        rows.len()
                    )));
                }
                if let Some(c) = row.iter().find(|c| rational::is_negative(c)) {
                    return Err(Error::InvalidModel(format!(
                        "agent {agent}: negative misreport cost {c}"
                    )));
                }
                if row[t] != rational::zero() {
                    return Err(Error::InvalidModel(format!(
                        "agent {agent}: truthful report of type {t} must be free, found {}",
                        row[t]
                    )));
                }
            }
        }
        Ok(Self {
            strategic,
            misreport,
        })
    }

    /// Build from closures over `(agent, action, type)` and
    /// `(agent, true type, reported type)`.
    pub fn from_fns(
        mechanism: &Mechanism,
        ts: &TypeSpace,
        mut strategic: impl FnMut(usize, usize, usize) -> Rational,
        mut misreport: impl FnMut(usize, usize, usize) -> Rational,
    ) -> Result<Self> {
        if mechanism.agent_count() != ts.agent_count() {
            return Err(Error::DimensionMismatch(format!(
                "mechanism has {} agents, type space {}",
                mechanism.agent_count(),
                ts.agent_count()
            )));
        }
        let agents = ts.agent_count();
        let s = (0..agents)
            .map(|i| {
                (0..mechanism.action_count(i))
                    .map(|a| (0..ts.type_count(i)).map(|t| strategic(i, a, t)).collect())
                    .collect()
            })
            .collect();
        let m = (0..agents)
            .map(|i| {
                let n = ts.type_count(i);
                (0..n)
                    .map(|t| (0..n).map(|r| misreport(i, t, r)).collect())
                    .collect()
            })
            .collect();
        Self::new(s, m)
    }

    pub fn zero(mechanism: &Mechanism, ts: &TypeSpace) -> Result<Self> {
        Self::from_fns(
            mechanism,
            ts,
            |_, _, _| rational::zero(),
            |_, _, _| rational::zero(),
        )
    }

    /// Same misreporting schedule, strategic costs removed.
    pub fn without_strategic(&self) -> Self {
        Self {
            strategic: self
                .strategic
                .iter()
                .map(|rows| {
                    rows.iter()
                        .map(|r| vec![rational::zero(); r.len()])
                        .collect()
                })
                .collect(),
            misreport: self.misreport.clone(),
        }
    }

    /// Same strategic costs, misreporting made free.
    pub fn without_misreport(&self) -> Self {
        Self {
            strategic: self.strategic.clone(),
            misreport: self
                .misreport
                .iter()
                .map(|rows| {
                    rows.iter()
                        .map(|r| vec![rational::zero(); r.len()])
                        .collect()
                })
                .collect(),
        }
    }

    pub fn agent_count(&self) -> usize {
        self.strategic.len()
    }

    pub fn strategic_cost(&self, agent: usize, action: usize, ty: usize) -> Result<&Rational> {
        check_index("agent", agent, self.strategic.len())?;
        let rows = &self.strategic[agent];
        check_index("action", action, rows.len())?;
        check_index("type", ty, rows[action].len())?;
        Ok(&rows[action][ty])
    }

    pub fn misreport_cost(&self, agent: usize, truth: usize, report: usize) -> Result<&Rational> {
        check_index("agent", agent, self.misreport.len())?;
        let rows = &self.misreport[agent];
        check_index("type", truth, rows.len())?;
        check_index("type", report, rows[truth].len())?;
        Ok(&rows[truth][report])
    }

    pub fn has_zero_strategic(&self) -> bool {
        self.strategic
            .iter()
            .flatten()
            .flatten()
            .all(|c| c == &rational::zero())
    }

    pub fn has_zero_misreport(&self) -> bool {
        self.misreport
            .iter()
            .flatten()
            .flatten()
            .all(|c| c == &rational::zero())
    }

    /// Check that the tables cover exactly `mechanism`'s actions and `ts`'s types.
    pub fn check_against(&self, mechanism: &Mechanism, ts: &TypeSpace) -> Result<()> {
        let expected_strategic: Vec<_> = (0..ts.agent_count())
            .map(|i| {
                (
                    mechanism.action_count(i),
                    vec![ts.type_count(i); mechanism.action_count(i)],
                )
            })
            .collect();
        if cube_shape(&self.strategic) != expected_strategic {
            return Err(Error::DimensionMismatch(
                "strategic cost table does not match the mechanism's actions and types".into(),
            ));
        }
        self.check_misreport_against(ts)
    }

    pub(crate) fn check_misreport_against(&self, ts: &TypeSpace) -> Result<()> {
        let expected: Vec<_> = (0..ts.agent_count())
            .map(|i| (ts.type_count(i), vec![ts.type_count(i); ts.type_count(i)]))
            .collect();
        if cube_shape(&self.misreport) != expected {
            return Err(Error::DimensionMismatch(
                "misreport cost table does not match the type space".into(),
            ));
        }
        Ok(())
    }
}

/// `u_i(x, θ_i)` tabled over agents, outcomes and own types.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UtilityTable {
    /// `[agent][outcome][type]`
    values: Cube,
}

impl UtilityTable {
    pub fn new(values: Cube) -> Result<Self> {
        for (agent, rows) in values.iter().enumerate() {
            let Some(first) = rows.first() else {
                return Err(Error::InvalidModel(format!(
                    "agent {agent}: empty utility table"
                )));
            };
            if rows.iter().any(|r| r.len() != first.len()) {
                return Err(Error::DimensionMismatch(format!(
                    "agent {agent}: ragged utility table"
                )));
            }
        }
        Ok(Self { values })
    }

    pub fn from_fn(
        ts: &TypeSpace,
        outcomes: &OutcomeSet,
        mut utility: impl FnMut(usize, OutcomeId, &Outcome, usize) -> Rational,
    ) -> Result<Self> {
        let values = (0..ts.agent_count())
            .map(|i| {
                outcomes
                    .iter()
                    .map(|(id, x)| {
                        (0..ts.type_count(i))
                            .map(|t| utility(i, id, x, t))
                            .collect()
                    })
                    .collect()
            })
            .collect();
        Self::new(values)
    }

    pub fn agent_count(&self) -> usize {
        self.values.len()
    }

    pub fn utility(&self, agent: usize, outcome: OutcomeId, ty: usize) -> Result<&Rational> {
        check_index("agent", agent, self.values.len())?;
        let rows = &self.values[agent];
        check_index("outcome", outcome.0, rows.len())?;
        check_index("type", ty, rows[outcome.0].len())?;
        Ok(&rows[outcome.0][ty])
    }

    pub fn check_against(&self, outcomes: &OutcomeSet, ts: &TypeSpace) -> Result<()> {
        let ok = self.values.len() == ts.agent_count()
            && self.values.iter().enumerate().all(|(i, rows)| {
                rows.len() == outcomes.len() && rows.iter().all(|r| r.len() == ts.type_count(i))
            });
        if ok {
            Ok(())
        } else {
            Err(Error::DimensionMismatch(
                "utility table does not cover agents x outcomes x types".into(),
            ))
        }
    }
}

/// `p_i = u_i(x, θ_i) - c_i(s_i, θ_i)`. Misreporting costs are not part of
/// this quantity; they are charged only inside direct mechanisms.
pub fn profit(
    agent: usize,
    outcome: OutcomeId,
    action: usize,
    ty: usize,
    utility: &UtilityTable,
    costs: &CostModel,
) -> Result<Rational> {
    Ok(utility.utility(agent, outcome, ty)? - costs.strategic_cost(agent, action, ty)?)
}
