//! Scenario files.

use std::collections::HashMap;
use std::path::Path;
use std::sync::Arc;

use revelation_core::labor::LaborParams;
use revelation_core::profile::ProductSpace;
use revelation_core::rational::{self, Rational};
use revelation_core::{
    CostModel, Mechanism, Outcome, OutcomeId, OutcomeSet, SocialChoiceFunction, StrategyProfile,
    TypeSpace, UtilityTable,
};
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum ScenarioConfig {
    Labor(LaborConfig),
    Generic(GenericConfig),
}

/// One rational for every agent, or one per agent.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PriorHigh {
    Shared(#[serde(with = "rational::serde_str")] Rational),
    PerAgent(#[serde(with = "rational::serde_vec_str")] Vec<Rational>),
}

impl PriorHigh {
    pub fn per_agent(&self) -> Vec<Rational> {
        match self {
            PriorHigh::Shared(p) => vec![p.clone(), p.clone()],
            PriorHigh::PerAgent(ps) => ps.clone(),
        }
    }
}

impl Default for PriorHigh {
    fn default() -> Self {
        PriorHigh::Shared(rational::q(1, 2))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LaborConfig {
    #[serde(with = "rational::serde_str")]
    pub theta_low: Rational,
    #[serde(with = "rational::serde_str")]
    pub theta_high: Rational,
    #[serde(with = "rational::serde_str")]
    pub education: Rational,
    #[serde(with = "rational::serde_str")]
    pub wage: Rational,
    #[serde(with = "rational::serde_str", default = "rational::zero")]
    pub misreport_cost: Rational,
    #[serde(default)]
    pub prior_high: PriorHigh,
    /// Drop every strategic and misreporting cost.
    #[serde(default)]
    pub zero_costs: bool,
}

impl LaborConfig {
    pub fn params(&self) -> LaborParams {
        let mut p = LaborParams::new(
            self.theta_low.clone(),
            self.theta_high.clone(),
            self.education.clone(),
            self.wage.clone(),
            self.misreport_cost.clone(),
        );
        p.prior_high = self.prior_high.per_agent();
        p
    }
}

impl From<&LaborParams> for LaborConfig {
    fn from(p: &LaborParams) -> Self {
        Self {
            theta_low: p.theta_low.clone(),
            theta_high: p.theta_high.clone(),
            education: p.education.clone(),
            wage: p.wage.clone(),
            misreport_cost: p.misreport_cost.clone(),
            prior_high: PriorHigh::PerAgent(p.prior_high.clone()),
            zero_costs: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AgentSpec {
    pub types: Vec<String>,
    /// Defaults to uniform.
    #[serde(
        default,
        with = "rational::serde_vec_str",
        skip_serializing_if = "Vec::is_empty"
    )]
    pub prior: Vec<Rational>,
    pub actions: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum OutcomeSpec {
    Label(String),
    Full(Outcome),
}

impl OutcomeSpec {
    fn into_outcome(self) -> Outcome {
        match self {
            OutcomeSpec::Label(l) => Outcome::new(l, vec![]),
            OutcomeSpec::Full(o) => o,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ActionEntry {
    pub actions: Vec<String>,
    pub outcome: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScfEntry {
    pub types: Vec<String>,
    pub outcome: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct UtilityEntry {
    pub agent: usize,
    #[serde(rename = "type")]
    pub ty: String,
    pub outcome: String,
    #[serde(with = "rational::serde_str")]
    pub value: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StrategicCostEntry {
    pub agent: usize,
    pub action: String,
    #[serde(rename = "type")]
    pub ty: String,
    #[serde(with = "rational::serde_str")]
    pub value: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MisreportCostEntry {
    pub agent: usize,
    #[serde(rename = "type")]
    pub ty: String,
    pub report: String,
    #[serde(with = "rational::serde_str")]
    pub value: Rational,
}

/// Explicit finite model. Tables for the outcome function, the social
/// choice function and utilities must be total; missing cost entries are 0.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GenericConfig {
    pub agents: Vec<AgentSpec>,
    pub outcomes: Vec<OutcomeSpec>,
    pub outcome_function: Vec<ActionEntry>,
    pub scf: Vec<ScfEntry>,
    pub utility: Vec<UtilityEntry>,
    #[serde(default)]
    pub strategic_cost: Vec<StrategicCostEntry>,
    #[serde(default)]
    pub misreport_cost: Vec<MisreportCostEntry>,
    /// Candidate equilibrium: per agent, the action label of each type.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub profile: Option<Vec<Vec<String>>>,
}

/// A generic scenario resolved against the core model types.
#[derive(Debug, Clone)]
pub struct GenericModel {
    pub types: TypeSpace,
    pub mechanism: Mechanism,
    pub scf: SocialChoiceFunction,
    pub utility: UtilityTable,
    pub costs: CostModel,
    pub profile: Option<StrategyProfile>,
}

fn invalid(field: impl Into<String>, msg: impl std::fmt::Display) -> CliError {
    CliError::Invalid {
        field: field.into(),
        message: msg.to_string(),
    }
}

fn lookup(labels: &[String], label: &str, field: &str, kind: &str) -> Result<usize, CliError> {
    labels
        .iter()
        .position(|l| l == label)
        .ok_or_else(|| invalid(field, format!("unknown {kind} `{label}`")))
}

/// Fill a total table indexed by `space`, rejecting gaps and duplicates.
fn fill_table(
    field: &str,
    space: &ProductSpace,
    entries: impl Iterator<Item = Result<(Vec<usize>, OutcomeId), CliError>>,
) -> Result<Vec<OutcomeId>, CliError> {
    let mut table: Vec<Option<OutcomeId>> = vec![None; space.len()];
    for (k, entry) in entries.enumerate() {
        let (point, id) = entry?;
        let idx = space
            .index_of(&point)
            .map_err(|e| invalid(format!("{field}[{k}]"), e))?;
        if table[idx].replace(id).is_some() {
            return Err(invalid(format!("{field}[{k}]"), "duplicate entry"));
        }
    }
    table
        .into_iter()
        .zip(space.iter())
        .map(|(x, point)| {
            x.ok_or_else(|| invalid(field, format!("missing entry for index profile {point:?}")))
        })
        .collect()
}

impl GenericConfig {
    pub fn build(&self) -> Result<GenericModel, CliError> {
        if self.agents.is_empty() {
            return Err(invalid("agents", "at least one agent is required"));
        }
        let n = self.agents.len();
        let type_labels: Vec<Vec<String>> = self.agents.iter().map(|a| a.types.clone()).collect();
        let action_labels: Vec<Vec<String>> =
            self.agents.iter().map(|a| a.actions.clone()).collect();
        let priors = self
            .agents
            .iter()
            .map(|a| {
                if a.prior.is_empty() {
                    let k = a.types.len().max(1) as i64;
                    vec![rational::q(1, k); a.types.len()]
                } else {
                    a.prior.clone()
                }
            })
            .collect();
        let types =
            TypeSpace::new(type_labels.clone(), priors).map_err(|e| invalid("agents", e))?;

        let outcomes = Arc::new(
            OutcomeSet::new(
                self.outcomes
                    .iter()
                    .cloned()
                    .map(OutcomeSpec::into_outcome)
                    .collect(),
            )
            .map_err(|e| invalid("outcomes", e))?,
        );
        let outcome_id =
            |field: &str, label: &str| outcomes.id_of(label).map_err(|e| invalid(field, e));

        let arity = |field: String, got: usize| {
            if got == n {
                Ok(())
            } else {
                Err(invalid(field, format!("expected {n} labels, got {got}")))
            }
        };

        let action_space = ProductSpace::new(action_labels.iter().map(Vec::len).collect());
        let g = fill_table(
            "outcome_function",
            &action_space,
            self.outcome_function.iter().enumerate().map(|(k, e)| {
                let field = format!("outcome_function[{k}]");
                arity(field.clone(), e.actions.len())?;
                let point = e
                    .actions
                    .iter()
                    .enumerate()
                    .map(|(i, l)| lookup(&action_labels[i], l, &field, "action"))
                    .collect::<Result<_, _>>()?;
                Ok((point, outcome_id(&field, &e.outcome)?))
            }),
        )?;
        let mechanism = Mechanism::new(action_labels.clone(), outcomes.clone(), g)
            .map_err(|e| invalid("outcome_function", e))?;

        let type_space = types.profile_space();
        let f = fill_table(
            "scf",
            &type_space,
            self.scf.iter().enumerate().map(|(k, e)| {
                let field = format!("scf[{k}]");
                arity(field.clone(), e.types.len())?;
                let point = e
                    .types
                    .iter()
                    .enumerate()
                    .map(|(i, l)| lookup(&type_labels[i], l, &field, "type"))
                    .collect::<Result<_, _>>()?;
                Ok((point, outcome_id(&field, &e.outcome)?))
            }),
        )?;
        let scf = SocialChoiceFunction::new(&types, outcomes.clone(), f)
            .map_err(|e| invalid("scf", e))?;

        let agent_index = |field: &str, agent: usize| {
            if agent < n {
                Ok(agent)
            } else {
                Err(invalid(
                    field,
                    format!("agent {agent} out of range ({n} agents)"),
                ))
            }
        };

        let mut utility: HashMap<(usize, usize, usize), Rational> = HashMap::new();
        for (k, e) in self.utility.iter().enumerate() {
            let field = format!("utility[{k}]");
            let i = agent_index(&field, e.agent)?;
            let t = lookup(&type_labels[i], &e.ty, &field, "type")?;
            let x = outcome_id(&field, &e.outcome)?;
            if utility.insert((i, x.0, t), e.value.clone()).is_some() {
                return Err(invalid(field, "duplicate entry"));
            }
        }
        let mut missing = None;
        let utility_table = UtilityTable::from_fn(&types, &outcomes, |i, x, o, t| {
            utility.get(&(i, x.0, t)).cloned().unwrap_or_else(|| {
                missing.get_or_insert((i, o.label.clone(), type_labels[i][t].clone()));
                rational::zero()
            })
        })
        .map_err(|e| invalid("utility", e))?;
        if let Some((i, o, t)) = missing {
            return Err(invalid(
                "utility",
                format!("missing entry for agent {i}, type `{t}`, outcome `{o}`"),
            ));
        }

        let mut strategic: HashMap<(usize, usize, usize), Rational> = HashMap::new();
        for (k, e) in self.strategic_cost.iter().enumerate() {
            let field = format!("strategic_cost[{k}]");
            let i = agent_index(&field, e.agent)?;
            let a = lookup(&action_labels[i], &e.action, &field, "action")?;
            let t = lookup(&type_labels[i], &e.ty, &field, "type")?;
            if strategic.insert((i, a, t), e.value.clone()).is_some() {
                return Err(invalid(field, "duplicate entry"));
            }
        }
        let mut misreport: HashMap<(usize, usize, usize), Rational> = HashMap::new();
        for (k, e) in self.misreport_cost.iter().enumerate() {
            let field = format!("misreport_cost[{k}]");
            let i = agent_index(&field, e.agent)?;
            let t = lookup(&type_labels[i], &e.ty, &field, "type")?;
            let r = lookup(&type_labels[i], &e.report, &field, "type")?;
            if misreport.insert((i, t, r), e.value.clone()).is_some() {
                return Err(invalid(field, "duplicate entry"));
            }
        }
        let costs = CostModel::from_fns(
            &mechanism,
            &types,
            |i, a, t| {
                strategic
                    .get(&(i, a, t))
                    .cloned()
                    .unwrap_or_else(rational::zero)
            },
            |i, t, r| {
                misreport
                    .get(&(i, t, r))
                    .cloned()
                    .unwrap_or_else(rational::zero)
            },
        )
        .map_err(|e| invalid("costs", e))?;

        let profile = match &self.profile {
            None => None,
            Some(rows) => {
                if rows.len() != n {
                    return Err(invalid(
                        "profile",
                        format!("expected {n} strategies, got {}", rows.len()),
                    ));
                }
                let choices = rows
                    .iter()
                    .enumerate()
                    .map(|(i, row)| {
                        let field = format!("profile[{i}]");
                        if row.len() != types.type_count(i) {
                            return Err(invalid(
                                field,
                                format!(
                                    "expected one action per type ({}), got {}",
                                    types.type_count(i),
                                    row.len()
                                ),
                            ));
                        }
                        row.iter()
                            .map(|l| lookup(&action_labels[i], l, &field, "action"))
                            .collect()
                    })
                    .collect::<Result<Vec<Vec<usize>>, _>>()?;
                Some(StrategyProfile::from_choices(choices))
            }
        };

        Ok(GenericModel {
            types,
            mechanism,
            scf,
            utility: utility_table,
            costs,
            profile,
        })
    }
}

fn field_error(e: serde_path_to_error::Error<serde_json::Error>) -> CliError {
    let path = e.path().to_string();
    invalid(
        if path == "." { "(root)".into() } else { path },
        e.into_inner(),
    )
}

/// Syntax errors carry a line and column, semantic errors the path of the
/// offending field.
pub fn parse_config(text: &str) -> Result<ScenarioConfig, CliError> {
    let mut value: serde_json::Value = serde_json::from_str(text).map_err(CliError::Parse)?;
    let kind = value
        .as_object_mut()
        .ok_or_else(|| invalid("(root)", "expected a JSON object"))?
        .remove("kind")
        .ok_or_else(|| invalid("kind", "missing; expected \"labor\" or \"generic\""))?;
    match kind.as_str() {
        Some("labor") => serde_path_to_error::deserialize(value)
            .map(ScenarioConfig::Labor)
            .map_err(field_error),
        Some("generic") => serde_path_to_error::deserialize(value)
            .map(ScenarioConfig::Generic)
            .map_err(field_error),
        _ => Err(invalid(
            "kind",
            format!("expected \"labor\" or \"generic\", got {kind}"),
        )),
    }
}

pub fn load_config(path: &Path) -> Result<ScenarioConfig, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Io {
        path: path.display().to_string(),
        source: e,
    })?;
    parse_config(&text)
}

/// `(w, c_mis)` grid over otherwise fixed labor parameters.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepGrid {
    #[serde(with = "rational::serde_vec_str")]
    pub w_values: Vec<Rational>,
    #[serde(with = "rational::serde_vec_str")]
    pub cmis_values: Vec<Rational>,
    pub fixed: FixedParams,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FixedParams {
    #[serde(with = "rational::serde_str")]
    pub theta_low: Rational,
    #[serde(with = "rational::serde_str")]
    pub theta_high: Rational,
    #[serde(with = "rational::serde_str")]
    pub education: Rational,
    #[serde(default)]
    pub prior_high: PriorHigh,
}

impl SweepGrid {
    pub fn validate(&self) -> Result<(), CliError> {
        if self.w_values.is_empty() {
            return Err(invalid("w_values", "must not be empty"));
        }
        if self.cmis_values.is_empty() {
            return Err(invalid("cmis_values", "must not be empty"));
        }
        Ok(())
    }

    pub fn params_at(&self, w: &Rational, c: &Rational) -> LaborParams {
        let mut p = LaborParams::new(
            self.fixed.theta_low.clone(),
            self.fixed.theta_high.clone(),
            self.fixed.education.clone(),
            w.clone(),
            c.clone(),
        );
        p.prior_high = self.fixed.prior_high.per_agent();
        p
    }
}

pub fn load_sweep(path: &Path) -> Result<SweepGrid, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Io {
        path: path.display().to_string(),
        source: e,
    })?;
    let grid: SweepGrid =
        serde_path_to_error::deserialize(&mut serde_json::Deserializer::from_str(&text))
            .map_err(field_error)?;
    grid.validate()?;
    Ok(grid)
}
