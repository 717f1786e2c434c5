//! Analysis of a single scenario and its labeled report.

use std::fmt::Write as _;

use revelation_core::labor::{
    build_labor_scenario, check_proposition3, firm_expected_utility, wage_window, LaborParams,
    LaborScenario, WageWindow,
};
use revelation_core::rational::{self, Rational};
use revelation_core::{
    audit_by_search, audit_revelation_principle, AuditReport, Deviation, Mechanism,
    StrategyProfile, TypeSpace, DEFAULT_PROFILE_CAP,
};
use serde::{Deserialize, Serialize};

use crate::config::{PriorHigh, ScenarioConfig};
use crate::{csv_string, to_json, CliError, Format};

#[derive(Debug, Clone)]
pub struct AnalyzeOptions {
    /// Replaces the prior of a labor scenario.
    pub prior_high: Option<Rational>,
    pub max_profiles: u64,
}

impl Default for AnalyzeOptions {
    fn default() -> Self {
        Self {
            prior_high: None,
            max_profiles: DEFAULT_PROFILE_CAP,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TypeAction {
    #[serde(rename = "type")]
    pub ty: String,
    pub action: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabeledStrategy {
    pub agent: usize,
    pub choices: Vec<TypeAction>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabeledDeviation {
    pub agent: usize,
    #[serde(rename = "type")]
    pub ty: String,
    /// Action label in the indirect mechanism, reported type in the direct one.
    pub action: String,
    #[serde(with = "rational::serde_str")]
    pub gap: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabeledChain {
    pub vacuous: bool,
    pub equilibrium_with_costs: bool,
    pub restricted_with_costs: bool,
    pub restricted_all_actions: bool,
    pub truthful_cost_free: bool,
    pub implication_breaks: bool,
    pub break_point: Option<LabeledDeviation>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LaborSummary {
    pub params: LaborParams,
    pub zero_costs: bool,
    pub window: WageWindow,
    pub in_window: bool,
    pub ir_satisfied: bool,
    #[serde(with = "rational::serde_str")]
    pub ir_margin: Rational,
    /// Ex-ante firm utility when both agents follow the separating profile.
    #[serde(with = "rational::serde_str")]
    pub firm_expected_utility: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScenarioReport {
    pub kind: String,
    pub implemented: bool,
    pub truthful_is_bne: bool,
    pub violation: bool,
    pub indirect_equilibrium: Option<Vec<LabeledStrategy>>,
    pub indirect_witness: Option<LabeledDeviation>,
    pub truthful_witness: Option<LabeledDeviation>,
    pub chain: Option<LabeledChain>,
    pub labor: Option<LaborSummary>,
    pub pure_strategies_only: bool,
    pub notes: Vec<String>,
    /// Index-based audit the labels were derived from.
    pub audit: AuditReport,
}

impl ScenarioReport {
    pub fn exit_code(&self) -> i32 {
        if self.violation {
            crate::EXIT_VIOLATION
        } else {
            crate::EXIT_OK
        }
    }

    pub fn render(&self, format: Format) -> Result<String, CliError> {
        match format {
            Format::Json => to_json(self),
            Format::Csv => csv_string(&[self.summary_row()]),
            Format::Md => Ok(self.markdown()),
        }
    }

    fn summary_row(&self) -> SummaryRow {
        let fmt = |d: &Option<LabeledDeviation>| {
            d.as_ref()
                .map(|d| format!("agent {} {} -> {} (+{})", d.agent, d.ty, d.action, d.gap))
                .unwrap_or_default()
        };
        SummaryRow {
            kind: self.kind.clone(),
            implemented: self.implemented,
            truthful_is_bne: self.truthful_is_bne,
            violation: self.violation,
            indirect_witness: fmt(&self.indirect_witness),
            truthful_witness: fmt(&self.truthful_witness),
        }
    }

    fn markdown(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "# Revelation audit ({})\n", self.kind);
        let _ = writeln!(s, "| check | result |\n|---|---|");
        let _ = writeln!(
            s,
            "| implemented in profit-based BNE | {} |",
            self.implemented
        );
        let _ = writeln!(
            s,
            "| truthful reporting is a BNE | {} |",
            self.truthful_is_bne
        );
        let _ = writeln!(s, "| violation | {} |", self.violation);
        if let Some(eq) = &self.indirect_equilibrium {
            let _ = writeln!(s, "\n## Candidate equilibrium\n");
            for st in eq {
                let choices: Vec<String> = st
                    .choices
                    .iter()
                    .map(|c| format!("{} -> {}", c.ty, c.action))
                    .collect();
                let _ = writeln!(s, "- agent {}: {}", st.agent, choices.join(", "));
            }
        }
        for (title, w) in [
            ("Indirect deviation", &self.indirect_witness),
            ("Profitable misreport", &self.truthful_witness),
        ] {
            if let Some(d) = w {
                let _ = writeln!(
                    s,
                    "\n{title}: agent {} of type {} gains {} by playing {}",
                    d.agent, d.ty, d.gap, d.action
                );
            }
        }
        if let Some(c) = &self.chain {
            let _ = writeln!(s, "\n## Proof chain\n");
            let _ = writeln!(s, "| step | holds |\n|---|---|");
            let _ = writeln!(
                s,
                "| equilibrium with costs | {} |",
                c.equilibrium_with_costs
            );
            let _ = writeln!(
                s,
                "| restricted to mimicking, with costs | {} |",
                c.restricted_with_costs
            );
            let _ = writeln!(
                s,
                "| restricted, all actions | {} |",
                c.restricted_all_actions
            );
            let _ = writeln!(s, "| truthful, cost free | {} |", c.truthful_cost_free);
            if let Some(b) = &c.break_point {
                let _ = writeln!(
                    s,
                    "\nBreak point: agent {} of type {} reporting {} (utility gain {})",
                    b.agent, b.ty, b.action, b.gap
                );
            }
        }
        if !self.notes.is_empty() {
            let _ = writeln!(s, "\n## Notes\n");
            for n in &self.notes {
                let _ = writeln!(s, "- {n}");
            }
        }
        s
    }
}

#[derive(Serialize)]
struct SummaryRow {
    kind: String,
    implemented: bool,
    truthful_is_bne: bool,
    violation: bool,
    indirect_witness: String,
    truthful_witness: String,
}

fn label_strategies(
    profile: &StrategyProfile,
    m: &Mechanism,
    ts: &TypeSpace,
) -> Result<Vec<LabeledStrategy>, CliError> {
    profile
        .strategies()
        .iter()
        .map(|st| {
            let choices = st
                .choice
                .iter()
                .enumerate()
                .map(|(t, &a)| {
                    Ok(TypeAction {
                        ty: ts.type_label(st.agent, t)?.to_string(),
                        action: m.action_label(st.agent, a)?.to_string(),
                    })
                })
                .collect::<Result<_, CliError>>()?;
            Ok(LabeledStrategy {
                agent: st.agent,
                choices,
            })
        })
        .collect()
}

fn label_action(
    d: &Deviation,
    m: &Mechanism,
    ts: &TypeSpace,
) -> Result<LabeledDeviation, CliError> {
    Ok(LabeledDeviation {
        agent: d.agent,
        ty: ts.type_label(d.agent, d.ty)?.to_string(),
        action: m.action_label(d.agent, d.action)?.to_string(),
        gap: d.gap.clone(),
    })
}

fn label_report(d: &Deviation, ts: &TypeSpace) -> Result<LabeledDeviation, CliError> {
    Ok(LabeledDeviation {
        agent: d.agent,
        ty: ts.type_label(d.agent, d.ty)?.to_string(),
        action: ts.type_label(d.agent, d.action)?.to_string(),
        gap: d.gap.clone(),
    })
}

fn label_audit(
    kind: &str,
    audit: AuditReport,
    m: &Mechanism,
    ts: &TypeSpace,
    notes: Vec<String>,
    labor: Option<LaborSummary>,
) -> Result<ScenarioReport, CliError> {
    let chain = match &audit.chain {
        Some(c) => Some(LabeledChain {
            vacuous: c.vacuous,
            equilibrium_with_costs: c.equilibrium_with_costs,
            restricted_with_costs: c.restricted_with_costs,
            restricted_all_actions: c.restricted_all_actions,
            truthful_cost_free: c.truthful_cost_free,
            implication_breaks: c.implication_breaks(),
            break_point: c
                .break_point
                .as_ref()
                .map(|b| label_report(b, ts))
                .transpose()?,
        }),
        None => None,
    };
    Ok(ScenarioReport {
        kind: kind.to_string(),
        implemented: audit.implemented,
        truthful_is_bne: audit.truthful_is_bne,
        violation: audit.violation,
        indirect_equilibrium: audit
            .indirect_equilibrium
            .as_ref()
            .map(|p| label_strategies(p, m, ts))
            .transpose()?,
        indirect_witness: audit
            .indirect_witness
            .as_ref()
            .map(|d| label_action(d, m, ts))
            .transpose()?,
        truthful_witness: audit
            .truthful_witness
            .as_ref()
            .map(|d| label_report(d, ts))
            .transpose()?,
        chain,
        labor,
        pure_strategies_only: audit.pure_strategies_only,
        notes,
        audit,
    })
}

fn separating_firm_utility(s: &LaborScenario) -> Result<Rational, CliError> {
    let mut total = rational::zero();
    for types in s.types.profile_space().iter() {
        let bids = s.separating.actions_at(&types);
        let u0 = firm_expected_utility(s, [bids[0], bids[1]], [types[0], types[1]])?;
        total += s.types.joint_prior(&types)? * u0;
    }
    Ok(total)
}

pub fn analyze_labor(p: &LaborParams, zero_costs: bool) -> Result<ScenarioReport, CliError> {
    p.validate().map_err(|e| CliError::Invalid {
        field: "labor".into(),
        message: e.to_string(),
    })?;
    let mut s = build_labor_scenario(p)?;
    if zero_costs {
        s = s.with_zero_costs()?;
    }
    let audit = s.audit()?;
    let p3 = check_proposition3(p)?;
    let window = wage_window(p);
    let mut notes = vec![
        "candidate equilibrium: high types bid e_H, low types bid 0".to_string(),
        "the firm's expected utility is reported only; it plays no role in the verdicts"
            .to_string(),
    ];
    notes.extend(p3.notes);
    let summary = LaborSummary {
        params: p.clone(),
        zero_costs,
        in_window: window.contains(&p.wage),
        window,
        ir_satisfied: p3.ir_satisfied,
        ir_margin: p3.ir_margin,
        firm_expected_utility: separating_firm_utility(&s)?,
    };
    label_audit("labor", audit, &s.mechanism, &s.types, notes, Some(summary))
}

/// Run the audit a scenario file describes.
pub fn run_scenario(
    config: &ScenarioConfig,
    opts: &AnalyzeOptions,
) -> Result<ScenarioReport, CliError> {
    match config {
        ScenarioConfig::Labor(c) => {
            let mut c = c.clone();
            if let Some(p) = &opts.prior_high {
                c.prior_high = PriorHigh::Shared(p.clone());
            }
            analyze_labor(&c.params(), c.zero_costs)
        }
        ScenarioConfig::Generic(g) => {
            if opts.prior_high.is_some() {
                return Err(CliError::Usage(
                    "--prior-high applies to labor scenarios only; give priors per agent in a generic scenario".into(),
                ));
            }
            let m = g.build()?;
            let (audit, note) = match &m.profile {
                Some(p) => {
                    p.validate(&m.mechanism, &m.types).map_err(|e| CliError::Invalid {
                        field: "profile".into(),
                        message: e.to_string(),
                    })?;
                    (
                        audit_revelation_principle(&m.mechanism, p, &m.scf, &m.types, &m.utility, &m.costs)?,
                        "candidate equilibrium taken from the scenario file",
                    )
                }
                None => (
                    audit_by_search(&m.mechanism, &m.scf, &m.types, &m.utility, &m.costs, opts.max_profiles)?,
                    "candidate equilibrium found by exhaustive search; the first implementing one is audited",
                ),
            };
            label_audit(
                "generic",
                audit,
                &m.mechanism,
                &m.types,
                vec![note.to_string()],
                None,
            )
        }
    }
}
