//! Every headline check at canonical parameters, with a pass/fail line per
//! criterion.

use revelation_core::audit_proof_chain;
use revelation_core::labor::{
    all_report_high, build_labor_scenario, check_proposition3, check_proposition4, wage_window,
    LaborParams, WageWindow, HIGH, LOW,
};
use revelation_core::rational::{q, Rational};
use serde::{Deserialize, Serialize};

use crate::regression::{run_regression, DEFAULT_COUNT, DEFAULT_SEED};
use crate::{to_json, CliError};

/// Inputs of the reproduction run. `window` is swappable so a broken bound
/// can be injected.
#[derive(Debug, Clone)]
pub struct ReproduceSetup {
    pub params: LaborParams,
    pub window: fn(&LaborParams) -> WageWindow,
    pub interior_wages: Vec<Rational>,
    pub wage: Rational,
    pub low_misreport_costs: Vec<Rational>,
    pub high_misreport_costs: Vec<Rational>,
    pub matrix_misreport_cost: Rational,
    pub alternative_priors: Vec<Rational>,
    pub regression_seed: u64,
    pub regression_count: usize,
}

impl Default for ReproduceSetup {
    fn default() -> Self {
        Self {
            params: LaborParams::canonical(),
            window: wage_window,
            interior_wages: vec![q(11, 10), q(3, 2), q(19, 10)],
            wage: q(3, 2),
            low_misreport_costs: vec![q(0, 1), q(1, 4), q(1, 2), q(7, 10)],
            high_misreport_costs: vec![q(3, 4) + q(1, 100), q(1, 1)],
            matrix_misreport_cost: q(1, 2),
            alternative_priors: vec![q(1, 10), q(9, 10)],
            regression_seed: DEFAULT_SEED,
            regression_count: DEFAULT_COUNT,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CriterionResult {
    pub id: u8,
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReproduceReport {
    pub criteria: Vec<CriterionResult>,
    pub all_pass: bool,
}

impl ReproduceReport {
    pub fn failures(&self) -> Vec<&CriterionResult> {
        self.criteria.iter().filter(|c| !c.pass).collect()
    }

    pub fn render(&self) -> Result<String, CliError> {
        to_json(self)
    }
}

type Check = Result<(bool, String), CliError>;

fn separating_checks(setup: &ReproduceSetup, base: &LaborParams) -> Check {
    let mut ok = true;
    let mut parts = Vec::new();
    for w in &setup.interior_wages {
        let p = base.clone().with_wage(w.clone());
        let window = (setup.window)(&p);
        let r = check_proposition3(&p)?;
        let inside = window.contains(w);
        let here = inside && r.separating_is_bne && r.implements_f && r.ir_satisfied;
        ok &= here;
        parts.push(format!(
            "w={w}: window=({}, {}) inside={inside} bne={} implements={} ir={}",
            window.lower, window.upper, r.separating_is_bne, r.implements_f, r.ir_satisfied
        ));
    }
    Ok((ok, parts.join("; ")))
}

fn pooling_checks(base: &LaborParams, wage: &Rational, costs: &[Rational]) -> Check {
    let mut ok = true;
    let mut parts = Vec::new();
    for c in costs {
        let p = base
            .clone()
            .with_wage(wage.clone())
            .with_misreport_cost(c.clone());
        let r = check_proposition4(&p)?;
        let s = build_labor_scenario(&p)?;
        let direct = s.direct_mechanism()?;
        let searched = direct.game(&s.types, &s.utility)?.profile_count();
        let here =
            !r.truthful_is_bne && r.bne_profiles == vec![all_report_high()] && searched == Some(16);
        ok &= here;
        parts.push(format!(
            "c_mis={c}: truthful_bne={} equilibria={} searched={}",
            r.truthful_is_bne,
            r.bne_profiles.len(),
            searched.map_or("overflow".into(), |n| n.to_string())
        ));
    }
    Ok((ok, parts.join("; ")))
}

fn truthful_checks(base: &LaborParams, wage: &Rational, costs: &[Rational]) -> Check {
    let mut ok = true;
    let mut parts = Vec::new();
    for c in costs {
        let p = base
            .clone()
            .with_wage(wage.clone())
            .with_misreport_cost(c.clone());
        let r = check_proposition4(&p)?;
        ok &= r.truthful_is_bne;
        parts.push(format!("c_mis={c}: truthful_bne={}", r.truthful_is_bne));
    }
    Ok((ok, parts.join("; ")))
}

/// Report payoff read off the symbolic case tables: the higher report
/// takes `w`, equal reports split it, and a low type claiming high pays
/// `c_mis`.
fn symbolic_payoff(w: &Rational, c: &Rational, truth: usize, own: usize, other: usize) -> Rational {
    let share = if own > other {
        w.clone()
    } else if own == other {
        w / q(2, 1)
    } else {
        q(0, 1)
    };
    if truth == LOW && own == HIGH {
        share - c
    } else {
        share
    }
}

fn matrix_checks(setup: &ReproduceSetup) -> Check {
    let p = setup
        .params
        .clone()
        .with_wage(setup.wage.clone())
        .with_misreport_cost(setup.matrix_misreport_cost.clone());
    let r = check_proposition4(&p)?;
    let (w, c) = (&p.wage, &p.misreport_cost);
    let mut mismatches = Vec::new();
    for m in &r.case_matrices {
        let [ti, tj] = m.true_types;
        for a in 0..2 {
            for b in 0..2 {
                let got = m.game.payoffs_at(&[a, b])?;
                let want = [
                    symbolic_payoff(w, c, ti, a, b),
                    symbolic_payoff(w, c, tj, b, a),
                ];
                if got != want {
                    mismatches.push(format!("case {} cell ({a},{b})", m.case));
                }
            }
        }
    }
    let detail = if mismatches.is_empty() {
        format!("16 cells match at w={w}, c_mis={c}")
    } else {
        format!("mismatched: {}", mismatches.join(", "))
    };
    Ok((mismatches.is_empty(), detail))
}

fn chain_checks(setup: &ReproduceSetup) -> Check {
    let p = setup
        .params
        .clone()
        .with_wage(setup.wage.clone())
        .with_misreport_cost(q(0, 1));
    let s = build_labor_scenario(&p)?;
    let chain = audit_proof_chain(
        &s.mechanism,
        &s.separating,
        &s.scf,
        &s.types,
        &s.utility,
        &s.costs,
    )?;
    let bp = chain.break_point.as_ref();
    let witness_ok = bp.is_some_and(|b| b.ty == LOW && b.action == HIGH);
    let ok = chain.equilibrium_with_costs
        && chain.restricted_with_costs
        && !chain.truthful_cost_free
        && witness_ok;
    Ok((
        ok,
        format!(
            "equilibrium_with_costs={} restricted_with_costs={} truthful_cost_free={} break_point={}",
            chain.equilibrium_with_costs,
            chain.restricted_with_costs,
            chain.truthful_cost_free,
            bp.map_or("none".into(), |b| format!(
                "agent {} type {} report {} gain {}",
                b.agent, b.ty, b.action, b.gap
            ))
        ),
    ))
}

fn regression_check(setup: &ReproduceSetup) -> Check {
    let s = run_regression(setup.regression_seed, setup.regression_count)?;
    Ok((
        s.mechanisms >= 200 && s.violations == 0,
        format!(
            "seed={} mechanisms={} equilibria={} implemented={} violations={}",
            s.seed, s.mechanisms, s.equilibria, s.implemented_scfs, s.violations
        ),
    ))
}

fn verdicts(setup: &ReproduceSetup, base: &LaborParams) -> Result<[bool; 4], CliError> {
    Ok([
        separating_checks(setup, base)?.0,
        pooling_checks(base, &setup.wage, &setup.low_misreport_costs)?.0,
        pooling_checks(base, &setup.wage, &[q(0, 1)])?.0,
        truthful_checks(base, &setup.wage, &setup.high_misreport_costs)?.0,
    ])
}

fn prior_checks(setup: &ReproduceSetup) -> Check {
    let reference = verdicts(setup, &setup.params)?;
    let mut ok = reference.iter().all(|&b| b);
    let mut parts = vec![format!("reference {reference:?}")];
    for prior in &setup.alternative_priors {
        let v = verdicts(setup, &setup.params.clone().with_prior_high(prior.clone()))?;
        ok &= v == reference;
        parts.push(format!("prior_high={prior}: {v:?}"));
    }
    Ok((ok, parts.join("; ")))
}

fn record(id: u8, name: &str, check: Check) -> CriterionResult {
    let (pass, detail) = match check {
        Ok(r) => r,
        Err(e) => (false, format!("error: {e}")),
    };
    CriterionResult {
        id,
        name: name.to_string(),
        pass,
        detail,
    }
}

fn substantive(setup: &ReproduceSetup) -> Vec<CriterionResult> {
    let base = &setup.params;
    vec![
        record(
            1,
            "separating equilibrium inside the wage window",
            separating_checks(setup, base),
        ),
        record(
            2,
            "truthful reporting fails and all-report-high is the unique equilibrium",
            pooling_checks(base, &setup.wage, &setup.low_misreport_costs),
        ),
        record(
            3,
            "violation persists at zero misreport cost",
            pooling_checks(base, &setup.wage, &[q(0, 1)]),
        ),
        record(
            4,
            "truthful reporting restored above half the wage",
            truthful_checks(base, &setup.wage, &setup.high_misreport_costs),
        ),
        record(
            5,
            "report matrices match the symbolic tables",
            matrix_checks(setup),
        ),
        record(
            6,
            "proof chain breaks at the truthful step",
            chain_checks(setup),
        ),
        record(
            7,
            "zero-cost regression finds no violation",
            regression_check(setup),
        ),
        record(8, "verdicts independent of the prior", prior_checks(setup)),
    ]
}

pub fn reproduce(setup: &ReproduceSetup) -> ReproduceReport {
    let first = substantive(setup);
    let second = substantive(setup);
    let same = match (to_json(&first), to_json(&second)) {
        (Ok(a), Ok(b)) => a == b,
        _ => false,
    };
    let mut criteria = first;
    criteria.push(CriterionResult {
        id: 9,
        name: "repeated evaluation is byte-identical".into(),
        pass: same,
        detail: if same {
            "two evaluations serialize identically".into()
        } else {
            "outputs differ".into()
        },
    });
    ReproduceReport {
        all_pass: criteria.iter().all(|c| c.pass),
        criteria,
    }
}
