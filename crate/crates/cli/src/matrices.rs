//! The four complete-information report games of the labor market.

use std::fmt::Write as _;

use revelation_core::labor::{check_proposition4, LaborParams, TYPE_LABELS};
use revelation_core::{Dominance, DominantAction};
use serde::{Deserialize, Serialize};

use crate::{csv_string, to_json, CliError, Format};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DominantReport {
    pub report: String,
    pub strict: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CaseTable {
    pub case: u8,
    /// True types of agents 1 and 2.
    pub true_types: [String; 2],
    /// `cells[row report][column report] = [row payoff, column payoff]`.
    pub cells: Vec<Vec<[String; 2]>>,
    pub dominant: [Option<DominantReport>; 2],
    pub pure_nash: Vec<[String; 2]>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MatrixDocument {
    pub params: LaborParams,
    pub cases: Vec<CaseTable>,
}

#[derive(Serialize)]
struct MatrixRow<'a> {
    case: u8,
    true_type_1: &'a str,
    true_type_2: &'a str,
    report_1: &'a str,
    report_2: &'a str,
    payoff_1: &'a str,
    payoff_2: &'a str,
}

fn dominant(d: Option<DominantAction>) -> Option<DominantReport> {
    d.map(|d| DominantReport {
        report: TYPE_LABELS[d.action].to_string(),
        strict: d.kind == Dominance::Strict,
    })
}

pub fn build_matrices(p: &LaborParams) -> Result<MatrixDocument, CliError> {
    p.validate().map_err(|e| CliError::Invalid {
        field: "labor".into(),
        message: e.to_string(),
    })?;
    let r = check_proposition4(p)?;
    let cases = r
        .case_matrices
        .into_iter()
        .map(|m| {
            let cells = (0..2)
                .map(|a| {
                    (0..2)
                        .map(|b| {
                            let v = m.game.payoffs_at(&[a, b])?;
                            Ok([v[0].to_string(), v[1].to_string()])
                        })
                        .collect::<Result<Vec<_>, CliError>>()
                })
                .collect::<Result<Vec<_>, CliError>>()?;
            Ok(CaseTable {
                case: m.case,
                true_types: m.true_types.map(|t| TYPE_LABELS[t].to_string()),
                cells,
                dominant: m.dominant.map(dominant),
                pure_nash: m
                    .pure_nash
                    .iter()
                    .map(|n| [TYPE_LABELS[n[0]].to_string(), TYPE_LABELS[n[1]].to_string()])
                    .collect(),
            })
        })
        .collect::<Result<_, CliError>>()?;
    Ok(MatrixDocument {
        params: p.clone(),
        cases,
    })
}

impl MatrixDocument {
    pub fn render(&self, format: Format) -> Result<String, CliError> {
        match format {
            Format::Md => Ok(self.markdown()),
            Format::Json => to_json(self),
            Format::Csv => {
                let mut rows = Vec::new();
                for c in &self.cases {
                    for (a, row) in c.cells.iter().enumerate() {
                        for (b, cell) in row.iter().enumerate() {
                            rows.push(MatrixRow {
                                case: c.case,
                                true_type_1: &c.true_types[0],
                                true_type_2: &c.true_types[1],
                                report_1: TYPE_LABELS[a],
                                report_2: TYPE_LABELS[b],
                                payoff_1: &cell[0],
                                payoff_2: &cell[1],
                            });
                        }
                    }
                }
                csv_string(&rows)
            }
        }
    }

    pub fn markdown(&self) -> String {
        let p = &self.params;
        let mut s = String::from("# Report games of the direct mechanism\n\n");
        let _ = writeln!(
            s,
            "w = {}, c_mis = {}. Rows are agent 1's report, columns agent 2's; each cell is (agent 1, agent 2).",
            p.wage, p.misreport_cost
        );
        for c in &self.cases {
            let _ = writeln!(
                s,
                "\n## Case {}: theta_1 = {}, theta_2 = {}\n",
                c.case, c.true_types[0], c.true_types[1]
            );
            let _ = writeln!(
                s,
                "| report 1 \\ report 2 | {} | {} |",
                TYPE_LABELS[0], TYPE_LABELS[1]
            );
            let _ = writeln!(s, "|---|---|---|");
            for (a, row) in c.cells.iter().enumerate() {
                let cells: Vec<String> = row.iter().map(|[x, y]| format!("({x}, {y})")).collect();
                let _ = writeln!(s, "| {} | {} |", TYPE_LABELS[a], cells.join(" | "));
            }
            let dom: Vec<String> = c
                .dominant
                .iter()
                .enumerate()
                .map(|(i, d)| match d {
                    Some(d) => format!(
                        "agent {} {} ({})",
                        i + 1,
                        d.report,
                        if d.strict { "strict" } else { "weak" }
                    ),
                    None => format!("agent {} none", i + 1),
                })
                .collect();
            let nash: Vec<String> = c
                .pure_nash
                .iter()
                .map(|[a, b]| format!("({a}, {b})"))
                .collect();
            let _ = writeln!(s, "\nDominant reports: {}.", dom.join(", "));
            let _ = writeln!(s, "Pure Nash equilibria: {}.", nash.join(", "));
        }
        s
    }
}
