//! `(w, c_mis)` parameter sweep over the labor market.

use std::fmt::Write as _;

use rayon::prelude::*;
use revelation_core::is_truthfully_implementable;
use revelation_core::labor::{build_labor_scenario, check_proposition3, wage_window, LaborParams};
use revelation_core::rational::Rational;
use serde::{Deserialize, Serialize};

use crate::config::SweepGrid;
use crate::{csv_string, to_json, CliError, Format};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SweepRow {
    pub w: String,
    pub c_mis: String,
    pub in_window: Option<bool>,
    pub separating_is_bne: Option<bool>,
    pub truthful_is_bne: Option<bool>,
    pub violation: Option<bool>,
    pub error: Option<String>,
}

struct Cell {
    in_window: bool,
    separating_is_bne: bool,
    truthful_is_bne: bool,
    violation: bool,
}

fn evaluate(p: &LaborParams) -> revelation_core::Result<Cell> {
    let p3 = check_proposition3(p)?;
    let s = build_labor_scenario(p)?;
    let truthful = is_truthfully_implementable(&s.scf, &s.types, &s.costs, &s.utility)?.truthful;
    let implemented = p3.separating_is_bne && p3.implements_f;
    Ok(Cell {
        in_window: wage_window(p).contains(&p.wage),
        separating_is_bne: p3.separating_is_bne,
        truthful_is_bne: truthful,
        violation: implemented && !truthful,
    })
}

/// One row per cell, `w` outermost; a failing cell fills the error column.
pub fn run_sweep(grid: &SweepGrid) -> Vec<SweepRow> {
    let cells: Vec<(&Rational, &Rational)> = grid
        .w_values
        .iter()
        .flat_map(|w| grid.cmis_values.iter().map(move |c| (w, c)))
        .collect();
    cells
        .par_iter()
        .map(|&(w, c)| {
            let mut row = SweepRow {
                w: w.to_string(),
                c_mis: c.to_string(),
                in_window: None,
                separating_is_bne: None,
                truthful_is_bne: None,
                violation: None,
                error: None,
            };
            match evaluate(&grid.params_at(w, c)) {
                Ok(cell) => {
                    row.in_window = Some(cell.in_window);
                    row.separating_is_bne = Some(cell.separating_is_bne);
                    row.truthful_is_bne = Some(cell.truthful_is_bne);
                    row.violation = Some(cell.violation);
                }
                Err(e) => row.error = Some(e.to_string()),
            }
            row
        })
        .collect()
}

pub fn render_sweep(rows: &[SweepRow], format: Format) -> Result<String, CliError> {
    match format {
        Format::Csv => csv_string(rows),
        Format::Json => to_json(&rows),
        Format::Md => {
            let opt = |b: Option<bool>| b.map(|b| b.to_string()).unwrap_or_default();
            let mut s = String::from(
                "| w | c_mis | in_window | separating_is_bne | truthful_is_bne | violation | error |\n|---|---|---|---|---|---|---|\n",
            );
            for r in rows {
                let _ = writeln!(
                    s,
                    "| {} | {} | {} | {} | {} | {} | {} |",
                    r.w,
                    r.c_mis,
                    opt(r.in_window),
                    opt(r.separating_is_bne),
                    opt(r.truthful_is_bne),
                    opt(r.violation),
                    r.error.as_deref().unwrap_or("")
                );
            }
            Ok(s)
        }
    }
}
