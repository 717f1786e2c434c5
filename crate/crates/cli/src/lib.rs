//! Batch front end for the mechanism auditor: scenario files in,
//! deterministic reports out.

pub mod config;
pub mod matrices;
pub mod regression;
pub mod report;
pub mod reproduce;
pub mod sweep;

use thiserror::Error;

pub use config::{load_config, load_sweep, parse_config, ScenarioConfig, SweepGrid};
pub use report::{run_scenario, AnalyzeOptions, ScenarioReport};

/// Exit status when no violation was found.
pub const EXIT_OK: i32 = 0;
/// Input, validation or model error.
pub const EXIT_INPUT: i32 = 1;
/// A revelation-principle violation, or a failed reproduction criterion.
pub const EXIT_VIOLATION: i32 = 2;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("malformed input: {0}")]
    Parse(serde_json::Error),
    #[error("invalid field `{field}`: {message}")]
    Invalid { field: String, message: String },
    #[error(transparent)]
    Model(#[from] revelation_core::Error),
    #[error("{0}")]
    Usage(String),
    #[error("output error: {0}")]
    Output(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Md,
}

pub(crate) fn to_json<T: serde::Serialize>(value: &T) -> Result<String, CliError> {
    let mut s = serde_json::to_string_pretty(value).map_err(|e| CliError::Output(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

pub(crate) fn csv_string<T: serde::Serialize>(rows: &[T]) -> Result<String, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for row in rows {
        w.serialize(row)
            .map_err(|e| CliError::Output(e.to_string()))?;
    }
    let bytes = w
        .into_inner()
        .map_err(|e| CliError::Output(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| CliError::Output(e.to_string()))
}
