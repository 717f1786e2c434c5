use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use revelation_cli::config::ScenarioConfig;
use revelation_cli::matrices::build_matrices;
use revelation_cli::reproduce::{reproduce, ReproduceSetup};
use revelation_cli::sweep::{render_sweep, run_sweep};
use revelation_cli::{
    load_config, load_sweep, run_scenario, AnalyzeOptions, CliError, Format, EXIT_INPUT, EXIT_OK,
    EXIT_VIOLATION,
};
use revelation_core::rational::{parse_rational, Rational};
use revelation_core::DEFAULT_PROFILE_CAP;

/// Exact audits of the revelation principle for mechanisms with costly
/// strategies.
#[derive(Parser)]
#[command(name = "revcheck", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Probability of the high type for both agents of a labor scenario.
    #[arg(long, global = true, value_parser = parse_prior)]
    prior_high: Option<Rational>,

    /// Output format; each command has its own default.
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,

    /// Upper bound on strategy profiles enumerated by exhaustive search.
    #[arg(long, global = true, default_value_t = DEFAULT_PROFILE_CAP)]
    max_profiles: u64,
}

#[derive(Subcommand)]
enum Command {
    /// Audit one scenario file. Exit 2 when a violation is found.
    Analyze { config: PathBuf },
    /// Evaluate a (w, c_mis) grid and print one row per cell.
    Sweep { config: PathBuf },
    /// Print the four complete-information report games of a labor scenario.
    Matrices { config: PathBuf },
    /// Run every reproduction criterion at canonical parameters.
    ReproducePaper,
}

fn parse_prior(s: &str) -> Result<Rational, String> {
    parse_rational(s).map_err(|e| e.to_string())
}

fn run(cli: Cli) -> Result<(String, i32), CliError> {
    match cli.command {
        Command::Analyze { config } => {
            let cfg = load_config(&config)?;
            let opts = AnalyzeOptions {
                prior_high: cli.prior_high,
                max_profiles: cli.max_profiles,
            };
            let report = run_scenario(&cfg, &opts)?;
            Ok((
                report.render(cli.format.unwrap_or(Format::Json))?,
                report.exit_code(),
            ))
        }
        Command::Sweep { config } => {
            let mut grid = load_sweep(&config)?;
            if let Some(p) = cli.prior_high {
                grid.fixed.prior_high = revelation_cli::config::PriorHigh::Shared(p);
            }
            let rows = run_sweep(&grid);
            Ok((
                render_sweep(&rows, cli.format.unwrap_or(Format::Csv))?,
                EXIT_OK,
            ))
        }
        Command::Matrices { config } => {
            let ScenarioConfig::Labor(labor) = load_config(&config)? else {
                return Err(CliError::Usage("matrices needs a labor scenario".into()));
            };
            let mut params = labor.params();
            if let Some(p) = cli.prior_high {
                params = params.with_prior_high(p);
            }
            let doc = build_matrices(&params)?;
            Ok((doc.render(cli.format.unwrap_or(Format::Md))?, EXIT_OK))
        }
        Command::ReproducePaper => {
            if cli.format.is_some_and(|f| f != Format::Json) {
                return Err(CliError::Usage("reproduce-paper writes JSON only".into()));
            }
            let report = reproduce(&ReproduceSetup::default());
            for f in report.failures() {
                eprintln!("criterion {} failed: {}: {}", f.id, f.name, f.detail);
            }
            let code = if report.all_pass {
                EXIT_OK
            } else {
                EXIT_VIOLATION
            };
            Ok((report.render()?, code))
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(EXIT_INPUT as u8)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli) {
        Ok((out, code)) => {
            print!("{out}");
            ExitCode::from(code as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_INPUT as u8)
        }
    }
}
