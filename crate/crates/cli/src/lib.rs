//! Command-line front end: simulation, covariance and moment tables,
//! long-range dependence checks and a self-test.
//!
//! Exit codes: 0 success, 1 usage or configuration error, 2 I/O error,
//! 3 statistical verification failure.

use std::time::Instant;

use clap::{Parser, Subcommand};

pub mod commands;
pub mod config;
pub mod error;
pub mod output;
pub mod verify;

pub use config::{ConfigArgs, Format, RunConfig};
pub use error::CliError;

/// Seed used by `selftest`.
pub const SELFTEST_SEED: u64 = 7;

#[derive(Debug, Parser)]
#[command(name = "gmfbm", version, about = "Time-changed generalized mixed fBm: simulation and verification")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Sample paths: one row per (path, grid time) with clock and process values
    Simulate(ConfigArgs),
    /// Exact, asymptotic and Monte Carlo covariance of (Y_s, Y_t) over the grid
    CovTable(ConfigArgs),
    /// Correlation decay fits against the predicted exponent; exit 3 on mismatch
    Lrd {
        #[command(flatten)]
        args: ConfigArgs,
        #[arg(long, hide = true, allow_negative_numbers = true)]
        force_prediction: Option<f64>,
    },
    /// Exact and asymptotic subordinator moments over the grid
    Moments {
        #[command(flatten)]
        args: ConfigArgs,
        /// Moment orders, comma separated
        #[arg(long, value_delimiter = ',', default_values_t = vec![1.1, 1.6])]
        q: Vec<f64>,
    },
    /// Fast verification suite; one PASS/FAIL line per check
    Selftest,
}

fn emit_table(args: &ConfigArgs, build: impl FnOnce(&RunConfig) -> Result<output::Table, CliError>) -> Result<(), CliError> {
    let cfg = args.resolve()?;
    let table = build(&cfg)?;
    output::emit(&table, &cfg)
}

pub fn cmd_simulate(args: &ConfigArgs) -> Result<(), CliError> {
    emit_table(args, commands::simulate)
}

pub fn cmd_cov_table(args: &ConfigArgs) -> Result<(), CliError> {
    emit_table(args, commands::cov_table)
}

pub fn cmd_moments(args: &ConfigArgs, q: &[f64]) -> Result<(), CliError> {
    emit_table(args, |cfg| commands::moments(cfg, q))
}

pub fn cmd_lrd(args: &ConfigArgs, forced_prediction: Option<f64>) -> Result<(), CliError> {
    let cfg = args.resolve()?;
    let outcome = commands::lrd(&cfg, forced_prediction)?;
    output::emit(&outcome.table, &cfg)?;
    eprintln!("{}", outcome.message);
    if outcome.passed {
        Ok(())
    } else {
        Err(CliError::Statistical(format!(
            "oracle slope differs from the prediction by more than {}",
            commands::SLOPE_TOLERANCE
        )))
    }
}

pub fn cmd_selftest() -> Result<(), CliError> {
    let budget = verify::Budget::quick(SELFTEST_SEED);
    let start = Instant::now();
    let mut failed = 0;
    let mut config_error = None;
    for (name, check) in verify::registry() {
        match check(&budget) {
            Ok(c) => {
                println!("{} {}: {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail);
                failed += usize::from(!c.passed);
            }
            Err(e) => {
                println!("FAIL {name}: {e}");
                config_error.get_or_insert(e);
            }
        }
    }
    println!("selftest finished in {:.1} s", start.elapsed().as_secs_f64());
    match (config_error, failed) {
        (Some(e), _) => Err(e.into()),
        (None, 0) => Ok(()),
        (None, n) => Err(CliError::Statistical(format!("{n} check(s) failed"))),
    }
}

/// Runs a parsed command and returns the process exit code.
pub fn run(cli: Cli) -> i32 {
    let result = match &cli.command {
        Command::Simulate(args) => cmd_simulate(args),
        Command::CovTable(args) => cmd_cov_table(args),
        Command::Lrd { args, force_prediction } => cmd_lrd(args, *force_prediction),
        Command::Moments { args, q } => cmd_moments(args, q),
        Command::Selftest => cmd_selftest(),
    };
    match result {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("gmfbm: {e}");
            e.exit_code()
        }
    }
}
