//! Run configuration: an optional INI file of `key = value` lines, overridden
//! by command-line flags, with defaults for anything left unset.

use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use gmfbm_core::{GmfbmParams, SubordinatorSpec, TimeChangedSpec, TimeGrid};
use ini::Ini;
use serde::Serialize;

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SubordinatorKind {
    Tss,
    Gamma,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

/// Flags shared by every data-producing command. All optional so that file
/// values show through when a flag is absent.
#[derive(Debug, Clone, Default, Args)]
pub struct ConfigArgs {
    /// INI-style file of key = value settings (keys match the long flag names)
    #[arg(long, value_name = "FILE")]
    pub config: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub subordinator: Option<SubordinatorKind>,
    /// Tempered stable index, in (0, 1)
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Tempering rate, > 0
    #[arg(long)]
    pub lambda: Option<f64>,
    /// Gamma process variance rate, > 0
    #[arg(long)]
    pub nu: Option<f64>,
    #[arg(long = "a", allow_negative_numbers = true)]
    pub a: Option<f64>,
    #[arg(long = "b", allow_negative_numbers = true)]
    pub b: Option<f64>,
    #[arg(long)]
    pub h1: Option<f64>,
    #[arg(long)]
    pub h2: Option<f64>,
    /// Fixed earlier time s
    #[arg(long)]
    pub s: Option<f64>,
    #[arg(long)]
    pub t_min: Option<f64>,
    #[arg(long)]
    pub t_max: Option<f64>,
    #[arg(long)]
    pub t_count: Option<usize>,
    /// Monte Carlo paths
    #[arg(long)]
    pub paths: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Output file; standard output when omitted
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GridSpec {
    pub min: f64,
    pub max: f64,
    pub count: usize,
}

impl GridSpec {
    pub fn grid(&self) -> Result<TimeGrid, CliError> {
        Ok(TimeGrid::geometric(self.min, self.max, self.count)?)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub spec: TimeChangedSpec,
    pub s: f64,
    pub t_grid: GridSpec,
    pub n_paths: usize,
    pub master_seed: u64,
    pub output_format: Format,
    /// `None` writes to standard output.
    pub output_path: Option<PathBuf>,
}

pub const DEFAULT_SEED: u64 = 20_240_601;

fn parse<T: std::str::FromStr>(key: &str, value: &str) -> Result<T, CliError> {
    value
        .trim()
        .parse()
        .map_err(|_| CliError::Config(format!("invalid value {value:?} for key {key:?}")))
}

fn parse_enum<T: ValueEnum>(key: &str, value: &str) -> Result<T, CliError> {
    T::from_str(value.trim(), true).map_err(|_| CliError::Config(format!("invalid value {value:?} for key {key:?}")))
}

impl ConfigArgs {
    /// Fills fields not given on the command line from `path`.
    pub fn merge_file(&mut self, path: &Path) -> Result<(), CliError> {
        let ini = Ini::load_from_file(path).map_err(|e| match e {
            ini::Error::Io(e) => CliError::Io(format!("{}: {e}", path.display())),
            ini::Error::Parse(e) => CliError::Config(format!("{}: {e}", path.display())),
        })?;
        if let Some(name) = ini.sections().flatten().next() {
            return Err(CliError::Config(format!("unexpected section [{name}]; use plain key = value lines")));
        }
        macro_rules! fill {
            ($field:ident, $key:expr, $value:expr, $how:ident) => {
                if self.$field.is_none() {
                    self.$field = Some($how($key, $value)?);
                }
            };
        }
        for (key, value) in ini.general_section().iter() {
            match key.replace('_', "-").as_str() {
                "subordinator" => fill!(subordinator, key, value, parse_enum),
                "alpha" => fill!(alpha, key, value, parse),
                "lambda" => fill!(lambda, key, value, parse),
                "nu" => fill!(nu, key, value, parse),
                "a" => fill!(a, key, value, parse),
                "b" => fill!(b, key, value, parse),
                "h1" => fill!(h1, key, value, parse),
                "h2" => fill!(h2, key, value, parse),
                "s" => fill!(s, key, value, parse),
                "t-min" => fill!(t_min, key, value, parse),
                "t-max" => fill!(t_max, key, value, parse),
                "t-count" => fill!(t_count, key, value, parse),
                "paths" => fill!(paths, key, value, parse),
                "seed" => fill!(seed, key, value, parse),
                "format" => fill!(format, key, value, parse_enum),
                "out" => fill!(out, key, value, parse),
                other => return Err(CliError::Config(format!("unknown key {other:?}"))),
            }
        }
        Ok(())
    }

    /// Merges the config file if any, applies defaults and validates.
    pub fn resolve(&self) -> Result<RunConfig, CliError> {
        let mut args = self.clone();
        if let Some(path) = &self.config {
            args.merge_file(path)?;
        }
        let subordinator = match args.subordinator.unwrap_or(SubordinatorKind::Tss) {
            SubordinatorKind::Tss => SubordinatorSpec::tss(args.alpha.unwrap_or(0.7), args.lambda.unwrap_or(1.0))?,
            SubordinatorKind::Gamma => SubordinatorSpec::gamma(args.nu.unwrap_or(1.0))?,
        };
        let gmfbm = GmfbmParams::new(
            args.a.unwrap_or(1.0),
            args.b.unwrap_or(1.0),
            args.h1.unwrap_or(0.55),
            args.h2.unwrap_or(0.8),
        )?;
        let s = args.s.unwrap_or(1.0);
        let t_grid = GridSpec {
            min: args.t_min.unwrap_or(1e2),
            max: args.t_max.unwrap_or(1e4),
            count: args.t_count.unwrap_or(12),
        };
        if !(s > 0.0 && s.is_finite()) {
            return Err(CliError::Config(format!("s must be finite and > 0, got {s}")));
        }
        if t_grid.min.is_nan() || t_grid.min <= s {
            return Err(CliError::Config(format!("t-min ({}) must exceed s ({s})", t_grid.min)));
        }
        t_grid.grid()?;
        let n_paths = args.paths.unwrap_or(10_000);
        if n_paths == 0 {
            return Err(CliError::Config("paths must be positive".into()));
        }
        Ok(RunConfig {
            spec: TimeChangedSpec::new(gmfbm, subordinator),
            s,
            t_grid,
            n_paths,
            master_seed: args.seed.unwrap_or(DEFAULT_SEED),
            output_format: args.format.unwrap_or_default(),
            output_path: args.out,
        })
    }
}
