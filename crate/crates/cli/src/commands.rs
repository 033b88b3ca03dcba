use gmfbm_core::gmfbm::{exact_cov_oracle, sample_timechanged_path};
use gmfbm_core::mclab::{draw_paths, estimate_cov, lrd_report};
use gmfbm_core::theory::cov_asymptotic;
use gmfbm_core::{McConfig, SubordinatorSpec};
use serde_json::json;

use crate::config::RunConfig;
use crate::error::CliError;
use crate::output::{Cell, Table};

/// Largest allowed gap between the fitted oracle slope and the predicted
/// dominant exponent.
pub const SLOPE_TOLERANCE: f64 = 0.05;

fn mc(cfg: &RunConfig) -> McConfig {
    McConfig::new(cfg.n_paths, cfg.master_seed)
}

fn subordinator_name(spec: &SubordinatorSpec) -> &'static str {
    match spec {
        SubordinatorSpec::Tss(_) => "tss",
        SubordinatorSpec::Gamma(_) => "gamma",
    }
}

/// One row per (path, grid time): clock value and process value.
pub fn simulate(cfg: &RunConfig) -> Result<Table, CliError> {
    let grid = cfg.t_grid.grid()?;
    let paths = draw_paths(&mc(cfg), |rng| sample_timechanged_path(&cfg.spec, &grid, rng))?;
    let mut table = Table::new(vec!["path", "t", "subordinator", "y"]);
    for (i, path) in paths.iter().enumerate() {
        for ((&t, &clock), &y) in path.grid.times().iter().zip(&path.clock).zip(&path.values) {
            table.push(vec![Cell::Int(i as u64), t.into(), clock.into(), y.into()]);
        }
    }
    table.summary = json!({ "paths": paths.len(), "points_per_path": grid.len() });
    Ok(table)
}

/// Exact covariance, its large-`t` approximation, their ratio and an MC
/// estimate at each grid time.
pub fn cov_table(cfg: &RunConfig) -> Result<Table, CliError> {
    let grid = cfg.t_grid.grid()?;
    let mut table = Table::new(vec!["t", "oracle_cov", "asymptotic_cov", "ratio", "mc_cov", "mc_stderr"]);
    let mut last_ratio = f64::NAN;
    for &t in grid.times() {
        let oracle = exact_cov_oracle(&cfg.spec, cfg.s, t)?;
        let asym = cov_asymptotic(&cfg.spec, cfg.s, t)?;
        let est = estimate_cov(&cfg.spec, cfg.s, t, &mc(cfg))?;
        last_ratio = oracle / asym;
        table.push(vec![t.into(), oracle.into(), asym.into(), last_ratio.into(), est.value.into(), est.stderr.into()]);
    }
    table.summary = json!({
        "subordinator": subordinator_name(&cfg.spec.subordinator),
        "s": cfg.s,
        "final_ratio": last_ratio,
    });
    Ok(table)
}

#[derive(Debug, Clone, PartialEq)]
pub struct LrdOutcome {
    pub table: Table,
    pub passed: bool,
    pub message: String,
}

/// Correlation curves and fitted slopes. `forced_prediction` replaces the
/// predicted dominant exponent, which exercises the failure path.
pub fn lrd(cfg: &RunConfig, forced_prediction: Option<f64>) -> Result<LrdOutcome, CliError> {
    if cfg.t_grid.count < 5 {
        return Err(CliError::Config(format!("lrd needs t-count >= 5, got {}", cfg.t_grid.count)));
    }
    let grid = cfg.t_grid.grid()?;
    let report = lrd_report(&cfg.spec, cfg.s, grid.times(), &mc(cfg))?;
    let dominant = forced_prediction.unwrap_or(report.predicted.dominant);
    let gap = (report.oracle_fit.slope - dominant).abs();
    let passed = gap <= SLOPE_TOLERANCE;

    let mut table = Table::new(vec!["t", "oracle_corr", "mc_corr", "mc_stderr"]);
    for (o, m) in report.oracle_curve.iter().zip(&report.mc_curve) {
        table.push(vec![o.t.into(), o.value.into(), m.value.into(), m.stderr.into()]);
    }
    table.summary = json!({
        "subordinator": subordinator_name(&cfg.spec.subordinator),
        "s": cfg.s,
        "predicted_exponents": [report.predicted.exponents.0, report.predicted.exponents.1],
        "predicted_dominant": dominant,
        "oracle_fit": report.oracle_fit,
        "mc_fit": report.mc_fit,
        "lrd": report.lrd,
        "passed": passed,
    });
    let mc_slope = report
        .mc_fit
        .map(|f| format!("{:.4} ± {:.4}", f.slope, f.slope_stderr))
        .unwrap_or_else(|| "n/a (nonpositive MC correlation)".into());
    let message = format!(
        "predicted dominant exponent {dominant:.4}; oracle slope {:.4}; MC slope {mc_slope}; long-range dependent: {}; {}",
        report.oracle_fit.slope,
        report.lrd,
        if passed { "PASS" } else { "FAIL" },
    );
    Ok(LrdOutcome { table, passed, message })
}

/// Exact and asymptotic subordinator moments on the grid for each `q`.
pub fn moments(cfg: &RunConfig, qs: &[f64]) -> Result<Table, CliError> {
    if qs.is_empty() {
        return Err(CliError::Config("at least one q is required".into()));
    }
    let grid = cfg.t_grid.grid()?;
    let sub = &cfg.spec.subordinator;
    let mut table = Table::new(vec!["t", "q", "exact_moment", "asymptotic_moment", "ratio"]);
    for &t in grid.times() {
        for &q in qs {
            let exact = sub.moment(t, q)?;
            let asym = sub.moment_asymptotic(t, q)?;
            table.push(vec![t.into(), q.into(), exact.into(), asym.into(), (exact / asym).into()]);
        }
    }
    table.summary = json!({ "subordinator": subordinator_name(sub), "q": qs });
    Ok(table)
}
