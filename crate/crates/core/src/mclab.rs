//! Monte Carlo estimators of two-time statistics, the exact correlation curve
//! and power-law decay fits.
//!
//! Path `i` always draws from `derive_stream(master_seed, i)`. Draws are
//! collected in index order and reduced sequentially, so estimates are
//! bit-identical for any number of worker threads.

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{check_domain, Error, Result};
use crate::gmfbm::{exact_cov_oracle, exact_var_oracle, sample_timechanged_at, sample_timechanged_pair, TimeChangedSpec};
use crate::randkit::{derive_stream, RngStream};
use crate::theory::{corr_decay_prediction, DecayPrediction};

/// Stream id reserved for bootstrap resampling; path indices never reach it.
pub const BOOTSTRAP_STREAM: u64 = u64::MAX;
pub const BOOTSTRAP_RESAMPLES: usize = 200;
pub const MIN_PATHS: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct McConfig {
    pub n_paths: usize,
    pub master_seed: u64,
    /// Worker threads; `None` uses the global rayon pool. Never affects results.
    pub workers: Option<usize>,
}

impl McConfig {
    pub fn new(n_paths: usize, master_seed: u64) -> Self {
        Self {
            n_paths,
            master_seed,
            workers: None,
        }
    }

    pub fn with_workers(self, workers: usize) -> Self {
        Self {
            workers: Some(workers),
            ..self
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MomentEstimate {
    pub value: f64,
    pub stderr: f64,
    pub n_paths: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DecayFit {
    pub slope: f64,
    pub intercept: f64,
    pub slope_stderr: f64,
    pub r_squared: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CurvePoint {
    pub t: f64,
    pub value: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct McPoint {
    pub t: f64,
    pub value: f64,
    pub stderr: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LrdReport {
    pub s: f64,
    pub predicted: DecayPrediction,
    pub lrd: bool,
    pub oracle_curve: Vec<CurvePoint>,
    pub oracle_fit: DecayFit,
    pub mc_curve: Vec<McPoint>,
    /// `None` when some MC correlation is not positive, so no log fit exists.
    pub mc_fit: Option<DecayFit>,
}

/// Neumaier-compensated sum in iteration order.
fn sum<I: IntoIterator<Item = f64>>(xs: I) -> f64 {
    let (mut s, mut c) = (0.0f64, 0.0f64);
    for x in xs {
        let t = s + x;
        c += if s.abs() >= x.abs() { (s - t) + x } else { (x - t) + s };
        s = t;
    }
    s + c
}

fn mean(xs: &[f64]) -> f64 {
    sum(xs.iter().copied()) / xs.len() as f64
}

/// Mean and standard error of the mean.
fn mean_and_stderr(xs: &[f64]) -> (f64, f64) {
    let m = mean(xs);
    let n = xs.len() as f64;
    let var = sum(xs.iter().map(|x| (x - m) * (x - m))) / (n - 1.0);
    (m, (var / n).sqrt())
}

/// Runs `f` on each path's own stream and returns results in path order.
pub fn draw_paths<T, F>(cfg: &McConfig, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(&mut RngStream) -> Result<T> + Sync + Send,
{
    let job = || {
        (0..cfg.n_paths as u64)
            .into_par_iter()
            .map(|i| f(&mut derive_stream(cfg.master_seed, i)))
            .collect::<Result<Vec<T>>>()
    };
    match cfg.workers {
        None => job(),
        Some(w) => rayon::ThreadPoolBuilder::new()
            .num_threads(w.max(1))
            .build()
            .map_err(|e| Error::InvalidGrid(format!("thread pool: {e}")))?
            .install(job),
    }
}

/// Sample mean with its standard error.
pub fn mean_estimate(xs: &[f64]) -> MomentEstimate {
    let (value, stderr) = mean_and_stderr(xs);
    MomentEstimate {
        value,
        stderr,
        n_paths: xs.len(),
    }
}

fn check_config(cfg: &McConfig) -> Result<()> {
    check_domain(cfg.n_paths >= MIN_PATHS, "n_paths", cfg.n_paths as f64, ">= 100")
}

/// Independent draws of `(Y_s, Y_t)`; for `s == t` both coordinates coincide.
pub fn sample_pairs(spec: &TimeChangedSpec, s: f64, t: f64, cfg: &McConfig) -> Result<Vec<(f64, f64)>> {
    check_config(cfg)?;
    if s > t {
        return Err(Error::ArgumentOrder(format!("need s <= t, got s = {s}, t = {t}")));
    }
    draw_paths(cfg, |rng| {
        if s == t {
            sample_timechanged_at(spec, t, rng).map(|y| (y, y))
        } else {
            sample_timechanged_pair(spec, s, t, rng)
        }
    })
}

fn check_strict(s: f64, t: f64) -> Result<()> {
    check_domain(s > 0.0 && s.is_finite(), "s", s, "finite and > 0")?;
    if s >= t {
        return Err(Error::ArgumentOrder(format!("need s < t, got s = {s}, t = {t}")));
    }
    Ok(())
}

/// Sample covariance, with stderr from the spread of per-path products of
/// deviations.
pub fn estimate_cov(spec: &TimeChangedSpec, s: f64, t: f64, cfg: &McConfig) -> Result<MomentEstimate> {
    check_strict(s, t)?;
    let pairs = sample_pairs(spec, s, t, cfg)?;
    Ok(cov_from_pairs(&pairs))
}

fn cov_from_pairs(pairs: &[(f64, f64)]) -> MomentEstimate {
    let n = pairs.len();
    let mx = sum(pairs.iter().map(|p| p.0)) / n as f64;
    let my = sum(pairs.iter().map(|p| p.1)) / n as f64;
    let d: Vec<f64> = pairs.iter().map(|&(x, y)| (x - mx) * (y - my)).collect();
    let (m, stderr) = mean_and_stderr(&d);
    MomentEstimate {
        value: m * n as f64 / (n as f64 - 1.0),
        stderr,
        n_paths: n,
    }
}

fn pearson<I: Iterator<Item = (f64, f64)> + Clone>(pairs: I) -> f64 {
    let n = pairs.clone().count() as f64;
    let mx = sum(pairs.clone().map(|p| p.0)) / n;
    let my = sum(pairs.clone().map(|p| p.1)) / n;
    let sxy = sum(pairs.clone().map(|(x, y)| (x - mx) * (y - my)));
    let sxx = sum(pairs.clone().map(|(x, _)| (x - mx) * (x - mx)));
    let syy = sum(pairs.map(|(_, y)| (y - my) * (y - my)));
    (sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0)
}

/// Pearson correlation with a bootstrap standard error.
pub fn estimate_corr(spec: &TimeChangedSpec, s: f64, t: f64, cfg: &McConfig) -> Result<MomentEstimate> {
    check_domain(s > 0.0 && s.is_finite(), "s", s, "finite and > 0")?;
    check_config(cfg)?;
    if s == t {
        return Ok(MomentEstimate {
            value: 1.0,
            stderr: 0.0,
            n_paths: cfg.n_paths,
        });
    }
    let pairs = sample_pairs(spec, s, t, cfg)?;
    Ok(corr_from_pairs(&pairs, cfg.master_seed))
}

fn corr_from_pairs(pairs: &[(f64, f64)], master_seed: u64) -> MomentEstimate {
    let value = pearson(pairs.iter().copied());
    let n = pairs.len();
    let mut rng = derive_stream(master_seed, BOOTSTRAP_STREAM);
    let mut idx = vec![0usize; n];
    let reps: Vec<f64> = (0..BOOTSTRAP_RESAMPLES)
        .map(|_| {
            idx.iter_mut().for_each(|k| *k = rng.gen_range(0..n));
            pearson(idx.iter().map(|&k| pairs[k]))
        })
        .collect();
    let m = mean(&reps);
    let var = sum(reps.iter().map(|r| (r - m) * (r - m))) / (reps.len() as f64 - 1.0);
    MomentEstimate {
        value,
        stderr: var.sqrt(),
        n_paths: n,
    }
}

/// Sample mean of `(Y_t - Y_s)²`.
pub fn estimate_increment_sm(spec: &TimeChangedSpec, s: f64, t: f64, cfg: &McConfig) -> Result<MomentEstimate> {
    check_strict(s, t)?;
    let sq: Vec<f64> = sample_pairs(spec, s, t, cfg)?
        .iter()
        .map(|(x, y)| (y - x) * (y - x))
        .collect();
    Ok(mean_estimate(&sq))
}

pub fn exact_corr(spec: &TimeChangedSpec, s: f64, t: f64) -> Result<f64> {
    let cov = exact_cov_oracle(spec, s, t)?;
    Ok(cov / (exact_var_oracle(spec, s)? * exact_var_oracle(spec, t)?).sqrt())
}

/// Noise-free correlation curve `t ↦ Corr(Y_s, Y_t)`.
pub fn corr_curve_oracle(spec: &TimeChangedSpec, s: f64, t_grid: &[f64]) -> Result<Vec<CurvePoint>> {
    t_grid
        .iter()
        .map(|&t| {
            check_strict(s, t)?;
            Ok(CurvePoint {
                t,
                value: exact_corr(spec, s, t)?,
            })
        })
        .collect()
}

/// OLS of `ln value` on `ln t`.
pub fn fit_decay(points: &[(f64, f64)]) -> Result<DecayFit> {
    if points.len() < 5 {
        return Err(Error::Fit(format!("need at least 5 points, got {}", points.len())));
    }
    for &(t, v) in points {
        check_domain(t > 0.0 && t.is_finite(), "t", t, "finite and > 0")?;
        check_domain(v > 0.0 && v.is_finite(), "value", v, "finite and > 0")?;
    }
    let x: Vec<f64> = points.iter().map(|p| p.0.ln()).collect();
    let y: Vec<f64> = points.iter().map(|p| p.1.ln()).collect();
    let (mx, my) = (mean(&x), mean(&y));
    let sxx = sum(x.iter().map(|v| (v - mx) * (v - mx)));
    if sxx <= 0.0 {
        return Err(Error::Fit("all t values coincide".into()));
    }
    let sxy = sum(x.iter().zip(&y).map(|(a, b)| (a - mx) * (b - my)));
    let syy = sum(y.iter().map(|v| (v - my) * (v - my)));
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ssr = sum(x.iter().zip(&y).map(|(a, b)| {
        let r = b - intercept - slope * a;
        r * r
    }));
    let n = points.len() as f64;
    let r_squared = if syy > 0.0 { (1.0 - ssr / syy).clamp(0.0, 1.0) } else { 1.0 };
    Ok(DecayFit {
        slope,
        intercept,
        slope_stderr: (ssr / (n - 2.0) / sxx).sqrt(),
        r_squared,
    })
}

/// Predicted exponents, exact and MC correlation curves, and fits of both.
/// Every MC point reuses `master_seed`, so the curve shares random numbers
/// across `t`.
pub fn lrd_report(spec: &TimeChangedSpec, s: f64, t_grid: &[f64], cfg: &McConfig) -> Result<LrdReport> {
    let predicted = corr_decay_prediction(&spec.gmfbm);
    let oracle_curve = corr_curve_oracle(spec, s, t_grid)?;
    let oracle_fit = fit_decay(&oracle_curve.iter().map(|p| (p.t, p.value)).collect::<Vec<_>>())?;
    let mc_curve = t_grid
        .iter()
        .map(|&t| {
            estimate_corr(spec, s, t, cfg).map(|e| McPoint {
                t,
                value: e.value,
                stderr: e.stderr,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let mc_points: Vec<(f64, f64)> = mc_curve.iter().map(|p| (p.t, p.value)).collect();
    let mc_fit = if mc_points.iter().all(|p| p.1 > 0.0) {
        Some(fit_decay(&mc_points)?)
    } else {
        None
    };
    Ok(LrdReport {
        s,
        predicted,
        lrd: predicted.lrd,
        oracle_curve,
        oracle_fit,
        mc_curve,
        mc_fit,
    })
}
