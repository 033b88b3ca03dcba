//! Verification checks shared by `selftest` (small budget) and the acceptance
//! suite (full budget). Every check compares an implementation against an
//! independent reference and reports the worst discrepancy.

use gmfbm_core::fbm::{fbm_cov, sample_fbm_at, sample_fgn_regular};
use gmfbm_core::gmfbm::{exact_cov_oracle, exact_increment_second_moment, exact_var_oracle, increment_second_moment_stationary};
use gmfbm_core::mclab::{
    corr_curve_oracle, draw_paths, estimate_cov, estimate_increment_sm, exact_corr, fit_decay, lrd_report, mean_estimate,
};
use gmfbm_core::subordinators::{gamma_moment, subordinator_moment, subordinator_moment_asymptotic, tss_moment};
use gmfbm_core::theory::{corr_decay_prediction, cov_asymptotic, is_lrd};
use gmfbm_core::{
    GammaParams, GmfbmParams, HurstIndex, McConfig, MomentEstimate, Result, SubordinatorSpec, TimeChange, TimeChangedSpec,
    TimeGrid, TssParams,
};

/// Monte Carlo sample sizes and seeding for one run of the checks.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Budget {
    pub fbm_paths: usize,
    pub moment_draws: usize,
    pub pair_paths: usize,
    pub curve_paths: usize,
    pub seed: u64,
    pub workers: Option<usize>,
}

impl Budget {
    /// Sample sizes pinned by the acceptance criteria.
    pub fn full(seed: u64) -> Self {
        Self {
            fbm_paths: 50_000,
            moment_draws: 100_000,
            pair_paths: 100_000,
            curve_paths: 100_000,
            seed,
            workers: None,
        }
    }

    pub fn quick(seed: u64) -> Self {
        Self {
            fbm_paths: 10_000,
            moment_draws: 20_000,
            pair_paths: 20_000,
            curve_paths: 5_000,
            seed,
            workers: None,
        }
    }

    pub fn with_workers(self, workers: usize) -> Self {
        Self {
            workers: Some(workers),
            ..self
        }
    }

    fn mc(&self, n_paths: usize, salt: u64) -> McConfig {
        McConfig {
            n_paths,
            master_seed: self.seed.wrapping_add(salt),
            workers: self.workers,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
    /// Every Monte Carlo number the check produced, for reproducibility
    /// comparisons.
    pub estimates: Vec<f64>,
}

/// Largest `|estimate - reference| / stderr` seen so far.
#[derive(Debug, Default)]
struct ZTracker {
    worst: f64,
    count: usize,
    estimates: Vec<f64>,
}

impl ZTracker {
    fn add(&mut self, est: MomentEstimate, reference: f64) {
        let z = (est.value - reference).abs() / est.stderr;
        self.worst = if z.is_nan() { f64::INFINITY } else { self.worst.max(z) };
        self.count += 1;
        self.estimates.extend([est.value, est.stderr]);
    }

    fn within(&self, limit: f64) -> bool {
        self.worst <= limit
    }
}

pub const Z_LIMIT: f64 = 3.0;

fn acceptance_gmfbm() -> GmfbmParams {
    GmfbmParams::new(1.0, 1.0, 0.55, 0.8).expect("valid parameters")
}

fn acceptance_subordinators() -> [(&'static str, SubordinatorSpec); 2] {
    [
        ("tss", SubordinatorSpec::tss(0.7, 1.0).expect("valid parameters")),
        ("gamma", SubordinatorSpec::gamma(1.0).expect("valid parameters")),
    ]
}

const PAIRS: [(f64, f64); 3] = [(1.0, 5.0), (1.0, 10.0), (2.0, 20.0)];

/// Sample second moments of fBm on `1..16` from the Cholesky and circulant
/// samplers against the exact covariance, and against each other.
pub fn fbm_covariance(b: &Budget) -> Result<Check> {
    let grid = TimeGrid::regular(16, 1.0)?;
    let n = grid.len();
    let mut exact = ZTracker::default();
    let mut cross = 0.0f64;
    for (k, h) in [0.3, 0.5, 0.75].into_iter().enumerate() {
        let h = HurstIndex::new(h)?;
        let chol = draw_paths(&b.mc(b.fbm_paths, 2 * k as u64), |rng| sample_fbm_at(&grid, h, rng))?;
        let circ = draw_paths(&b.mc(b.fbm_paths, 2 * k as u64 + 1), |rng| {
            let mut level = 0.0;
            Ok(sample_fgn_regular(n, 1.0, h, rng)?
                .into_iter()
                .map(|x| {
                    level += x;
                    level
                })
                .collect::<Vec<f64>>())
        })?;
        for i in 0..n {
            for j in i..n {
                let reference = fbm_cov(grid.times()[i], grid.times()[j], h)?;
                let a = mean_estimate(&chol.iter().map(|p| p[i] * p[j]).collect::<Vec<_>>());
                let c = mean_estimate(&circ.iter().map(|p| p[i] * p[j]).collect::<Vec<_>>());
                exact.add(a, reference);
                exact.add(c, reference);
                cross = cross.max((a.value - c.value).abs() / a.stderr.hypot(c.stderr));
            }
        }
    }
    Ok(Check {
        name: "fbm covariance",
        passed: exact.within(Z_LIMIT) && cross <= Z_LIMIT,
        detail: format!(
            "{} entries vs exact, max z {:.2}; Cholesky vs circulant max z {cross:.2}",
            exact.count, exact.worst
        ),
        estimates: exact.estimates,
    })
}

/// Gamma and tempered stable moments against closed forms and Monte Carlo.
pub fn subordinator_moments(b: &Budget) -> Result<Check> {
    let mut z = ZTracker::default();
    let mut failures = Vec::new();

    let half = gamma_moment(&GammaParams::new(1.0)?, 1.0, 0.5)?;
    let identity = (half - std::f64::consts::PI.sqrt() / 2.0).abs();
    if identity > 1e-12 {
        failures.push(format!("gamma half-moment identity off by {identity:.2e}"));
    }

    let gamma = SubordinatorSpec::gamma(1.0)?;
    for (k, t) in [1.0, 10.0].into_iter().enumerate() {
        let draws = draw_paths(&b.mc(b.moment_draws, 10 + k as u64), |rng| gamma.sample_increment(t, rng))?;
        for q in [0.6, 1.0, 1.6] {
            z.add(mean_estimate(&draws.iter().map(|x| x.powf(q)).collect::<Vec<_>>()), gamma.moment(t, q)?);
        }
    }

    let tss = TssParams::new(0.7, 1.0)?;
    let mut cumulant_gap = 0.0f64;
    for t in [1.0, 10.0] {
        let [mean, var, _] = tss.cumulants(t);
        cumulant_gap = cumulant_gap
            .max((tss_moment(&tss, t, 1.0)? / mean - 1.0).abs())
            .max((tss_moment(&tss, t, 2.0)? / (var + mean * mean) - 1.0).abs());
    }
    if cumulant_gap > 1e-8 {
        failures.push(format!("tempered stable integer moments off by {cumulant_gap:.2e} relative"));
    }
    let spec = SubordinatorSpec::Tss(tss);
    let draws = draw_paths(&b.mc(b.moment_draws, 12), |rng| spec.sample_increment(10.0, rng))?;
    for q in [0.8, 1.1, 1.6] {
        z.add(mean_estimate(&draws.iter().map(|x| x.powf(q)).collect::<Vec<_>>()), tss_moment(&tss, 10.0, q)?);
    }
    if !z.within(Z_LIMIT) {
        failures.push(format!("Monte Carlo max z {:.2}", z.worst));
    }
    Ok(Check {
        name: "subordinator moments",
        passed: failures.is_empty(),
        detail: if failures.is_empty() {
            format!(
                "half-moment identity error {identity:.1e}; integer moment error {cumulant_gap:.1e}; {} MC comparisons, max z {:.2}",
                z.count, z.worst
            )
        } else {
            failures.join("; ")
        },
        estimates: z.estimates,
    })
}

/// Exact over asymptotic subordinator moments along `t = 10..10⁴`.
pub fn moment_ratios() -> Result<Check> {
    let times = [10.0, 1e2, 1e3, 1e4];
    let cases = [
        (SubordinatorSpec::gamma(1.0)?, vec![0.6, 1.0, 1.6, 2.0], 0.02),
        (SubordinatorSpec::tss(0.7, 1.0)?, vec![1.1, 1.6], 0.05),
    ];
    let mut failures = Vec::new();
    let mut finals = Vec::new();
    for (spec, qs, tol) in &cases {
        for &q in qs {
            let gaps = times
                .iter()
                .map(|&t| Ok((subordinator_moment(spec, t, q)? / subordinator_moment_asymptotic(spec, t, q)? - 1.0).abs()))
                .collect::<Result<Vec<f64>>>()?;
            let last = gaps[3];
            finals.push(last);
            if last > *tol {
                failures.push(format!("{spec:?} q={q}: final ratio off by {last:.4}"));
            }
            if !(gaps[2] <= gaps[1] + 1e-12 && gaps[3] <= gaps[2] + 1e-12) {
                failures.push(format!("{spec:?} q={q}: not monotone, gaps {gaps:?}"));
            }
        }
    }
    let worst = finals.iter().cloned().fold(0.0, f64::max);
    Ok(Check {
        name: "moment ratios",
        passed: failures.is_empty(),
        detail: if failures.is_empty() {
            format!("largest |ratio - 1| at t = 1e4 is {worst:.2e}; monotone in the last three points")
        } else {
            failures.join("; ")
        },
        estimates: Vec::new(),
    })
}

/// Monte Carlo covariance of `(Y_s, Y_t)` against the exact covariance.
pub fn covariance_identity(b: &Budget) -> Result<Check> {
    let mut z = ZTracker::default();
    for (k, (_, sub)) in acceptance_subordinators().into_iter().enumerate() {
        let spec = TimeChangedSpec::new(acceptance_gmfbm(), sub);
        for (j, (s, t)) in PAIRS.into_iter().enumerate() {
            let est = estimate_cov(&spec, s, t, &b.mc(b.pair_paths, 20 + 3 * k as u64 + j as u64))?;
            z.add(est, exact_cov_oracle(&spec, s, t)?);
        }
    }
    Ok(Check {
        name: "covariance identity",
        passed: z.within(Z_LIMIT),
        detail: format!("{} comparisons at n = {}, max z {:.2}", z.count, b.pair_paths, z.worst),
        estimates: z.estimates,
    })
}

/// Ratio of the exact covariance to its closed-form large-`t` approximation.
pub fn covariance_asymptotics() -> Result<Check> {
    let [(_, tss), (_, gamma)] = acceptance_subordinators();
    let spec = TimeChangedSpec::new(acceptance_gmfbm(), tss);
    let ratio = |spec: &TimeChangedSpec, t: f64| -> Result<f64> { Ok(exact_cov_oracle(spec, 1.0, t)? / cov_asymptotic(spec, 1.0, t)?) };
    let (r3, r5) = (ratio(&spec, 1e3)?, ratio(&spec, 1e5)?);
    let tss_ok = (r3 - 1.0).abs() <= 0.10 && (r5 - 1.0).abs() <= 0.03;

    let spec = TimeChangedSpec::new(acceptance_gmfbm(), gamma);
    let ratios = TimeGrid::geometric(1e3, 1e5, 9)?
        .times()
        .iter()
        .map(|&t| ratio(&spec, t))
        .collect::<Result<Vec<f64>>>()?;
    let (lo, hi) = ratios.iter().fold((f64::INFINITY, 0.0f64), |(lo, hi), &r| (lo.min(r), hi.max(r)));
    let spread = hi / lo - 1.0;
    let constant = ratios[ratios.len() - 1];
    Ok(Check {
        name: "covariance asymptotics",
        passed: tss_ok && spread <= 0.03,
        detail: format!(
            "tempered stable ratio {r3:.4} at t=1e3, {r5:.4} at t=1e5; Gamma ratio constant {constant:.4} (spread {spread:.4} over [1e3, 1e5])"
        ),
        estimates: Vec::new(),
    })
}

/// Increment second moment: covariance route vs stationarity route, and MC.
pub fn increment_identity(b: &Budget) -> Result<Check> {
    let mut z = ZTracker::default();
    let mut worst_rel = 0.0f64;
    for (k, (_, sub)) in acceptance_subordinators().into_iter().enumerate() {
        let spec = TimeChangedSpec::new(acceptance_gmfbm(), sub);
        for (j, (s, t)) in PAIRS.into_iter().enumerate() {
            let exact = exact_increment_second_moment(&spec, s, t)?;
            let direct = increment_second_moment_stationary(&spec, s, t)?;
            worst_rel = worst_rel.max((exact / direct - 1.0).abs());
            let est = estimate_increment_sm(&spec, s, t, &b.mc(b.pair_paths, 40 + 3 * k as u64 + j as u64))?;
            z.add(est, exact);
        }
    }
    Ok(Check {
        name: "increment identity",
        passed: worst_rel <= 1e-6 && z.within(Z_LIMIT),
        detail: format!(
            "identity relative error {worst_rel:.1e}; {} MC comparisons at n = {}, max z {:.2}",
            z.count, b.pair_paths, z.worst
        ),
        estimates: z.estimates,
    })
}

/// Fitted log-log slopes of the exact and MC correlation curves against the
/// predicted dominant exponent.
pub fn decay_exponents(b: &Budget) -> Result<Check> {
    let grid = TimeGrid::geometric(1e2, 1e4, 12)?;
    let predicted = corr_decay_prediction(&acceptance_gmfbm()).dominant;
    let mut failures = Vec::new();
    let mut notes = Vec::new();
    let mut estimates = Vec::new();
    for (k, (name, sub)) in acceptance_subordinators().into_iter().enumerate() {
        let spec = TimeChangedSpec::new(acceptance_gmfbm(), sub);
        let report = lrd_report(&spec, 1.0, grid.times(), &b.mc(b.curve_paths, 60 + k as u64))?;
        let oracle = report.oracle_fit.slope;
        if (oracle - predicted).abs() > 0.05 {
            failures.push(format!("{name}: oracle slope {oracle:.4} vs {predicted}"));
        }
        estimates.extend(report.mc_curve.iter().flat_map(|p| [p.value, p.stderr]));
        match report.mc_fit {
            Some(fit) => {
                let limit = 0.15f64.max(3.0 * fit.slope_stderr);
                estimates.extend([fit.slope, fit.slope_stderr]);
                if (fit.slope - oracle).abs() > limit {
                    failures.push(format!("{name}: MC slope {:.4} vs oracle {oracle:.4} (limit {limit:.3})", fit.slope));
                }
                notes.push(format!("{name}: oracle {oracle:.4}, MC {:.4} ± {:.4}", fit.slope, fit.slope_stderr));
            }
            None => failures.push(format!("{name}: MC correlation curve has nonpositive values")),
        }
    }
    let hs: Vec<f64> = (1..20).map(|k| k as f64 * 0.05).collect();
    for &h1 in &hs {
        for &h2 in hs.iter().filter(|&&h2| h2 >= h1) {
            if !is_lrd(&GmfbmParams::new(1.0, 1.0, h1, h2)?) {
                failures.push(format!("is_lrd false at ({h1}, {h2})"));
            }
        }
    }
    Ok(Check {
        name: "decay exponents",
        passed: failures.is_empty(),
        detail: if failures.is_empty() {
            format!("predicted {predicted}; {}", notes.join("; "))
        } else {
            failures.join("; ")
        },
        estimates,
    })
}

/// Reductions of the exact oracle to single fBm, equal indices and Brownian
/// motion with a Gamma clock.
pub fn degeneracies() -> Result<Check> {
    let mut failures = Vec::new();
    for (name, sub) in acceptance_subordinators() {
        // single time-changed fBm, written out directly
        let single = |c: f64, h: f64, s: f64, t: f64| -> Result<f64> {
            let q = 2.0 * h;
            let m = |tau: f64| if tau == 0.0 { Ok(0.0) } else { subordinator_moment(&sub, tau, q) };
            Ok(c * c / 2.0 * (m(t)? + m(s)? - m((t - s).abs())?))
        };
        let only_a = TimeChangedSpec::new(GmfbmParams::new(1.3, 0.0, 0.55, 0.8)?, sub);
        let equal = TimeChangedSpec::new(GmfbmParams::new(1.0, 2.0, 0.6, 0.6)?, sub);
        for (s, t) in [(1.0, 3.0), (2.0, 50.0), (0.5, 1e3)] {
            if exact_cov_oracle(&only_a, s, t)? != single(1.3, 0.55, s, t)? {
                failures.push(format!("{name}: b = 0 covariance differs at ({s}, {t})"));
            }
            if exact_var_oracle(&only_a, t)? != 1.3 * 1.3 * subordinator_moment(&sub, t, 1.1)? {
                failures.push(format!("{name}: b = 0 variance differs at t = {t}"));
            }
            if exact_cov_oracle(&equal, s, t)? != 5.0 * single(1.0, 0.6, s, t)? {
                failures.push(format!("{name}: equal-index factor differs at ({s}, {t})"));
            }
        }
    }
    let brownian = TimeChangedSpec::new(GmfbmParams::new(1.0, 1.0, 0.5, 0.5)?, SubordinatorSpec::gamma(1.0)?);
    let mut worst = 0.0f64;
    for (s, t) in [(1.0, 2.0), (1.0, 100.0), (3.0, 7.0), (0.2, 1e4)] {
        worst = worst.max((exact_corr(&brownian, s, t)? - (s / t).sqrt()).abs());
    }
    let curve = corr_curve_oracle(&brownian, 1.0, &[2.0, 10.0, 100.0])?;
    worst = curve.iter().fold(worst, |w, p| w.max((p.value - p.t.recip().sqrt()).abs()));
    if worst > 1e-10 {
        failures.push(format!("Brownian correlation off by {worst:.2e}"));
    }
    Ok(Check {
        name: "degeneracies",
        passed: failures.is_empty(),
        detail: if failures.is_empty() {
            format!("single-fBm and equal-index reductions exact; Brownian correlation error {worst:.1e}")
        } else {
            failures.join("; ")
        },
        estimates: Vec::new(),
    })
}

/// The slope of an exact power law is recovered.
pub fn synthetic_fit() -> Result<Check> {
    let pts: Vec<(f64, f64)> = TimeGrid::geometric(1e2, 1e4, 12)?
        .times()
        .iter()
        .map(|&t| (t, 3.0 * t.powf(-0.2)))
        .collect();
    let fit = fit_decay(&pts)?;
    let err = (fit.slope + 0.2).abs();
    Ok(Check {
        name: "synthetic power law",
        passed: err < 1e-12 && fit.r_squared > 1.0 - 1e-12,
        detail: format!("slope error {err:.1e}, r² {:.15}", fit.r_squared),
        estimates: Vec::new(),
    })
}

/// Bit-identical estimates with one and several worker threads.
pub fn worker_independence(b: &Budget) -> Result<Check> {
    let small = Budget {
        pair_paths: b.pair_paths.min(5_000),
        ..*b
    };
    let one = covariance_identity(&small.with_workers(1))?;
    let many = covariance_identity(&small.with_workers(3))?;
    let same = one.estimates.iter().zip(&many.estimates).all(|(x, y)| x.to_bits() == y.to_bits());
    Ok(Check {
        name: "worker independence",
        passed: same && one.estimates.len() == many.estimates.len(),
        detail: format!("{} estimates compared bitwise between 1 and 3 workers", one.estimates.len()),
        estimates: Vec::new(),
    })
}

pub type CheckFn = fn(&Budget) -> Result<Check>;

/// Checks run by `selftest`, in order.
pub fn registry() -> Vec<(&'static str, CheckFn)> {
    vec![
        ("fbm covariance", fbm_covariance),
        ("subordinator moments", subordinator_moments),
        ("moment ratios", |_| moment_ratios()),
        ("covariance identity", covariance_identity),
        ("covariance asymptotics", |_| covariance_asymptotics()),
        ("increment identity", increment_identity),
        ("decay exponents", decay_exponents),
        ("degeneracies", |_| degeneracies()),
        ("synthetic power law", |_| synthetic_fit()),
        ("worker independence", worker_independence),
    ]
}
