//! Repeated-seed behaviour of the Monte Carlo estimators.

use gmfbm_core::gmfbm::{exact_cov_oracle, exact_increment_second_moment};
use gmfbm_core::mclab::{estimate_corr, estimate_cov, estimate_increment_sm, exact_corr, fit_decay};
use gmfbm_core::{GmfbmParams, McConfig, MomentEstimate, Result, SubordinatorSpec, TimeChangedSpec};

type Estimator = fn(&TimeChangedSpec, f64, f64, &McConfig) -> Result<MomentEstimate>;
type Oracle = fn(&TimeChangedSpec, f64, f64) -> Result<f64>;

const ESTIMATORS: [(&str, Estimator, Oracle); 3] = [
    ("cov", estimate_cov, exact_cov_oracle),
    ("corr", estimate_corr, exact_corr),
    ("increment", estimate_increment_sm, exact_increment_second_moment),
];

fn specs() -> [TimeChangedSpec; 2] {
    let gm = GmfbmParams::new(1.0, 1.0, 0.55, 0.8).unwrap();
    [
        TimeChangedSpec::new(gm, SubordinatorSpec::tss(0.7, 1.0).unwrap()),
        TimeChangedSpec::new(gm, SubordinatorSpec::gamma(1.0).unwrap()),
    ]
}

#[test]
fn three_stderr_coverage_over_100_seeds() {
    let (s, t) = (1.0, 10.0);
    for spec in specs() {
        for (name, estimate, oracle) in ESTIMATORS {
            let exact = oracle(&spec, s, t).unwrap();
            let hits = (0..100u64)
                .filter(|&seed| {
                    let e = estimate(&spec, s, t, &McConfig::new(4_000, 1_000 + seed)).unwrap();
                    (e.value - exact).abs() < 3.0 * e.stderr
                })
                .count();
            assert!(hits >= 95, "{name} {:?}: {hits}/100 within 3 stderr", spec.subordinator);
        }
    }
}

#[test]
fn stderr_scales_like_inverse_root_n() {
    let spec = specs()[0];
    let sizes = [1_000usize, 2_000, 4_000, 8_000, 16_000];
    for (name, estimate, _) in ESTIMATORS {
        // average log stderr over seeds at each n
        let points: Vec<(f64, f64)> = sizes
            .iter()
            .map(|&n| {
                let mean_log = (0..8u64)
                    .map(|seed| estimate(&spec, 1.0, 10.0, &McConfig::new(n, 500 + seed)).unwrap().stderr.ln())
                    .sum::<f64>()
                    / 8.0;
                (n as f64, mean_log.exp())
            })
            .collect();
        let slope = fit_decay(&points).unwrap().slope;
        assert!((slope + 0.5).abs() <= 0.1, "{name}: stderr slope {slope}");
    }
}

#[test]
fn estimates_are_functions_of_the_seed() {
    let spec = specs()[1];
    for (_, estimate, _) in ESTIMATORS {
        let a = estimate(&spec, 2.0, 20.0, &McConfig::new(1_000, 9)).unwrap();
        let b = estimate(&spec, 2.0, 20.0, &McConfig::new(1_000, 9).with_workers(2)).unwrap();
        let c = estimate(&spec, 2.0, 20.0, &McConfig::new(1_000, 10)).unwrap();
        assert_eq!(a, b);
        assert_ne!(a.value, c.value);
    }
}

#[test]
fn correlation_bounded_and_increment_nonnegative() {
    let spec = specs()[0];
    for seed in 0..10u64 {
        let cfg = McConfig::new(200, seed);
        let r = estimate_corr(&spec, 1.0, 1e3, &cfg).unwrap();
        assert!((-1.0..=1.0).contains(&r.value));
        assert!(estimate_increment_sm(&spec, 1.0, 1.5, &cfg).unwrap().value >= 0.0);
    }
}

#[test]
fn increment_moment_grows_with_lag() {
    let spec = specs()[1];
    let cfg = McConfig::new(20_000, 77);
    let estimates: Vec<MomentEstimate> = [2.0, 5.0, 20.0, 100.0]
        .iter()
        .map(|&t| estimate_increment_sm(&spec, 1.0, t, &cfg).unwrap())
        .collect();
    for w in estimates.windows(2) {
        let gap = w[1].value - w[0].value;
        assert!(gap > -3.0 * w[0].stderr.hypot(w[1].stderr), "{w:?}");
    }
}
