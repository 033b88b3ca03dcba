use gmfbm_core::gmfbm::{
    exact_cov_oracle, exact_increment_second_moment, exact_var_oracle, gmfbm_cov, sample_gmfbm_at,
};
use gmfbm_core::mclab::{draw_paths, estimate_cov, mean_estimate};
use gmfbm_core::theory::{cov_asymptotic, corr_decay_prediction, increment_sm_asymptotic, is_lrd};
use gmfbm_core::{GmfbmParams, McConfig, SubordinatorSpec, TimeChangedSpec, TimeGrid};
use proptest::prelude::*;

fn subordinator() -> impl Strategy<Value = SubordinatorSpec> {
    prop_oneof![
        (0.1f64..0.9, 0.2f64..3.0).prop_map(|(a, l)| SubordinatorSpec::tss(a, l).unwrap()),
        (0.2f64..3.0).prop_map(|nu| SubordinatorSpec::gamma(nu).unwrap()),
    ]
}

fn coefficient() -> impl Strategy<Value = f64> {
    prop_oneof![-3.0f64..-0.1, 0.1f64..3.0]
}

fn times() -> impl Strategy<Value = (f64, f64)> {
    (0.1f64..20.0, 0.05f64..30.0).prop_map(|(s, gap)| (s, s + gap))
}

fn close(a: f64, b: f64, rel: f64) -> bool {
    (a - b).abs() <= rel * a.abs().max(b.abs())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn swap_leaves_oracles_unchanged(
        a in coefficient(), b in coefficient(), h1 in 0.05f64..0.95, h2 in 0.05f64..0.95,
        sub in subordinator(), (s, t) in times(),
    ) {
        let x = TimeChangedSpec::new(GmfbmParams::new(a, b, h1, h2).unwrap(), sub);
        let y = TimeChangedSpec::new(GmfbmParams::new(b, a, h2, h1).unwrap(), sub);
        prop_assert_eq!(exact_cov_oracle(&x, s, t).unwrap(), exact_cov_oracle(&y, s, t).unwrap());
        prop_assert_eq!(exact_var_oracle(&x, t).unwrap(), exact_var_oracle(&y, t).unwrap());
        prop_assert_eq!(
            exact_increment_second_moment(&x, s, t).unwrap(),
            exact_increment_second_moment(&y, s, t).unwrap()
        );
        prop_assert_eq!(is_lrd(&x.gmfbm), is_lrd(&y.gmfbm));
    }

    #[test]
    fn equal_indices_scale_by_coefficient_energy(
        a in coefficient(), b in coefficient(), h in 0.05f64..0.95, sub in subordinator(), (s, t) in times(),
    ) {
        let both = TimeChangedSpec::new(GmfbmParams::new(a, b, h, h).unwrap(), sub);
        let unit = TimeChangedSpec::new(GmfbmParams::new(1.0, 0.0, h, h).unwrap(), sub);
        let k = a * a + b * b;
        prop_assert!(close(exact_cov_oracle(&both, s, t).unwrap(), k * exact_cov_oracle(&unit, s, t).unwrap(), 1e-14));
        prop_assert!(close(exact_var_oracle(&both, t).unwrap(), k * exact_var_oracle(&unit, t).unwrap(), 1e-14));
        prop_assert!(close(gmfbm_cov(s, t, &both.gmfbm).unwrap(), k * gmfbm_cov(s, t, &unit.gmfbm).unwrap(), 1e-14));
    }

    #[test]
    fn increment_moment_depends_only_on_lag(
        h1 in 0.05f64..0.95, h2 in 0.05f64..0.95, sub in subordinator(),
        s in 0.5f64..10.0, shift in 0.1f64..10.0, gap in 0.5f64..10.0,
    ) {
        let spec = TimeChangedSpec::new(GmfbmParams::new(1.0, 0.7, h1, h2).unwrap(), sub);
        let x = exact_increment_second_moment(&spec, s, s + gap).unwrap();
        let y = exact_increment_second_moment(&spec, s + shift, s + shift + gap).unwrap();
        // both are differences of larger numbers, so allow their rounding
        let scale = exact_var_oracle(&spec, s + shift + gap).unwrap();
        prop_assert!((x - y).abs() <= 1e-12 * scale, "{} vs {}", x, y);
        prop_assert!(x > 0.0);
    }

    #[test]
    fn covariance_is_a_valid_kernel(
        h1 in 0.05f64..0.95, h2 in 0.05f64..0.95, sub in subordinator(), (s, t) in times(),
    ) {
        let spec = TimeChangedSpec::new(GmfbmParams::new(1.0, 1.0, h1, h2).unwrap(), sub);
        let c = exact_cov_oracle(&spec, s, t).unwrap();
        prop_assert_eq!(c, exact_cov_oracle(&spec, t, s).unwrap());
        let bound = (exact_var_oracle(&spec, s).unwrap() * exact_var_oracle(&spec, t).unwrap()).sqrt();
        prop_assert!(c.abs() <= bound * (1.0 + 1e-12));
    }

    #[test]
    fn asymptotics_positive_and_linear_in_s(
        a in coefficient(), b in coefficient(), h1 in 0.05f64..0.95, h2 in 0.05f64..0.95,
        sub in subordinator(), s in 0.1f64..5.0, c in 0.1f64..3.0,
    ) {
        let spec = TimeChangedSpec::new(GmfbmParams::new(a, b, h1, h2).unwrap(), sub);
        let t = 100.0;
        let base = cov_asymptotic(&spec, s, t).unwrap();
        prop_assert!(base > 0.0);
        prop_assert!(close(cov_asymptotic(&spec, c * s, t).unwrap(), c * base, 1e-13));
        prop_assert!(increment_sm_asymptotic(&spec, s, t).unwrap().is_finite());
    }

    #[test]
    fn lrd_holds_for_every_valid_pair(h1 in 0.001f64..0.999, h2 in 0.001f64..0.999) {
        let p = GmfbmParams::new(1.0, 1.0, h1, h2).unwrap();
        prop_assert!(is_lrd(&p));
        let d = corr_decay_prediction(&p);
        prop_assert_eq!(d.dominant, d.exponents.0.max(d.exponents.1));
    }
}

#[test]
fn single_component_sampler_has_fbm_variance() {
    // b = 0: sampled gmfBm variance is a² t^{2H}
    let p = GmfbmParams::new(1.5, 0.0, 0.7, 0.9).unwrap();
    let grid = TimeGrid::new(vec![0.5, 2.0, 3.0]).unwrap();
    let paths = draw_paths(&McConfig::new(50_000, 5), |rng| sample_gmfbm_at(&grid, &p, rng)).unwrap();
    for (k, &t) in grid.times().iter().enumerate() {
        let est = mean_estimate(&paths.iter().map(|v| v[k] * v[k]).collect::<Vec<_>>());
        let exact = 2.25 * t.powf(1.4);
        assert!((est.value - exact).abs() < 3.0 * est.stderr, "t = {t}: {est:?} vs {exact}");
    }
}

#[test]
fn covariance_matches_monte_carlo_on_second_parameter_set() {
    let gm = GmfbmParams::new(0.5, 2.0, 0.3, 0.7).unwrap();
    let subs = [SubordinatorSpec::tss(0.4, 2.0).unwrap(), SubordinatorSpec::gamma(0.5).unwrap()];
    for (k, sub) in subs.into_iter().enumerate() {
        let spec = TimeChangedSpec::new(gm, sub);
        for (s, t) in [(0.5, 2.0), (3.0, 4.0)] {
            let est = estimate_cov(&spec, s, t, &McConfig::new(100_000, 30 + k as u64)).unwrap();
            let exact = exact_cov_oracle(&spec, s, t).unwrap();
            assert!((est.value - exact).abs() < 3.0 * est.stderr, "{sub:?} ({s},{t}): {est:?} vs {exact}");
        }
    }
}
