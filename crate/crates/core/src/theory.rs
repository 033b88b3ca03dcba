//! Closed-form large-`t` approximations and the predicted correlation decay.
//!
//! The covariance and increment formulas are evaluated exactly as stated, so
//! they can be compared against the exact oracles in [`crate::gmfbm`]. Only
//! the tempered stable covariance agrees with its oracle at leading order.
//! The Gamma covariance carries an extra factor 2. The increment formulas
//! put a factor `H` (Gamma: `2H`) on the leading `t^{2H}` term that the exact
//! moment lacks, and the tempered stable one has no factor `s` in its middle
//! term. All are kept unchanged; the comparison tests quantify the mismatch.

use serde::Serialize;

use crate::error::{check_domain, Error, Result};
use crate::gmfbm::{GmfbmParams, TimeChangedSpec};
use crate::subordinators::{GammaParams, SubordinatorSpec, TssParams};

fn check_times(s: f64, t: f64) -> Result<()> {
    check_domain(s > 0.0 && s.is_finite(), "s", s, "finite and > 0")?;
    check_domain(t.is_finite(), "t", t, "finite")?;
    if s >= t {
        return Err(Error::ArgumentOrder(format!("need s < t, got s = {s}, t = {t}")));
    }
    Ok(())
}

fn tss_k(tss: &TssParams, h: f64) -> f64 {
    tss.mean_rate().powf(2.0 * h)
}

fn blocks(p: &GmfbmParams) -> [(f64, f64); 2] {
    [(p.a(), p.h1().value()), (p.b(), p.h2().value())]
}

/// `a² H1 s K1 t^{2H1-1} + b² H2 s K2 t^{2H2-1}` with `K = (αλ^{α-1})^{2H}`.
pub fn cov_asymptotic_tss(p: &GmfbmParams, tss: &TssParams, s: f64, t: f64) -> Result<f64> {
    check_times(s, t)?;
    Ok(blocks(p)
        .iter()
        .map(|&(c, h)| c * c * h * s * tss_k(tss, h) * t.powf(2.0 * h - 1.0))
        .sum())
}

/// `2a² H1 s ν^{-2H1} t^{2H1-1} + 2b² H2 s ν^{-2H2} t^{2H2-1}`.
pub fn cov_asymptotic_gamma(p: &GmfbmParams, gamma: &GammaParams, s: f64, t: f64) -> Result<f64> {
    check_times(s, t)?;
    let nu = gamma.nu();
    Ok(blocks(p)
        .iter()
        .map(|&(c, h)| 2.0 * c * c * h * s / nu.powf(2.0 * h) * t.powf(2.0 * h - 1.0))
        .sum())
}

/// Per block: `c² H K (t^{2H} - 2 t^{2H-1} + s^{2H})`.
pub fn increment_sm_asymptotic_tss(p: &GmfbmParams, tss: &TssParams, s: f64, t: f64) -> Result<f64> {
    check_times(s, t)?;
    Ok(blocks(p)
        .iter()
        .map(|&(c, h)| {
            let w = c * c * h * tss_k(tss, h);
            w * t.powf(2.0 * h) - 2.0 * w * t.powf(2.0 * h - 1.0) + w * s.powf(2.0 * h)
        })
        .sum())
}

/// Per block: `2c²H ν^{-2H} t^{2H} - 4c²H s ν^{-2H} t^{2H-1} + 2c²H ν^{-2H} s^{2H}`.
pub fn increment_sm_asymptotic_gamma(p: &GmfbmParams, gamma: &GammaParams, s: f64, t: f64) -> Result<f64> {
    check_times(s, t)?;
    let nu = gamma.nu();
    Ok(blocks(p)
        .iter()
        .map(|&(c, h)| {
            let w = c * c * h / nu.powf(2.0 * h);
            2.0 * w * t.powf(2.0 * h) - 4.0 * w * s * t.powf(2.0 * h - 1.0) + 2.0 * w * s.powf(2.0 * h)
        })
        .sum())
}

pub fn cov_asymptotic(spec: &TimeChangedSpec, s: f64, t: f64) -> Result<f64> {
    match &spec.subordinator {
        SubordinatorSpec::Tss(tss) => cov_asymptotic_tss(&spec.gmfbm, tss, s, t),
        SubordinatorSpec::Gamma(g) => cov_asymptotic_gamma(&spec.gmfbm, g, s, t),
    }
}

pub fn increment_sm_asymptotic(spec: &TimeChangedSpec, s: f64, t: f64) -> Result<f64> {
    match &spec.subordinator {
        SubordinatorSpec::Tss(tss) => increment_sm_asymptotic_tss(&spec.gmfbm, tss, s, t),
        SubordinatorSpec::Gamma(g) => increment_sm_asymptotic_gamma(&spec.gmfbm, g, s, t),
    }
}

/// Power-law terms of `Corr(Y_s, Y_t)` as `t → ∞`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DecayPrediction {
    /// `(2H1 - H2 - 1, H2 - 1)`.
    pub exponents: (f64, f64),
    /// The larger exponent, which governs the tail.
    pub dominant: f64,
    /// Whether `2H1 - H2 < 1`, the stated long-range dependence condition.
    pub lrd: bool,
}

pub fn corr_decay_prediction(p: &GmfbmParams) -> DecayPrediction {
    let (h1, h2) = (p.h1().value(), p.h2().value());
    let exponents = (2.0 * h1 - h2 - 1.0, h2 - 1.0);
    DecayPrediction {
        exponents,
        dominant: exponents.0.max(exponents.1),
        lrd: is_lrd(p),
    }
}

/// `2H1 - H2 < 1`. Holds for every valid parameter set since `H1 <= H2 < 1`.
pub fn is_lrd(p: &GmfbmParams) -> bool {
    2.0 * p.h1().value() - p.h2().value() < 1.0
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gmfbm::{exact_cov_oracle, exact_increment_second_moment};

    fn p(a: f64, b: f64, h1: f64, h2: f64) -> GmfbmParams {
        GmfbmParams::new(a, b, h1, h2).unwrap()
    }

    #[test]
    fn prediction_examples() {
        let d = corr_decay_prediction(&p(1.0, 1.0, 0.55, 0.8));
        assert!((d.exponents.0 + 0.7).abs() < 1e-12 && (d.exponents.1 + 0.2).abs() < 1e-12);
        assert!((d.dominant + 0.2).abs() < 1e-12);
        assert!(d.lrd);
        let d = corr_decay_prediction(&p(1.0, 1.0, 0.6, 0.6));
        assert!((d.dominant + 0.4).abs() < 1e-12);
        // canonical ordering makes the swap invisible
        assert_eq!(corr_decay_prediction(&p(2.0, 1.0, 0.8, 0.55)), corr_decay_prediction(&p(1.0, 2.0, 0.55, 0.8)));
    }

    #[test]
    fn formulas_by_hand() {
        let tss = TssParams::new(0.5, 1.0).unwrap();
        // Brownian blocks: K = μ = 0.5
        let v = cov_asymptotic_tss(&p(1.0, 1.0, 0.5, 0.5), &tss, 2.0, 10.0).unwrap();
        assert!((v - 2.0 * 0.5 * 2.0 * 0.5).abs() < 1e-12);
        let g = GammaParams::new(2.0).unwrap();
        let v = cov_asymptotic_gamma(&p(1.0, 0.0, 0.5, 0.7), &g, 3.0, 10.0).unwrap();
        assert!((v - 2.0 * 0.5 * 3.0 / 2.0).abs() < 1e-12);
        let v = increment_sm_asymptotic_gamma(&p(1.0, 0.0, 0.5, 0.7), &g, 3.0, 10.0).unwrap();
        assert!((v - 0.5 * (10.0 - 6.0 + 3.0)).abs() < 1e-12);
        let v = increment_sm_asymptotic_tss(&p(1.0, 0.0, 0.5, 0.7), &tss, 3.0, 10.0).unwrap();
        assert!((v - 0.25 * (10.0 - 2.0 + 3.0)).abs() < 1e-12);
        assert!(cov_asymptotic_tss(&p(1.0, 1.0, 0.5, 0.5), &tss, 2.0, 2.0).is_err());
    }

    #[test]
    fn tss_covariance_matches_oracle_at_large_t() {
        let spec = TimeChangedSpec::new(p(1.0, 1.0, 0.55, 0.8), SubordinatorSpec::tss(0.7, 1.0).unwrap());
        let mut prev = f64::INFINITY;
        for t in [1e3, 1e4, 1e5] {
            let r = exact_cov_oracle(&spec, 1.0, t).unwrap() / cov_asymptotic(&spec, 1.0, t).unwrap();
            let gap = (r - 1.0).abs();
            assert!(gap < prev, "t = {t}: ratio {r}");
            prev = gap;
        }
        assert!(prev < 0.03);
    }

    #[test]
    fn gamma_covariance_is_twice_the_oracle() {
        let spec = TimeChangedSpec::new(p(1.0, 1.0, 0.55, 0.8), SubordinatorSpec::gamma(1.0).unwrap());
        let r = exact_cov_oracle(&spec, 1.0, 1e6).unwrap() / cov_asymptotic(&spec, 1.0, 1e6).unwrap();
        assert!((r - 0.5).abs() < 0.01, "{r}");
    }

    #[test]
    fn gamma_increment_leading_term() {
        let spec = TimeChangedSpec::new(p(1.0, 1.0, 0.55, 0.8), SubordinatorSpec::gamma(1.0).unwrap());
        let t = 1e7;
        let r = exact_increment_second_moment(&spec, 1.0, t).unwrap() / increment_sm_asymptotic(&spec, 1.0, t).unwrap();
        assert!((r * 1.6 - 1.0).abs() < 0.05, "{r}");
    }

    #[test]
    fn increment_leading_term() {
        // Only the t^{2H2} term survives at large t. The oracle grows like
        // μ^{2H} t^{2H} while the formula carries an extra factor H.
        let spec = TimeChangedSpec::new(p(1.0, 1.0, 0.55, 0.8), SubordinatorSpec::tss(0.7, 1.0).unwrap());
        let t = 1e6;
        let r = exact_increment_second_moment(&spec, 1.0, t).unwrap() / increment_sm_asymptotic(&spec, 1.0, t).unwrap();
        assert!((r * 0.8 - 1.0).abs() < 0.05, "{r}");
    }
}
