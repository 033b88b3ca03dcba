//! Generalized mixed fBm `N_t = a B^{H1}_t + b B^{H2}_t` and its time change
//! `Y_t = N_{β_t}` by an independent subordinator `β`.
//!
//! The exact oracles follow from conditioning on the clock. The two fBms are
//! independent and centered, so the cross term vanishes, and each fBm
//! contributes `E[B_u B_v] = ½(u^{2H} + v^{2H} - |v-u|^{2H})` evaluated at
//! `(u, v) = (β_s, β_t)`. Stationary increments of `β` turn
//! `E|β_t - β_s|^{2H}` into `E[β_{t-s}^{2H}]`, which leaves
//!
//! ```text
//! Cov(Y_s, Y_t) = a²/2 [m(t,2H1) + m(s,2H1) - m(|t-s|,2H1)]
//!               + b²/2 [m(t,2H2) + m(s,2H2) - m(|t-s|,2H2)]
//! ```
//!
//! with `m(τ, q) = E[β_τ^q]` from [`crate::subordinators`].

use rand::{Rng, RngCore};
use serde::{Deserialize, Serialize};

use crate::error::{check_domain, Error, Result};
use crate::fbm::{fbm_cov_unchecked, fbm_pair_unchecked, sample_fbm_at_times, HurstIndex, TimeGrid};
use crate::randkit::{sample_std_normal, RngStream};
use crate::subordinators::{SubordinatorSpec, TimeChange};

/// Mixing coefficients and Hurst indices, canonically ordered so `h1 <= h2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GmfbmParams {
    a: f64,
    b: f64,
    h1: HurstIndex,
    h2: HurstIndex,
}

impl GmfbmParams {
    /// Swaps `(a, h1)` with `(b, h2)` when `h1 > h2`; the process law is
    /// unchanged by the swap.
    pub fn new(a: f64, b: f64, h1: f64, h2: f64) -> Result<Self> {
        check_domain(a.is_finite(), "a", a, "finite")?;
        check_domain(b.is_finite(), "b", b, "finite")?;
        if a == 0.0 && b == 0.0 {
            return Err(Error::Domain {
                name: "a, b",
                value: 0.0,
                expected: "a and b not both zero",
            });
        }
        let (h1, h2) = (HurstIndex::new(h1)?, HurstIndex::new(h2)?);
        Ok(if h1 <= h2 {
            Self { a, b, h1, h2 }
        } else {
            Self { a: b, b: a, h1: h2, h2: h1 }
        })
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn h1(&self) -> HurstIndex {
        self.h1
    }

    pub fn h2(&self) -> HurstIndex {
        self.h2
    }

    fn components(&self) -> [(f64, f64); 2] {
        [(self.a, self.h1.value()), (self.b, self.h2.value())]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TimeChangedSpec {
    pub gmfbm: GmfbmParams,
    pub subordinator: SubordinatorSpec,
}

impl TimeChangedSpec {
    pub fn new(gmfbm: GmfbmParams, subordinator: SubordinatorSpec) -> Self {
        Self { gmfbm, subordinator }
    }
}

/// A sampled path of the time-changed process together with its clock.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProcessPath {
    pub grid: TimeGrid,
    /// Subordinator values `β_t` on the grid.
    pub clock: Vec<f64>,
    /// `Y_t = N_{β_t}` on the grid.
    pub values: Vec<f64>,
}

pub fn gmfbm_cov(s: f64, t: f64, p: &GmfbmParams) -> Result<f64> {
    check_domain(s >= 0.0 && s.is_finite(), "s", s, "finite and >= 0")?;
    check_domain(t >= 0.0 && t.is_finite(), "t", t, "finite and >= 0")?;
    Ok(p.components()
        .iter()
        .map(|&(c, h)| c * c * fbm_cov_unchecked(s, t, h))
        .sum())
}

/// Draws the two fBm components from child streams, then advances `rng`.
pub fn sample_gmfbm_at(grid: &TimeGrid, p: &GmfbmParams, rng: &mut RngStream) -> Result<Vec<f64>> {
    sample_gmfbm_at_times(grid.times(), p, rng)
}

fn sample_gmfbm_at_times(times: &[f64], p: &GmfbmParams, rng: &mut RngStream) -> Result<Vec<f64>> {
    let mut first = rng.substream(0);
    let mut second = rng.substream(1);
    rng.next_u64();
    let x = sample_fbm_at_times(times, p.h1, &mut first)?;
    let y = sample_fbm_at_times(times, p.h2, &mut second)?;
    Ok(x.iter().zip(&y).map(|(x, y)| p.a * x + p.b * y).collect())
}

/// Exact draw of `Y_t` at a single time.
pub fn sample_timechanged_at<R: Rng + ?Sized>(spec: &TimeChangedSpec, t: f64, rng: &mut R) -> Result<f64> {
    check_domain(t > 0.0 && t.is_finite(), "t", t, "finite and > 0")?;
    let clock = spec.subordinator.sample_increment(t, rng)?;
    Ok(spec
        .gmfbm
        .components()
        .iter()
        .map(|&(c, h)| c * clock.powf(h) * sample_std_normal(rng))
        .sum())
}

/// Exact draw of `(Y_s, Y_t)` for `0 < s < t` at constant cost: `β_s` and the
/// independent increment `β_t - β_s`, then an exact fBm pair per component.
pub fn sample_timechanged_pair<R: Rng + ?Sized>(
    spec: &TimeChangedSpec,
    s: f64,
    t: f64,
    rng: &mut R,
) -> Result<(f64, f64)> {
    check_domain(s > 0.0 && s.is_finite(), "s", s, "finite and > 0")?;
    check_domain(t.is_finite(), "t", t, "finite")?;
    if s >= t {
        return Err(Error::ArgumentOrder(format!("need s < t, got s = {s}, t = {t}")));
    }
    let u = spec.subordinator.sample_increment(s, rng)?;
    let v = u + spec.subordinator.sample_increment(t - s, rng)?;
    let (mut ys, mut yt) = (0.0, 0.0);
    for (c, h) in spec.gmfbm.components() {
        let (x, y) = fbm_pair_unchecked(u, v, h, rng);
        ys += c * x;
        yt += c * y;
    }
    Ok((ys, yt))
}

/// Path of `Y` on a grid for an arbitrary clock.
pub fn sample_timechanged_path_with<C: TimeChange>(
    clock: &C,
    p: &GmfbmParams,
    grid: &TimeGrid,
    rng: &mut RngStream,
) -> Result<ProcessPath> {
    let sub = clock.sample_path(grid, rng)?;
    let values = sample_gmfbm_at_times(&sub.values, p, rng)?;
    Ok(ProcessPath {
        grid: sub.grid,
        clock: sub.values,
        values,
    })
}

pub fn sample_timechanged_path(spec: &TimeChangedSpec, grid: &TimeGrid, rng: &mut RngStream) -> Result<ProcessPath> {
    sample_timechanged_path_with(&spec.subordinator, &spec.gmfbm, grid, rng)
}

/// `E[β_τ^q]`, with `m(0, q) = 0`.
fn clock_moment(spec: &SubordinatorSpec, tau: f64, q: f64) -> Result<f64> {
    if tau == 0.0 {
        Ok(0.0)
    } else {
        spec.moment(tau, q)
    }
}

fn check_positive(name: &'static str, v: f64) -> Result<()> {
    check_domain(v > 0.0 && v.is_finite(), name, v, "finite and > 0")
}

/// Exact `Cov(Y_s, Y_t)` from subordinator moments.
pub fn exact_cov_oracle(spec: &TimeChangedSpec, s: f64, t: f64) -> Result<f64> {
    check_positive("s", s)?;
    check_positive("t", t)?;
    let lag = (t - s).abs();
    let mut total = 0.0;
    for (c, h) in spec.gmfbm.components() {
        if c == 0.0 {
            continue;
        }
        let q = 2.0 * h;
        let m = |tau| clock_moment(&spec.subordinator, tau, q);
        total += 0.5 * c * c * (m(t)? + m(s)? - m(lag)?);
    }
    Ok(total)
}

/// Exact `Var(Y_t) = a² m(t, 2H1) + b² m(t, 2H2)`.
pub fn exact_var_oracle(spec: &TimeChangedSpec, t: f64) -> Result<f64> {
    check_positive("t", t)?;
    weighted_moments(spec, t)
}

fn weighted_moments(spec: &TimeChangedSpec, tau: f64) -> Result<f64> {
    let mut total = 0.0;
    for (c, h) in spec.gmfbm.components() {
        if c != 0.0 {
            total += c * c * clock_moment(&spec.subordinator, tau, 2.0 * h)?;
        }
    }
    Ok(total)
}

/// `E[(Y_t - Y_s)²] = Var(Y_t) + Var(Y_s) - 2 Cov(Y_s, Y_t)` for `0 < s < t`.
pub fn exact_increment_second_moment(spec: &TimeChangedSpec, s: f64, t: f64) -> Result<f64> {
    check_positive("s", s)?;
    check_positive("t", t)?;
    if s >= t {
        return Err(Error::ArgumentOrder(format!("need s < t, got s = {s}, t = {t}")));
    }
    Ok(exact_var_oracle(spec, t)? + exact_var_oracle(spec, s)? - 2.0 * exact_cov_oracle(spec, s, t)?)
}

/// `a² m(t-s, 2H1) + b² m(t-s, 2H2)`, the increment second moment computed
/// directly from stationarity of the clock increments.
pub fn increment_second_moment_stationary(spec: &TimeChangedSpec, s: f64, t: f64) -> Result<f64> {
    check_positive("s", s)?;
    if s >= t {
        return Err(Error::ArgumentOrder(format!("need s < t, got s = {s}, t = {t}")));
    }
    weighted_moments(spec, t - s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::randkit::derive_stream;

    fn params(a: f64, b: f64, h1: f64, h2: f64) -> GmfbmParams {
        GmfbmParams::new(a, b, h1, h2).unwrap()
    }

    fn gamma1(p: GmfbmParams) -> TimeChangedSpec {
        TimeChangedSpec::new(p, SubordinatorSpec::gamma(1.0).unwrap())
    }

    fn tss(p: GmfbmParams) -> TimeChangedSpec {
        TimeChangedSpec::new(p, SubordinatorSpec::tss(0.7, 1.0).unwrap())
    }

    /// Single time-changed fBm covariance, written out independently.
    fn single_fbm_cov(sub: &SubordinatorSpec, c: f64, h: f64, s: f64, t: f64) -> f64 {
        let q = 2.0 * h;
        let m = |tau: f64| if tau == 0.0 { 0.0 } else { sub.moment(tau, q).unwrap() };
        c * c / 2.0 * (m(t) + m(s) - m((t - s).abs()))
    }

    #[test]
    fn construction() {
        assert!(GmfbmParams::new(0.0, 0.0, 0.3, 0.6).is_err());
        assert!(GmfbmParams::new(1.0, 0.0, 0.0, 0.6).is_err());
        let p = params(2.0, 3.0, 0.8, 0.4);
        assert_eq!((p.a(), p.b()), (3.0, 2.0));
        assert_eq!((p.h1().value(), p.h2().value()), (0.4, 0.8));
    }

    #[test]
    fn gmfbm_cov_examples() {
        let h = |x| HurstIndex::new(x).unwrap();
        let single = crate::fbm::fbm_cov(1.0, 2.0, h(0.55)).unwrap();
        assert_eq!(gmfbm_cov(1.0, 2.0, &params(1.0, 0.0, 0.55, 0.8)).unwrap(), single);
        let eq = gmfbm_cov(1.0, 2.0, &params(1.0, 1.0, 0.6, 0.6)).unwrap();
        assert_eq!(eq, 2.0 * crate::fbm::fbm_cov(1.0, 2.0, h(0.6)).unwrap());
        let mixed = gmfbm_cov(1.0, 2.0, &params(1.0, 2.0, 0.55, 0.8)).unwrap();
        let expected = crate::fbm::fbm_cov(1.0, 2.0, h(0.55)).unwrap() + 4.0 * crate::fbm::fbm_cov(1.0, 2.0, h(0.8)).unwrap();
        assert!((mixed - expected).abs() < 1e-14);
        assert!(gmfbm_cov(-1.0, 2.0, &params(1.0, 2.0, 0.55, 0.8)).is_err());
    }

    #[test]
    fn oracle_special_cases() {
        let spec = gamma1(params(1.0, 1.0, 0.5, 0.5));
        // Brownian with a Gamma(ν=1) clock: Cov = 2s
        assert!((exact_cov_oracle(&spec, 2.0, 7.0).unwrap() - 4.0).abs() < 1e-12);
        assert!((exact_cov_oracle(&spec, 7.0, 7.0).unwrap() - exact_var_oracle(&spec, 7.0).unwrap()).abs() < 1e-12);

        let spec = gamma1(params(1.0, 0.0, 0.5, 0.9));
        assert!((exact_var_oracle(&spec, 3.0).unwrap() - 3.0).abs() < 1e-12);
        let spec = tss(params(1.0, 0.0, 0.5, 0.9));
        assert!((exact_var_oracle(&spec, 3.0).unwrap() - 2.1).abs() < 1e-12);
    }

    #[test]
    fn var_oracle_increasing() {
        let spec = tss(params(1.0, 1.0, 0.55, 0.8));
        let mut prev = 0.0;
        for t in [0.1, 1.0, 5.0, 20.0, 300.0] {
            let v = exact_var_oracle(&spec, t).unwrap();
            assert!(v > prev);
            prev = v;
        }
    }

    #[test]
    fn increment_identity() {
        for spec in [tss(params(1.0, 1.0, 0.55, 0.8)), gamma1(params(0.5, 2.0, 0.3, 0.7))] {
            for (s, t) in [(1.0, 5.0), (1.0, 10.0), (2.0, 20.0), (0.5, 0.6)] {
                let a = exact_increment_second_moment(&spec, s, t).unwrap();
                let b = increment_second_moment_stationary(&spec, s, t).unwrap();
                assert!((a / b - 1.0).abs() < 1e-6, "({s},{t}): {a} vs {b}");
            }
            // Lévy consistency: depends only on t - s
            let x = increment_second_moment_stationary(&spec, 1.0, 4.0).unwrap();
            let y = increment_second_moment_stationary(&spec, 11.0, 14.0).unwrap();
            assert_eq!(x, y);
            let close = exact_increment_second_moment(&spec, 5.0, 5.0 + 1e-9).unwrap();
            assert!(close.abs() < 1e-6);
            assert!(exact_increment_second_moment(&spec, 5.0, 5.0).is_err());
        }
    }

    #[test]
    fn mixture_and_equal_index_reductions() {
        let sub = SubordinatorSpec::tss(0.7, 1.0).unwrap();
        let spec = TimeChangedSpec::new(params(1.3, 0.0, 0.55, 0.8), sub);
        for (s, t) in [(1.0, 3.0), (2.0, 50.0)] {
            assert_eq!(exact_cov_oracle(&spec, s, t).unwrap(), single_fbm_cov(&sub, 1.3, 0.55, s, t));
        }
        let spec = TimeChangedSpec::new(params(1.0, 2.0, 0.6, 0.6), sub);
        let single = single_fbm_cov(&sub, 1.0, 0.6, 2.0, 9.0);
        let both = exact_cov_oracle(&spec, 2.0, 9.0).unwrap();
        assert!((both - 5.0 * single).abs() <= 4.0 * f64::EPSILON * both);
    }

    #[test]
    fn sample_pair_rules() {
        let spec = tss(params(1.0, 1.0, 0.55, 0.8));
        let mut rng = derive_stream(1, 0);
        assert!(matches!(sample_timechanged_pair(&spec, 2.0, 1.0, &mut rng), Err(Error::ArgumentOrder(_))));
        assert!(sample_timechanged_pair(&spec, 0.0, 1.0, &mut rng).is_err());
        assert!(sample_timechanged_pair(&spec, 1.0, 2.0, &mut rng).is_ok());
    }

    #[test]
    fn path_from_zero() {
        let spec = gamma1(params(1.0, 1.0, 0.3, 0.7));
        let grid = TimeGrid::new(vec![0.0, 0.5, 1.0, 2.0]).unwrap();
        let mut rng = derive_stream(2, 0);
        let path = sample_timechanged_path(&spec, &grid, &mut rng).unwrap();
        assert_eq!(path.values[0], 0.0);
        assert_eq!(path.clock[0], 0.0);
        assert_eq!(path.values.len(), 4);
    }

    #[test]
    fn sampling_is_deterministic() {
        let spec = tss(params(1.0, 1.0, 0.55, 0.8));
        let grid = TimeGrid::new(vec![1.0, 2.0, 5.0]).unwrap();
        let a = sample_timechanged_path(&spec, &grid, &mut derive_stream(3, 9)).unwrap();
        let b = sample_timechanged_path(&spec, &grid, &mut derive_stream(3, 9)).unwrap();
        assert_eq!(a, b);
        let mut rng = derive_stream(3, 9);
        let first = sample_gmfbm_at(&grid, &spec.gmfbm, &mut rng).unwrap();
        let second = sample_gmfbm_at(&grid, &spec.gmfbm, &mut rng).unwrap();
        assert_ne!(first, second);
    }
}
