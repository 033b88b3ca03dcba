//! Tempered stable and Gamma subordinators: path sampling and moments.
//!
//! Parameterizations:
//! - tempered stable `TSS(α, λ)`: the increment over time `t` has Laplace
//!   transform `exp(-t((λ+u)^α - λ^α))`;
//! - Gamma `Gamma(ν)`: the increment over time `t` is Gamma with shape `t/ν`
//!   and rate 1.

use rand::Rng;
use serde::{Deserialize, Serialize};
use statrs::function::gamma::gamma;

use crate::error::{check_domain, Error, Result};
use crate::fbm::TimeGrid;
use crate::quadrature::{self, Tolerance};
use crate::randkit::{sample_gamma, sample_tempered_stable_increment};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TssParams {
    alpha: f64,
    lambda: f64,
}

impl TssParams {
    pub fn new(alpha: f64, lambda: f64) -> Result<Self> {
        check_domain(alpha > 0.0 && alpha < 1.0, "alpha", alpha, "0 < alpha < 1")?;
        check_domain(lambda > 0.0 && lambda.is_finite(), "lambda", lambda, "finite and > 0")?;
        Ok(Self { alpha, lambda })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    /// Growth rate of the mean, `α λ^(α-1)`.
    pub fn mean_rate(&self) -> f64 {
        self.alpha * self.lambda.powf(self.alpha - 1.0)
    }

    /// First three cumulants of the increment over time `t`.
    pub fn cumulants(&self, t: f64) -> [f64; 3] {
        let (a, l) = (self.alpha, self.lambda);
        [
            t * a * l.powf(a - 1.0),
            t * a * (1.0 - a) * l.powf(a - 2.0),
            t * a * (1.0 - a) * (2.0 - a) * l.powf(a - 3.0),
        ]
    }

    /// Laplace exponent over time `t`, `t((λ+u)^α - λ^α)`.
    pub fn laplace_exponent(&self, t: f64, u: f64) -> f64 {
        t * self.lambda.powf(self.alpha) * (self.alpha * (u / self.lambda).ln_1p()).exp_m1()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GammaParams {
    nu: f64,
}

impl GammaParams {
    pub fn new(nu: f64) -> Result<Self> {
        check_domain(nu > 0.0 && nu.is_finite(), "nu", nu, "finite and > 0")?;
        Ok(Self { nu })
    }

    pub fn nu(&self) -> f64 {
        self.nu
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum SubordinatorSpec {
    Tss(TssParams),
    Gamma(GammaParams),
}

impl SubordinatorSpec {
    pub fn tss(alpha: f64, lambda: f64) -> Result<Self> {
        Ok(Self::Tss(TssParams::new(alpha, lambda)?))
    }

    pub fn gamma(nu: f64) -> Result<Self> {
        Ok(Self::Gamma(GammaParams::new(nu)?))
    }

    /// Exact `E[β_t^q]`.
    pub fn moment(&self, t: f64, q: f64) -> Result<f64> {
        subordinator_moment(self, t, q)
    }

    pub fn moment_asymptotic(&self, t: f64, q: f64) -> Result<f64> {
        subordinator_moment_asymptotic(self, t, q)
    }
}

/// Subordinator values on a grid.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SubordinatorPath {
    pub grid: TimeGrid,
    pub values: Vec<f64>,
}

/// A random clock that can be sampled on a grid. Implemented by
/// [`SubordinatorSpec`]; tests substitute deterministic clocks.
pub trait TimeChange {
    /// Increment over a time step of length `dt > 0`.
    fn sample_increment<R: Rng + ?Sized>(&self, dt: f64, rng: &mut R) -> Result<f64>;

    /// Values on `grid`, starting from 0 at time 0, built from independent
    /// increments over consecutive gaps.
    fn sample_path<R: Rng + ?Sized>(&self, grid: &TimeGrid, rng: &mut R) -> Result<SubordinatorPath> {
        let mut values = Vec::with_capacity(grid.len());
        let (mut prev_t, mut level) = (0.0, 0.0);
        for &t in grid.times() {
            if t > prev_t {
                level += self.sample_increment(t - prev_t, rng)?;
            }
            values.push(level);
            prev_t = t;
        }
        Ok(SubordinatorPath {
            grid: grid.clone(),
            values,
        })
    }
}

impl TimeChange for SubordinatorSpec {
    fn sample_increment<R: Rng + ?Sized>(&self, dt: f64, rng: &mut R) -> Result<f64> {
        match self {
            Self::Tss(p) => sample_tempered_stable_increment(rng, p.alpha, p.lambda, dt),
            Self::Gamma(p) => sample_gamma(rng, dt / p.nu),
        }
    }
}

pub fn sample_path<R: Rng + ?Sized>(
    spec: &SubordinatorSpec,
    grid: &TimeGrid,
    rng: &mut R,
) -> Result<SubordinatorPath> {
    spec.sample_path(grid, rng)
}

fn check_tq(t: f64, q: f64) -> Result<()> {
    check_domain(t > 0.0 && t.is_finite(), "t", t, "finite and > 0")?;
    check_domain(q > 0.0 && q.is_finite(), "q", q, "finite and > 0")
}

/// `E[Γ_t^q] = Γ(t/ν + q) / Γ(t/ν)`.
pub fn gamma_moment(params: &GammaParams, t: f64, q: f64) -> Result<f64> {
    check_tq(t, q)?;
    Ok(ln_gamma_ratio(t / params.nu, q).exp())
}

/// `ln Γ(x+q) - ln Γ(x)` for `x, q > 0`.
///
/// Subtracting two `ln_gamma` values loses about `x ln x` ulps, which is
/// visible already at `x = 10⁴`. Instead the Stirling series is differenced
/// term by term, after shifting small `x` up with `Γ(z+1) = zΓ(z)`, so
/// nothing large cancels.
pub(crate) fn ln_gamma_ratio(x: f64, q: f64) -> f64 {
    const STIRLING_FROM: f64 = 10.0;
    // B_{2k} / (2k (2k-1)), k = 1..7
    const C: [f64; 7] = [
        1.0 / 12.0,
        -1.0 / 360.0,
        1.0 / 1260.0,
        -1.0 / 1680.0,
        1.0 / 1188.0,
        -691.0 / 360_360.0,
        1.0 / 156.0,
    ];
    if x < STIRLING_FROM {
        let shift = (STIRLING_FROM - x).ceil();
        let steps: f64 = (0..shift as usize).map(|k| (q / (x + k as f64)).ln_1p()).sum();
        return ln_gamma_ratio(x + shift, q) - steps;
    }
    let y = x + q;
    let mut series = 0.0;
    for (k, c) in C.iter().enumerate() {
        let p = 2 * k as i32 + 1;
        series += c * (y.powi(-p) - x.powi(-p));
    }
    (x - 0.5) * (q / x).ln_1p() + q * y.ln() - q + series
}

/// `(t/ν)^q`.
pub fn gamma_moment_asymptotic(params: &GammaParams, t: f64, q: f64) -> Result<f64> {
    check_tq(t, q)?;
    Ok((t / params.nu).powf(q))
}

/// `(α λ^(α-1) t)^q`.
pub fn tss_moment_asymptotic(params: &TssParams, t: f64, q: f64) -> Result<f64> {
    check_tq(t, q)?;
    Ok((params.mean_rate() * t).powf(q))
}

// φ(u) underflows to zero beyond this Laplace exponent
const LAPLACE_CUTOFF: f64 = 750.0;

/// Fractional moment `E[S_t^q]` of the tempered stable subordinator, `0 < q <= 2`.
///
/// Integer orders come from the cumulants. Otherwise, with `φ` the Laplace
/// transform of `S_t`,
///
/// - `0 < q < 1`: `E[X^q] = q/Γ(1-q) ∫ u^(-q-1) (1 - φ(u)) du`
/// - `1 < q < 2`: `E[X^q] = q(q-1)/Γ(2-q) ∫ u^(-q-1) (φ(u) - 1 + E[X] u) du`
///
/// integrated numerically in `ln u`, with both tails done analytically (a
/// third-order Taylor expansion near 0, `φ = 0` beyond the underflow point).
pub fn tss_moment(params: &TssParams, t: f64, q: f64) -> Result<f64> {
    tss_moment_with(params, t, q, Tolerance::default())
}

pub fn tss_moment_with(params: &TssParams, t: f64, q: f64, tol: Tolerance) -> Result<f64> {
    check_tq(t, q)?;
    check_domain(q <= 2.0, "q", q, "0 < q <= 2")?;
    let [k1, k2, k3] = params.cumulants(t);
    let m1 = k1;
    let m2 = k2 + k1 * k1;
    let m3 = k3 + 3.0 * k2 * k1 + k1 * k1 * k1;
    if q == 1.0 {
        return Ok(m1);
    }
    if q == 2.0 {
        return Ok(m2);
    }

    let (alpha, lambda) = (params.alpha, params.lambda);
    let scale_t = t * lambda.powf(alpha);
    // lower cut well inside the Taylor regime, upper cut where φ underflows
    let eps = 1e-4 * m1 / m2;
    let upper = lambda * (((LAPLACE_CUTOFF / scale_t).ln_1p() / alpha).exp() - 1.0);
    let (lo, hi) = (eps.ln(), upper.ln());
    if hi.is_nan() || lo.is_nan() || hi <= lo {
        return Err(Error::Quadrature {
            estimate: f64::NAN,
            error: f64::NAN,
            evaluations: 0,
        });
    }

    if q < 1.0 {
        // u^(-q) (1 - φ(u)) in the variable x = ln u
        let integrand = |x: f64| {
            let u = x.exp();
            let psi = params.laplace_exponent(t, u);
            (-q * x).exp() * -(-psi).exp_m1()
        };
        let body = quadrature::integrate(integrand, lo, hi, 32, tol)?;
        let head = m1 * eps.powf(1.0 - q) / (1.0 - q) - m2 * eps.powf(2.0 - q) / (2.0 * (2.0 - q))
            + m3 * eps.powf(3.0 - q) / (6.0 * (3.0 - q));
        let tail = upper.powf(-q) / q;
        Ok(q / gamma(1.0 - q) * (head + body.value + tail))
    } else {
        let integrand = |x: f64| {
            let u = x.exp();
            let psi = params.laplace_exponent(t, u);
            let g = exp_remainder(psi) + scale_t * binomial_remainder(alpha, u / lambda);
            (-q * x).exp() * g
        };
        let body = quadrature::integrate(integrand, lo, hi, 32, tol)?;
        let head = m2 * eps.powf(2.0 - q) / (2.0 * (2.0 - q)) - m3 * eps.powf(3.0 - q) / (6.0 * (3.0 - q));
        let tail = m1 * upper.powf(1.0 - q) / (q - 1.0) - upper.powf(-q) / q;
        Ok(q * (q - 1.0) / gamma(2.0 - q) * (head + body.value + tail))
    }
}

/// `e^(-ψ) - 1 + ψ`, accurate for small `ψ`.
fn exp_remainder(psi: f64) -> f64 {
    if psi > 0.1 {
        return (-psi).exp_m1() + psi;
    }
    let mut term = psi * psi / 2.0;
    let mut sum = term;
    let mut k = 2.0;
    while term.abs() > 1e-17 * sum.abs() {
        k += 1.0;
        term *= -psi / k;
        sum += term;
    }
    sum
}

/// `αx - ((1+x)^α - 1)`, nonnegative for `0 < α < 1`, accurate for small `x`.
fn binomial_remainder(alpha: f64, x: f64) -> f64 {
    if x > 0.1 {
        return alpha * x - (alpha * x.ln_1p()).exp_m1();
    }
    // -Σ_{k≥2} C(α, k) x^k
    let mut coeff = alpha;
    let mut power = x;
    let mut sum = 0.0;
    let mut k = 1.0;
    loop {
        k += 1.0;
        coeff *= (alpha - k + 1.0) / k;
        power *= x;
        let term = coeff * power;
        sum -= term;
        if term.abs() <= 1e-17 * sum.abs() {
            break;
        }
    }
    sum
}

pub fn subordinator_moment(spec: &SubordinatorSpec, t: f64, q: f64) -> Result<f64> {
    match spec {
        SubordinatorSpec::Tss(p) => tss_moment(p, t, q),
        SubordinatorSpec::Gamma(p) => gamma_moment(p, t, q),
    }
}

pub fn subordinator_moment_asymptotic(spec: &SubordinatorSpec, t: f64, q: f64) -> Result<f64> {
    match spec {
        SubordinatorSpec::Tss(p) => tss_moment_asymptotic(p, t, q),
        SubordinatorSpec::Gamma(p) => gamma_moment_asymptotic(p, t, q),
    }
}
