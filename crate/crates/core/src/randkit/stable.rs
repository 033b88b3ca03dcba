//! Positive stable and tempered stable variates.
//!
//! Positive stable draws use Kanter's representation
//! `X = (A(U) / E)^((1-α)/α)` with `U ~ Unif(0, π)`, `E ~ Exp(1)` and
//! Zolotarev's function `A`. Tempered stable increments are obtained by
//! exponential tilting: either per-substep rejection of stable proposals, or,
//! when the tilt is strong, Devroye's double rejection on the `(U, E)` pair,
//! whose expected cost does not grow with the increment length.

use std::f64::consts::{LN_2, PI, SQRT_2};

use rand::Rng;

use super::{sample_exp1, sample_open01, sample_std_normal};
use crate::error::{check_domain, Result};

/// Largest `dt·λ^α` that [`TemperingMethod::Auto`] still hands to substep
/// rejection (at most four substeps).
pub const AUTO_SUBSTEP_LIMIT: f64 = 4.0 * LN_2;

/// How a tempered stable increment is generated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TemperingMethod {
    /// Split the increment into substeps with `dt'·λ^α ≤ ln 2`, draw each by
    /// stable proposal and acceptance with probability `exp(-λX)`.
    Substep,
    /// Devroye's double rejection, bounded expected cost for any `dt`.
    DoubleRejection,
    /// Substeps for short increments, double rejection otherwise.
    #[default]
    Auto,
}

fn check_alpha(alpha: f64) -> Result<()> {
    check_domain(alpha > 0.0 && alpha < 1.0, "alpha", alpha, "0 < alpha < 1")
}

/// ln of Zolotarev's function `sin(αu)^α sin((1-α)u)^(1-α) / sin(u)`.
fn ln_zolotarev(u: f64, alpha: f64) -> f64 {
    alpha * (alpha * u).sin().ln() + (1.0 - alpha) * ((1.0 - alpha) * u).sin().ln() - u.sin().ln()
}

/// Standard positive stable variate with Laplace transform `exp(-u^α)`.
///
/// `alpha` must lie in (0, 1); callers validate.
pub fn sample_positive_stable<R: Rng + ?Sized>(rng: &mut R, alpha: f64) -> f64 {
    let u = PI * sample_open01(rng);
    let e = sample_exp1(rng);
    let b = (1.0 - alpha) / alpha;
    (b * (ln_zolotarev(u, alpha) / (1.0 - alpha) - e.ln())).exp()
}

/// Positive variate with Laplace transform `exp(-scale·u^α)`.
pub fn sample_stable_subordinator_increment<R: Rng + ?Sized>(
    rng: &mut R,
    alpha: f64,
    scale: f64,
) -> Result<f64> {
    check_alpha(alpha)?;
    check_domain(scale > 0.0 && scale.is_finite(), "scale", scale, "finite and > 0")?;
    Ok(scale.powf(1.0 / alpha) * sample_positive_stable(rng, alpha))
}

/// Increment of the tempered stable subordinator over a time step `dt`.
///
/// The increment has Laplace transform `exp(-dt·((λ+u)^α - λ^α))`, i.e. density
/// `exp(-λx + λ^α dt)·f_α(x, dt)`.
pub fn sample_tempered_stable_increment<R: Rng + ?Sized>(
    rng: &mut R,
    alpha: f64,
    lambda: f64,
    dt: f64,
) -> Result<f64> {
    sample_tempered_stable_with(rng, alpha, lambda, dt, TemperingMethod::Auto)
}

pub fn sample_tempered_stable_with<R: Rng + ?Sized>(
    rng: &mut R,
    alpha: f64,
    lambda: f64,
    dt: f64,
    method: TemperingMethod,
) -> Result<f64> {
    check_alpha(alpha)?;
    check_domain(lambda > 0.0 && lambda.is_finite(), "lambda", lambda, "finite and > 0")?;
    check_domain(dt > 0.0 && dt.is_finite(), "dt", dt, "finite and > 0")?;
    let kappa = dt * lambda.powf(alpha);
    let use_substeps = match method {
        TemperingMethod::Substep => true,
        TemperingMethod::DoubleRejection => false,
        TemperingMethod::Auto => kappa <= AUTO_SUBSTEP_LIMIT,
    };
    if use_substeps {
        Ok(substep_tempered(rng, alpha, lambda, dt, kappa))
    } else {
        let tilted = DoubleRejection::new(alpha, kappa).sample(rng);
        Ok(dt.powf(1.0 / alpha) * tilted)
    }
}

fn substep_tempered<R: Rng + ?Sized>(
    rng: &mut R,
    alpha: f64,
    lambda: f64,
    dt: f64,
    kappa: f64,
) -> f64 {
    let steps = (kappa / LN_2).ceil().max(1.0);
    let scale = (dt / steps).powf(1.0 / alpha);
    let mut total = 0.0;
    for _ in 0..steps as u64 {
        loop {
            let x = scale * sample_positive_stable(rng, alpha);
            // accept with probability exp(-λx)
            if sample_exp1(rng) >= lambda * x {
                total += x;
                break;
            }
        }
    }
    total
}

/// Double rejection sampler for the standard positive stable law tilted by
/// `exp(-κ^(1/α) x)`, i.e. Laplace transform `exp(-((κ^(1/α) + u)^α - κ))`.
///
/// The pair `(U, X)` with `X = E / a(U)` has joint density proportional to
/// `a(U) exp(-a(U) X - λ' X^(-b))`, `b = (1-α)/α`. `U` is proposed from a
/// mixture dominating its marginal; `X | U` from a normal / uniform /
/// exponential envelope of the log-concave conditional. The result is `X^(-b)`.
#[derive(Debug, Clone, Copy)]
pub(crate) struct DoubleRejection {
    alpha: f64,
    kappa: f64,
    b: f64,
    gamma: f64,
    sgamma: f64,
    xi: f64,
    psi: f64,
    w1: f64,
    w2: f64,
    w3: f64,
    ln_b0: f64,
}

const C1: f64 = 1.253_314_137_315_500_3; // sqrt(π/2)
const SQRT_PI: f64 = 1.772_453_850_905_516;

impl DoubleRejection {
    pub(crate) fn new(alpha: f64, kappa: f64) -> Self {
        let gamma = kappa * alpha * (1.0 - alpha);
        let sgamma = gamma.sqrt();
        let c3 = (2.0 + C1) * sgamma;
        let xi = (1.0 + SQRT_2 * c3) / PI;
        let psi = c3 * (-gamma * PI * PI / 8.0).exp() / SQRT_PI;
        Self {
            alpha,
            kappa,
            b: (1.0 - alpha) / alpha,
            gamma,
            sgamma,
            xi,
            psi,
            w1: C1 * xi / sgamma,
            w2: 2.0 * SQRT_PI * psi,
            w3: xi * PI,
            ln_b0: alpha * alpha.ln() + (1.0 - alpha) * (1.0 - alpha).ln(),
        }
    }

    /// Unnormalized density of the `U` proposal.
    pub(crate) fn proposal_density(&self, u: f64) -> f64 {
        let mut d = self.psi / (PI - u).sqrt();
        if self.gamma >= 1.0 {
            d += self.xi * (-self.gamma * u * u / 2.0).exp();
        } else {
            d += self.xi;
        }
        d
    }

    /// `ζ(u)` and the envelope mass `a(u)·s(u)` of `X | U = u`, the latter
    /// relative to `exp(-φ(m))`.
    fn zeta_and_z(&self, u: f64) -> (f64, f64) {
        let zeta = (0.5 * (self.ln_b0 - ln_zolotarev(u, self.alpha))).exp();
        let z = -1.0 / (-(self.alpha * zeta / self.sgamma).ln_1p() / self.alpha).exp_m1();
        (zeta, z)
    }

    /// Upper bound of the `U` marginal that the proposal must dominate, in the
    /// same units as `π·proposal_density`.
    #[cfg(test)]
    pub(crate) fn marginal_bound(&self, u: f64) -> f64 {
        let (zeta, z) = self.zeta_and_z(u);
        (-self.kappa * (1.0 / (zeta * zeta) - 1.0)).exp() * ((1.0 + C1) * self.sgamma / zeta + z)
    }

    pub(crate) fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let alpha = self.alpha;
        let b = self.b;
        let lambda_tilt = self.kappa.powf(1.0 / alpha);
        loop {
            let (u, z, big_z) = loop {
                let v = sample_open01(rng);
                let u = if self.gamma >= 1.0 {
                    if v < self.w1 / (self.w1 + self.w2) {
                        sample_std_normal(rng).abs() / self.sgamma
                    } else {
                        let w = sample_open01(rng);
                        PI * (1.0 - w * w)
                    }
                } else {
                    let w = sample_open01(rng);
                    if v < self.w3 / (self.w3 + self.w2) {
                        PI * w
                    } else {
                        PI * (1.0 - w * w)
                    }
                };
                if !(u > 0.0 && u < PI) {
                    continue;
                }
                let w = sample_open01(rng);
                let (zeta, z) = self.zeta_and_z(u);
                let rho = PI * (-self.kappa * (1.0 - 1.0 / (zeta * zeta))).exp()
                    / ((1.0 + C1) * self.sgamma / zeta + z)
                    * self.proposal_density(u);
                let big_z = w * rho;
                if big_z <= 1.0 {
                    break (u, z, big_z);
                }
            };

            let a = (ln_zolotarev(u, alpha) / (1.0 - alpha)).exp();
            let m = (b / a).powf(alpha) * self.kappa;
            let delta = (m * alpha / a).sqrt();
            let a1 = delta * C1;
            let a3 = z / a;
            let s = a1 + delta + a3;
            let v = sample_open01(rng) * s;
            let (x, envelope_log) = if v < a1 {
                let n = sample_std_normal(rng);
                (m - delta * n.abs(), -n * n / 2.0)
            } else if v < a1 + delta {
                (m + delta * sample_open01(rng), 0.0)
            } else {
                let e = sample_exp1(rng);
                (m + delta + e * a3, -e)
            };
            if x <= 0.0 {
                continue;
            }
            // φ(x) - φ(m) minus the log envelope
            let c = a * (x - m) + lambda_tilt * m.powf(-b) * ((m / x).powf(b) - 1.0) + envelope_log;
            if c <= -big_z.ln() {
                return (-b * x.ln()).exp();
            }
        }
    }
}
