//! Fractional Brownian motion: covariance and exact Gaussian sampling.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rustfft::num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{check_domain, Error, Result};
use crate::randkit::sample_std_normal;

/// Hurst index, strictly inside (0, 1).
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct HurstIndex(f64);

impl HurstIndex {
    pub fn new(h: f64) -> Result<Self> {
        check_domain(h > 0.0 && h < 1.0, "hurst", h, "0 < H < 1")?;
        Ok(Self(h))
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

impl TryFrom<f64> for HurstIndex {
    type Error = Error;

    fn try_from(h: f64) -> Result<Self> {
        Self::new(h)
    }
}

impl From<HurstIndex> for f64 {
    fn from(h: HurstIndex) -> f64 {
        h.0
    }
}

/// Strictly increasing, nonnegative sampling times.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TimeGrid {
    times: Vec<f64>,
}

impl TimeGrid {
    pub fn new(times: Vec<f64>) -> Result<Self> {
        if times.is_empty() {
            return Err(Error::InvalidGrid("grid is empty".into()));
        }
        if let Some(t) = times.iter().find(|t| !t.is_finite() || **t < 0.0) {
            return Err(Error::InvalidGrid(format!("time {t} is negative or not finite")));
        }
        if let Some(w) = times.windows(2).find(|w| w[1] <= w[0]) {
            return Err(Error::InvalidGrid(format!(
                "times must be strictly increasing, got {} then {}",
                w[0], w[1]
            )));
        }
        Ok(Self { times })
    }

    /// `count` points spaced evenly in log scale from `min` to `max` inclusive.
    pub fn geometric(min: f64, max: f64, count: usize) -> Result<Self> {
        check_domain(min > 0.0 && min.is_finite(), "min", min, "finite and > 0")?;
        check_domain(max > min && max.is_finite(), "max", max, "finite and > min")?;
        if count < 2 {
            return Err(Error::InvalidGrid(format!("geometric grid needs ≥ 2 points, got {count}")));
        }
        let ratio = (max / min).ln() / (count - 1) as f64;
        let mut times: Vec<f64> = (0..count).map(|i| min * (ratio * i as f64).exp()).collect();
        times[count - 1] = max;
        Self::new(times)
    }

    /// `1, 2, ..., n` times `dt`.
    pub fn regular(n: usize, dt: f64) -> Result<Self> {
        check_domain(dt > 0.0 && dt.is_finite(), "dt", dt, "finite and > 0")?;
        Self::new((1..=n).map(|i| i as f64 * dt).collect())
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }
}

fn check_time(name: &'static str, t: f64) -> Result<()> {
    check_domain(t >= 0.0 && t.is_finite(), name, t, "finite and >= 0")
}

/// `E[B_s B_t] = ½(s^{2H} + t^{2H} - |t-s|^{2H})`.
pub fn fbm_cov(s: f64, t: f64, h: HurstIndex) -> Result<f64> {
    check_time("s", s)?;
    check_time("t", t)?;
    Ok(fbm_cov_unchecked(s, t, h.0))
}

pub(crate) fn fbm_cov_unchecked(s: f64, t: f64, h: f64) -> f64 {
    let two_h = 2.0 * h;
    0.5 * (s.powf(two_h) + t.powf(two_h) - (t - s).abs().powf(two_h))
}

pub fn fbm_cov_matrix(grid: &TimeGrid, h: HurstIndex) -> DMatrix<f64> {
    cov_matrix(grid.times(), h.0)
}

fn cov_matrix(times: &[f64], h: f64) -> DMatrix<f64> {
    let n = times.len();
    DMatrix::from_fn(n, n, |i, j| fbm_cov_unchecked(times[i], times[j], h))
}

const JITTER_START: f64 = 1e-12;
const JITTER_MAX: f64 = 1e-8;

/// Lower Cholesky factor, adding diagonal jitter from 1e-12 up to 1e-8 times
/// the largest diagonal entry when the plain factorization fails.
pub(crate) fn cholesky_with_jitter(cov: DMatrix<f64>) -> Result<DMatrix<f64>> {
    let n = cov.nrows();
    if let Some(chol) = cov.clone().cholesky() {
        return Ok(chol.unpack());
    }
    let max_diag = cov.diagonal().max();
    let mut rel = JITTER_START;
    while rel <= JITTER_MAX * (1.0 + 1e-9) {
        let mut jittered = cov.clone();
        for i in 0..n {
            jittered[(i, i)] += rel * max_diag;
        }
        if let Some(chol) = jittered.cholesky() {
            return Ok(chol.unpack());
        }
        rel *= 10.0;
    }
    Err(Error::NumericalConditioning {
        size: n,
        max_jitter: JITTER_MAX * max_diag,
    })
}

/// Exact fBm sample on a grid, by Cholesky factorization of the covariance.
///
/// A leading time 0 is allowed and yields exactly 0.
pub fn sample_fbm_at<R: Rng + ?Sized>(grid: &TimeGrid, h: HurstIndex, rng: &mut R) -> Result<Vec<f64>> {
    sample_fbm_at_times(grid.times(), h, rng)
}

/// Like [`sample_fbm_at`] but for nondecreasing times that may repeat, as
/// produced by evaluating a subordinator on a grid. Zeros map to 0 and repeated
/// times share one sampled value.
pub fn sample_fbm_at_times<R: Rng + ?Sized>(
    times: &[f64],
    h: HurstIndex,
    rng: &mut R,
) -> Result<Vec<f64>> {
    for &t in times {
        check_time("time", t)?;
    }
    if let Some(w) = times.windows(2).find(|w| w[1] < w[0]) {
        return Err(Error::ArgumentOrder(format!(
            "sampling times must be nondecreasing, got {} then {}",
            w[0], w[1]
        )));
    }

    // distinct positive times, and for each input time its index into them
    let mut distinct: Vec<f64> = Vec::with_capacity(times.len());
    let mut slot: Vec<Option<usize>> = Vec::with_capacity(times.len());
    for &t in times {
        if t == 0.0 {
            slot.push(None);
            continue;
        }
        if distinct.last() != Some(&t) {
            distinct.push(t);
        }
        slot.push(Some(distinct.len() - 1));
    }

    let values = if distinct.is_empty() {
        Vec::new()
    } else {
        let lower = cholesky_with_jitter(cov_matrix(&distinct, h.0))?;
        let z = DVector::from_fn(distinct.len(), |_, _| sample_std_normal(rng));
        (lower * z).data.into()
    };

    Ok(slot
        .into_iter()
        .map(|s| s.map_or(0.0, |i| values[i]))
        .collect())
}

/// Autocovariance of fractional Gaussian noise with unit step at lag `k`.
fn fgn_autocov(k: usize, h: f64) -> f64 {
    let two_h = 2.0 * h;
    let k = k as f64;
    0.5 * ((k + 1.0).powf(two_h) - 2.0 * k.powf(two_h) + (k - 1.0).abs().powf(two_h))
}

/// `n` increments of fBm with step `dt` (fractional Gaussian noise).
///
/// Uses circulant embedding of size `2n`. If the embedding has a negative
/// eigenvalue it falls back to Cholesky on the increment covariance.
pub fn sample_fgn_regular<R: Rng + ?Sized>(
    n: usize,
    dt: f64,
    h: HurstIndex,
    rng: &mut R,
) -> Result<Vec<f64>> {
    check_domain(n >= 1, "n", n as f64, ">= 1")?;
    check_domain(dt > 0.0 && dt.is_finite(), "dt", dt, "finite and > 0")?;
    let scale = dt.powf(h.0);

    if n == 1 {
        return Ok(vec![scale * sample_std_normal(rng)]);
    }

    let m = 2 * n;
    let mut row: Vec<Complex64> = (0..m)
        .map(|j| {
            let lag = if j <= n { j } else { m - j };
            Complex64::new(fgn_autocov(lag, h.0), 0.0)
        })
        .collect();
    let mut planner = FftPlanner::<f64>::new();
    let fft = planner.plan_fft_forward(m);
    fft.process(&mut row);

    let max_eig = row.iter().map(|c| c.re).fold(0.0, f64::max);
    if row.iter().any(|c| c.re < -1e-10 * max_eig) {
        let cov = DMatrix::from_fn(n, n, |i, j| fgn_autocov(i.abs_diff(j), h.0));
        let lower = cholesky_with_jitter(cov)?;
        let z = DVector::from_fn(n, |_, _| sample_std_normal(rng));
        return Ok((lower * z).iter().map(|x| scale * x).collect());
    }

    // Re(FFT(sqrt(λ/m) ξ)) with complex normal ξ has the circulant covariance.
    let mut w: Vec<Complex64> = row
        .iter()
        .map(|eig| {
            let amp = (eig.re.max(0.0) / m as f64).sqrt();
            Complex64::new(amp * sample_std_normal(rng), amp * sample_std_normal(rng))
        })
        .collect();
    fft.process(&mut w);
    Ok(w[..n].iter().map(|c| scale * c.re).collect())
}

/// Exact pair `(B_u, B_v)` for `0 <= u <= v`.
pub fn sample_fbm_pair<R: Rng + ?Sized>(u: f64, v: f64, h: HurstIndex, rng: &mut R) -> Result<(f64, f64)> {
    check_time("u", u)?;
    check_time("v", v)?;
    if u > v {
        return Err(Error::ArgumentOrder(format!("need u <= v, got u = {u}, v = {v}")));
    }
    Ok(fbm_pair_unchecked(u, v, h.0, rng))
}

pub(crate) fn fbm_pair_unchecked<R: Rng + ?Sized>(u: f64, v: f64, h: f64, rng: &mut R) -> (f64, f64) {
    let two_h = 2.0 * h;
    let var_v = v.powf(two_h);
    if u == 0.0 {
        return (0.0, var_v.sqrt() * sample_std_normal(rng));
    }
    if u == v {
        let x = var_v.sqrt() * sample_std_normal(rng);
        return (x, x);
    }
    let var_u = u.powf(two_h);
    let cov = fbm_cov_unchecked(u, v, h);
    let x = var_u.sqrt() * sample_std_normal(rng);
    let cond_var = (var_v - cov * cov / var_u).max(0.0);
    let y = cov / var_u * x + cond_var.sqrt() * sample_std_normal(rng);
    (x, y)
}
