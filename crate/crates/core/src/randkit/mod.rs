//! Reproducible random streams and the scalar samplers used throughout the crate.
//!
//! Every Monte Carlo path gets its own [`RngStream`], keyed by a master seed and
//! a stream id. The underlying generator is ChaCha8 in counter mode, so a
//! stream is fully determined by `(master_seed, stream_id)` and the position
//! within it, independent of thread scheduling.

mod stable;

pub use stable::{
    sample_positive_stable, sample_stable_subordinator_increment,
    sample_tempered_stable_increment, sample_tempered_stable_with, TemperingMethod,
};

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1, Gamma, StandardNormal};

use crate::error::{check_domain, Result};

/// A deterministic, splittable random stream.
#[derive(Clone, Debug)]
pub struct RngStream {
    master_seed: u64,
    stream_id: u64,
    rng: ChaCha8Rng,
}

impl RngStream {
    pub fn master_seed(&self) -> u64 {
        self.master_seed
    }

    pub fn stream_id(&self) -> u64 {
        self.stream_id
    }

    /// Number of 32-bit words consumed so far.
    pub fn counter(&self) -> u128 {
        self.rng.get_word_pos()
    }

    /// Derives an independent child stream from the current state.
    ///
    /// The child key mixes the parent's seed, id and position with `index`, so
    /// children taken at different points of the parent never collide. The
    /// parent is not advanced.
    pub fn substream(&self, index: u64) -> RngStream {
        let pos = self.counter();
        let key = mix64(
            mix64(self.master_seed ^ 0x243f_6a88_85a3_08d3)
                ^ mix64(self.stream_id.wrapping_add(0x1319_8a2e_0370_7344))
                ^ mix64(pos as u64 ^ ((pos >> 64) as u64).rotate_left(32)),
        );
        derive_stream(key, index)
    }
}

/// Returns the stream for `(master_seed, stream_id)`, positioned at its start.
pub fn derive_stream(master_seed: u64, stream_id: u64) -> RngStream {
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream(stream_id);
    RngStream {
        master_seed,
        stream_id,
        rng,
    }
}

// SplitMix64 finalizer.
fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

impl RngCore for RngStream {
    fn next_u32(&mut self) -> u32 {
        self.rng.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }

    fn fill_bytes(&mut self, dest: &mut [u8]) {
        self.rng.fill_bytes(dest)
    }

    fn try_fill_bytes(&mut self, dest: &mut [u8]) -> std::result::Result<(), rand::Error> {
        self.rng.try_fill_bytes(dest)
    }
}

pub fn sample_std_normal<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    StandardNormal.sample(rng)
}

pub fn sample_exp1<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    Exp1.sample(rng)
}

/// Uniform on the open interval (0, 1).
pub fn sample_open01<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    rng.sample(rand::distributions::Open01)
}

/// Gamma(shape, rate 1) variate, including shapes below one.
pub fn sample_gamma<R: Rng + ?Sized>(rng: &mut R, shape: f64) -> Result<f64> {
    check_domain(
        shape > 0.0 && shape.is_finite(),
        "shape",
        shape,
        "finite and > 0",
    )?;
    let dist = Gamma::new(shape, 1.0).expect("shape validated above");
    // For very small shapes the boosting factor U^(1/shape) underflows to 0.
    Ok(dist.sample(rng).max(f64::MIN_POSITIVE))
}
