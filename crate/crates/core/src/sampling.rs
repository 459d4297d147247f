//! Seeded sampling helpers shared by the structural checks and the lemma suites.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Seed used when the caller does not supply one.
pub const DEFAULT_SEED: u64 = 0x6d75_7374_6162;

/// Point-sampling settings for the sampled fallbacks.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sampling {
    pub points: usize,
    pub lo: f64,
    pub hi: f64,
    pub seed: u64,
}

impl Sampling {
    /// Fallback used by the cooperative / nondecreasing checks: 200 points
    /// log-uniform on [1e-3, 1e3].
    pub fn structural(seed: u64) -> Self {
        Self { points: 200, lo: 1e-3, hi: 1e3, seed }
    }

    /// Range used by the lemma suites: log-uniform on [1e-2, 1e2].
    pub fn lemma(trials: usize, seed: u64) -> Self {
        Self { points: trials, lo: 1e-2, hi: 1e2, seed }
    }

    pub fn rng(&self) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.seed)
    }
}

impl Default for Sampling {
    fn default() -> Self {
        Self::structural(DEFAULT_SEED)
    }
}

pub fn log_uniform<R: Rng + ?Sized>(rng: &mut R, lo: f64, hi: f64) -> f64 {
    let (a, b) = (lo.ln(), hi.ln());
    (a + (b - a) * rng.gen::<f64>()).exp()
}

pub fn log_uniform_point<R: Rng + ?Sized>(rng: &mut R, n: usize, lo: f64, hi: f64) -> Vec<f64> {
    (0..n).map(|_| log_uniform(rng, lo, hi)).collect()
}
