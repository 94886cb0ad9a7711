//! Seeded randomness and the numeric primitives shared by every sampler.

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// Seed for [`SeededRng`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Seed(pub u64);

impl Default for Seed {
    fn default() -> Self {
        Seed(42)
    }
}

/// Portable random source: ChaCha8 keyed by a 64-bit seed.
///
/// The same seed yields the same stream on every platform.
#[derive(Debug, Clone)]
pub struct SeededRng {
    seed: Seed,
    inner: ChaCha8Rng,
}

impl SeededRng {
    pub fn new(seed: Seed) -> Self {
        SeededRng {
            seed,
            inner: ChaCha8Rng::seed_from_u64(seed.0),
        }
    }

    pub fn from_u64(seed: u64) -> Self {
        Self::new(Seed(seed))
    }

    pub fn seed(&self) -> Seed {
        self.seed
    }

    /// Uniform draw in `[0, 1)`.
    pub fn uniform(&mut self) -> f64 {
        self.inner.gen::<f64>()
    }

    /// Uniform index in `[0, n)`. Panics if `n == 0`.
    pub fn index(&mut self, n: usize) -> usize {
        self.inner.gen_range(0..n)
    }
}

impl RngCore for SeededRng {
    fn next_u32(&mut self) -> u32 {
        self.inner.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    fn fill_bytes(&mut self, dest: &mut [u8]) {
        self.inner.fill_bytes(dest)
    }

    fn try_fill_bytes(&mut self, dest: &mut [u8]) -> Result<(), rand::Error> {
        self.inner.try_fill_bytes(dest)
    }
}

/// Draws an index with probability proportional to its weight.
///
/// Uses cumulative-sum inversion of a single uniform draw. Fails when the
/// weights contain a NaN or negative entry or sum to zero. An index with
/// zero weight is never returned.
pub fn sample_categorical(weights: &[f64], rng: &mut SeededRng) -> Result<usize> {
    let mut total = 0.0;
    let mut last_positive = None;
    for (i, &w) in weights.iter().enumerate() {
        if w.is_nan() || w < 0.0 {
            return Err(Error::Sampling(format!("weight {i} is {w}")));
        }
        if w > 0.0 {
            last_positive = Some(i);
        }
        total += w;
    }
    let last_positive = match last_positive {
        Some(i) if total.is_finite() => i,
        Some(_) => return Err(Error::Sampling("weights sum to infinity".into())),
        None => return Err(Error::Sampling("all weights are zero".into())),
    };
    let u = rng.uniform() * total;
    let mut acc = 0.0;
    for (i, &w) in weights.iter().enumerate() {
        acc += w;
        if u < acc && w > 0.0 {
            return Ok(i);
        }
    }
    Ok(last_positive)
}

/// `ln(x (x+1) ... (x+n-1))`, the log of the rising factorial.
pub fn log_rising_factorial(x: f64, n: u32) -> Result<f64> {
    if !(x > 0.0) {
        return Err(Error::Domain(format!(
            "rising factorial needs x > 0, got {x}"
        )));
    }
    Ok(log_rising_factorial_unchecked(x, n))
}

/// [`log_rising_factorial`] without the domain check, for inner loops whose
/// arguments are positive by construction.
#[inline]
pub(crate) fn log_rising_factorial_unchecked(x: f64, n: u32) -> f64 {
    (0..n).map(|j| (x + f64::from(j)).ln()).sum()
}

/// Natural log of the gamma function.
pub fn ln_gamma(x: f64) -> f64 {
    libm::lgamma(x)
}

/// Natural log of the beta function `B(a, b)`.
pub fn ln_beta(a: f64, b: f64) -> f64 {
    ln_gamma(a) + ln_gamma(b) - ln_gamma(a + b)
}

/// Turns log weights into linear weights in place, scaled so the largest is 1.
///
/// Entries equal to `-inf` become 0.
pub(crate) fn exp_normalize_max(log_weights: &mut [f64]) {
    let max = log_weights
        .iter()
        .copied()
        .fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        log_weights.iter_mut().for_each(|w| *w = 0.0);
        return;
    }
    for w in log_weights.iter_mut() {
        *w = (*w - max).exp();
    }
}

/// Scales `weights` to sum to one. Leaves an all-zero slice untouched.
pub fn normalize(weights: &mut [f64]) {
    let total: f64 = weights.iter().sum();
    if total > 0.0 {
        weights.iter_mut().for_each(|w| *w /= total);
    }
}
