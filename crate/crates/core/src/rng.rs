//! Seeded generators.
//!
//! Both generators are ChaCha8 (a counter-based stream cipher generator), so a
//! given seed yields the same bits on every platform.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Stream id reserved for cold-start jitter draws.
const JITTER_STREAM: u64 = 0x6a69_7474_6572;

/// Generator for trace synthesis, seeded directly from the trace seed.
pub fn trace_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Per-event multiplicative boot-time jitter.
///
/// The draw for the `k`-th scale-up order is addressed by `(seed, k)` alone, so
/// two runs with the same seed face the same jitter sequence no matter when
/// their policies decide to scale.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JitterStream {
    seed: u64,
    fraction: f64,
}

impl JitterStream {
    /// `fraction` is the half-width `j` of the `Uniform[1 - j, 1 + j]` multiplier.
    pub fn new(seed: u64, fraction: f64) -> Self {
        Self { seed, fraction }
    }

    pub fn fraction(&self) -> f64 {
        self.fraction
    }

    pub fn multiplier(&self, event: u64) -> f64 {
        if self.fraction == 0.0 {
            return 1.0;
        }
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(JITTER_STREAM);
        // one f64 consumes one u64, i.e. two 32-bit words
        rng.set_word_pos(u128::from(event) * 2);
        let u: f64 = rng.random();
        1.0 - self.fraction + 2.0 * self.fraction * u
    }
}
