//! Seeded random number generation.
//!
//! Every stochastic component takes an explicit `u64` seed and derives its
//! stream through [`stream`], so results are reproducible and independent
//! jobs (per image, per location) get decorrelated streams.

use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

/// Deterministic generator for a given seed.
pub fn seeded(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Derive a sub-stream for job `index` from a base seed.
///
/// splitmix64 finalizer; avoids the correlation of plain `seed ^ index`.
pub fn stream(base_seed: u64, index: u64) -> ChaCha8Rng {
    let mut z = base_seed ^ index.wrapping_mul(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^= z >> 31;
    ChaCha8Rng::seed_from_u64(z)
}

/// Standard normal draw.
pub fn normal(rng: &mut ChaCha8Rng) -> f64 {
    rng.sample(StandardNormal)
}

/// Complex draw with independent standard normal real and imaginary parts.
pub fn complex_normal(rng: &mut ChaCha8Rng) -> Complex64 {
    Complex64::new(normal(rng), normal(rng))
}
