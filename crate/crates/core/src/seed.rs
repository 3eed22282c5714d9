//! Seed derivation.
//!
//! Every random stream in the crate is keyed by a 64-bit avalanche mix of a
//! parent seed and an index, so per-cell and per-replication streams can be
//! produced in any order (or in parallel) and still yield identical output.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// SplitMix64 finalizer applied to `seed` combined with `index`.
#[inline]
pub fn mix(seed: u64, index: u64) -> u64 {
    let mut z = seed
        .wrapping_add(0x9E37_79B9_7F4A_7C15)
        .wrapping_add(index.wrapping_mul(0xD1B5_4A32_D192_ED03));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Independent generator for stream `index` under `seed`.
#[inline]
pub fn stream(seed: u64, index: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(mix(seed, index))
}

/// Master seed of replication `rep` in an experiment.
#[inline]
pub fn replication_seed(experiment_seed: u64, rep: u64) -> u64 {
    mix(experiment_seed, rep)
}

/// Uniform draw in [0, 1) built from 53 random mantissa bits.
#[inline]
pub fn unit_f64<R: rand::RngCore>(rng: &mut R) -> f64 {
    const SCALE: f64 = 1.0 / (1u64 << 53) as f64;
    (rng.next_u64() >> 11) as f64 * SCALE
}
