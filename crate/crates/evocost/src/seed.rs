//! Pinned deterministic seeding.
//!
//! All randomness flows through ChaCha12 generators seeded from 64-bit
//! values, and per-trial seeds are derived from a master seed with
//! SplitMix64. Both algorithms are fixed; equal seeds give bit-identical
//! streams on every platform this crate builds on.

use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;

pub const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

/// One SplitMix64 step: advance by the golden gamma, then mix.
pub fn splitmix64(state: u64) -> u64 {
    let mut z = state.wrapping_add(GOLDEN_GAMMA);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed for trial `index` under `master_seed`:
/// `splitmix64(master_seed + (index + 1) * GOLDEN_GAMMA)`.
pub fn trial_seed(master_seed: u64, index: u64) -> u64 {
    splitmix64(master_seed.wrapping_add(index.wrapping_add(1).wrapping_mul(GOLDEN_GAMMA)))
}

/// Seed used to draw a landscape target from a master seed:
/// `splitmix64(master_seed)`. Distinct from every [`trial_seed`] stream.
pub fn landscape_seed(master_seed: u64) -> u64 {
    splitmix64(master_seed)
}

/// The pinned generator behind every stochastic operation.
pub fn rng_from_seed(seed: u64) -> ChaCha12Rng {
    ChaCha12Rng::seed_from_u64(seed)
}
