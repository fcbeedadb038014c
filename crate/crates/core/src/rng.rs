//! Seed derivation for schedule-independent random streams.
//!
//! Every random draw in the crate comes from a [`ChaCha8Rng`] seeded by
//! [`derive_seed`], so the stream used for a population slot depends only on
//! `(master seed, purpose, generation, slot)` and never on thread scheduling.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Stream purposes. Values are arbitrary but fixed; changing them changes every run.
pub mod tag {
    pub const INIT: u64 = 0x1;
    pub const CROSSOVER: u64 = 0x2;
    pub const MUTATION: u64 = 0x3;
    pub const POWER_ITERATION: u64 = 0x4;
    pub const SHOTS: u64 = 0x5;
    pub const SPLIT: u64 = 0x6;
    pub const DOWNSAMPLE: u64 = 0x7;
    pub const SYNTH: u64 = 0x8;
    pub const SCENARIO: u64 = 0x9;
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Folds `parts` into `master` with a splitmix64 chain.
pub fn derive_seed(master: u64, parts: &[u64]) -> u64 {
    parts
        .iter()
        .fold(splitmix64(master), |acc, &p| splitmix64(acc ^ splitmix64(p)))
}

pub fn stream(master: u64, parts: &[u64]) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(derive_seed(master, parts))
}
