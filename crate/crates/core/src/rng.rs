//! Seed derivation for reproducible parallel work.
//!
//! All randomness comes from [`Generator`] (ChaCha20, a counter-based
//! stream cipher generator). Work item `i` of a run with master seed `s`
//! draws from a generator seeded with [`mix_seed`]`(s, i)`:
//!
//! ```text
//! mix_seed(s, i) = splitmix64(s ^ splitmix64(i + 0x9E3779B97F4A7C15))
//! ```
//!
//! so results depend only on `(s, i)` and never on scheduling.

use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

pub type Generator = ChaCha20Rng;

pub const GENERATOR_NAME: &str = "ChaCha20Rng/splitmix64";

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

pub fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(GOLDEN);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn mix_seed(master: u64, index: u64) -> u64 {
    splitmix64(master ^ splitmix64(index.wrapping_add(GOLDEN)))
}

pub fn generator(seed: u64) -> Generator {
    ChaCha20Rng::seed_from_u64(seed)
}

/// Generator for work item `index` under `master`.
pub fn derived(master: u64, index: u64) -> Generator {
    generator(mix_seed(master, index))
}
