//! Seeded RNG streams for reproducible simulation.
//!
//! Every stream is a `ChaCha8Rng` seeded through `seed_from_u64`, which is
//! stable across platforms. Sweep points get their own stream from
//! [`sub_seed`]:
//!
//! ```text
//! sub_seed(master, i) = splitmix64(master ^ splitmix64(i + 0x9E3779B97F4A7C15))
//! ```

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type SimRng = ChaCha8Rng;

pub const DEFAULT_SEED: u64 = 2019;

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

/// SplitMix64 finalizer.
pub fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(GOLDEN_GAMMA);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of stream `index` under `master`.
pub fn sub_seed(master: u64, index: u64) -> u64 {
    splitmix64(master ^ splitmix64(index.wrapping_add(GOLDEN_GAMMA)))
}

pub fn rng_from_seed(seed: u64) -> SimRng {
    ChaCha8Rng::seed_from_u64(seed)
}
