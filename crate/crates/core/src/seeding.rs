//! Seed derivation.
//!
//! Every random draw in the crate comes from a ChaCha8 stream
//! (`rand_chacha::ChaCha8Rng`) seeded with `seed_from_u64`. Sub-streams for
//! individual users or purposes are derived by mixing the experiment seed
//! with a stream tag through SplitMix64, so results do not depend on thread
//! scheduling or platform.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type Rng = ChaCha8Rng;

/// Stream tags keep independent random decisions from sharing a sequence.
pub mod stream {
    pub const USER_SPLIT: u64 = 0x5553_4552;
    pub const POOL_SPLIT: u64 = 0x504f_4f4c;
    pub const RANDOM_STRATEGY: u64 = 0x5241_4e44;
    pub const FOLD_IN: u64 = 0x464f_4c44;
    pub const SVD_INIT: u64 = 0x5356_4449;
    pub const SUBSAMPLE: u64 = 0x5355_4253;
}

pub fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    let mut z = x;
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

pub fn derive(seed: u64, tag: u64, index: u64) -> u64 {
    splitmix64(splitmix64(seed ^ splitmix64(tag)) ^ index)
}

pub fn rng(seed: u64, tag: u64, index: u64) -> Rng {
    Rng::seed_from_u64(derive(seed, tag, index))
}
