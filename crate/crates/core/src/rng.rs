//! Counter-keyed random streams.
//!
//! Every random decision in the pipeline draws from a stream keyed by
//! `(seed, item, sub_item)`, so results never depend on evaluation order or
//! worker count.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type StreamRng = ChaCha8Rng;

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^ (x >> 31)
}

/// Derives the stream for `(seed, item, sub_item)`.
pub fn stream(seed: u64, item: u64, sub_item: u64) -> StreamRng {
    let key = splitmix64(splitmix64(splitmix64(seed) ^ item) ^ sub_item.rotate_left(17));
    ChaCha8Rng::seed_from_u64(key)
}

/// Derives a child seed, used to separate independent phases of one run.
pub fn derive_seed(seed: u64, tag: u64) -> u64 {
    splitmix64(seed ^ splitmix64(tag))
}
