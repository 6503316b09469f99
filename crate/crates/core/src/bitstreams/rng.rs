//! Deterministic substream derivation.
//!
//! All randomness in the workspace flows from one 64-bit seed. Substreams
//! are keyed by folding structured indices (grid size, trial, string index,
//! purpose tag) into the seed with a fixed avalanche mixer, and each key
//! seeds an independent ChaCha8 generator. Same build + same seed gives
//! bit-identical streams regardless of evaluation order or thread count.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const GOLDEN: u64 = 0x9e37_79b9_7f4a_7c15;

/// splitmix64 finalizer; full 64-bit avalanche.
fn finalize(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Folds `parts` into `seed`, producing a substream key.
pub fn mix_key(seed: u64, parts: &[u64]) -> u64 {
    let mut h = finalize(seed ^ GOLDEN);
    for &p in parts {
        h = finalize(h.wrapping_add(GOLDEN) ^ p);
    }
    h
}

/// Generator for the substream identified by `key`.
pub fn stream_rng(key: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(key)
}
