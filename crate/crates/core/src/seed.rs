//! Seed derivation for reproducible random streams.
//!
//! Stream `i` of a run with master seed `m` is a ChaCha8 generator keyed by
//! `mix(m, i)`, where `mix` is the SplitMix64 finalizer applied to
//! `m + (i + 1) · 0x9E3779B97F4A7C15`. Any implementation of ChaCha8 with the
//! same 64-bit seed expansion reproduces the streams.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

pub fn mix(master: u64, stream: u64) -> u64 {
    let mut z = master.wrapping_add(stream.wrapping_add(1).wrapping_mul(GOLDEN_GAMMA));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn stream_rng(master: u64, stream: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(mix(master, stream))
}
