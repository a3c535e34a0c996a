//! Random number generation contract.
//!
//! Every stochastic routine in this crate draws from [`ChainRng`], which is
//! xoshiro256++ (Blackman & Vigna), a 64-bit generator with 256 bits of
//! state. A user seed `s` is expanded into the 256-bit state with SplitMix64,
//! exactly as `rand_xoshiro` does for `seed_from_u64`.
//!
//! Independent replicas never share a stream: replica `i` of a run seeded
//! with `s` uses [`replica_rng`]`(s, i)`, which seeds a fresh generator from
//! `s + (i + 1) * 0x9E3779B97F4A7C15` (wrapping). Because the SplitMix64
//! expansion decorrelates nearby inputs, streams for different replicas are
//! independent for all practical purposes, and the result of a replica does
//! not depend on how replicas are scheduled across threads.

use rand::SeedableRng;
pub use rand_xoshiro::Xoshiro256PlusPlus as ChainRng;

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

pub fn seeded(seed: u64) -> ChainRng {
    ChainRng::seed_from_u64(seed)
}

pub fn replica_rng(seed: u64, replica: u64) -> ChainRng {
    ChainRng::seed_from_u64(seed.wrapping_add(replica.wrapping_add(1).wrapping_mul(GOLDEN_GAMMA)))
}

/// Derives a child seed for a sub-experiment (e.g. one repetition of a power
/// curve that itself spawns replicas).
pub fn child_seed(seed: u64, index: u64) -> u64 {
    use rand::RngCore;
    replica_rng(seed ^ 0xA5A5_A5A5_5A5A_5A5A, index).next_u64()
}
