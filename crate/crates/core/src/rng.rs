//! Seeded generators and per-task seed derivation.
//!
//! Parallel work never shares a generator: each task gets its own stream via
//! [`derive_seed`], so results are identical for any thread count.

use rand::seq::index;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type SimRng = ChaCha8Rng;

pub fn rng_from_seed(seed: u64) -> SimRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// SplitMix64 finalizer over `(seed, stream)`.
pub fn derive_seed(seed: u64, stream: u64) -> u64 {
    let mut z = seed ^ stream.wrapping_mul(0x9E37_79B9_7F4A_7C15).wrapping_add(0xD1B5_4A32_D192_ED03);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn derived_rng(seed: u64, stream: u64) -> SimRng {
    rng_from_seed(derive_seed(seed, stream))
}

/// `k` distinct values from `0..n`, in sampled order. Returns all of `0..n`
/// in order when `k >= n`.
pub fn sample_indices(n: usize, k: usize, rng: &mut SimRng) -> Vec<usize> {
    if k >= n {
        return (0..n).collect();
    }
    index::sample(rng, n, k).into_vec()
}
