//! Per-trial random streams.
//!
//! Every trial gets its own ChaCha stream keyed by `(root seed, trial index)`,
//! so a batch produces the same numbers no matter how trials are scheduled
//! across threads.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type TrialRng = ChaCha8Rng;

/// Independent stream for trial `index` under `seed`.
pub fn trial_rng(seed: u64, index: u64) -> TrialRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Derives a child seed, used to give sweep points or repeats distinct lineages.
pub fn derive_seed(seed: u64, salt: u64) -> u64 {
    // splitmix64 finalizer
    let mut z = seed ^ salt.wrapping_mul(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}
