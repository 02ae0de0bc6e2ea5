//! Counter-based random substreams.
//!
//! A root seed and an experiment key select a ChaCha8 key; the trial index
//! selects one of its 2^64 streams. A trial therefore sees the same draws
//! no matter which worker runs it or in what order.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// The generator used for every simulated trial.
pub type TrialRng = ChaCha8Rng;

/// Returns the independent stream for `trial` under `(seed, key)`.
pub fn trial_rng(seed: u64, key: u64, trial: u64) -> TrialRng {
    let mut rng = ChaCha8Rng::seed_from_u64(mix(seed, key));
    rng.set_stream(trial);
    rng
}

// splitmix64 finalizer over the pair, so nearby (seed, key) pairs land far apart
fn mix(seed: u64, key: u64) -> u64 {
    let mut z = seed ^ key.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}
