//! Per-trial random streams.
//!
//! Trial `k` of a run with seed `s` always draws from the ChaCha8 stream
//! keyed by `s` with stream id `k`. The assignment is a pure function of
//! `(s, k)`, so results do not depend on how trials are spread over workers.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type TrialRng = ChaCha8Rng;

pub fn trial_stream(seed: u64, trial: u64) -> TrialRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

/// SplitMix64 finaliser.
fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Priority key used by bottom-k reservoir sampling. Independent of the
/// trial's own stream so that enabling the reservoir does not perturb the
/// simulated statistics.
pub fn reservoir_key(seed: u64, trial: u64) -> u64 {
    mix64(mix64(seed) ^ trial)
}
