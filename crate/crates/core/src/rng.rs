//! Seeded random streams.
//!
//! Every random draw in the crate goes through ChaCha8 (`rand_chacha`),
//! keyed with `seed_from_u64(seed)`. Independent trials of one experiment use
//! the same key with distinct ChaCha stream ids, so a trial's draws depend
//! only on `(seed, trial)` and never on scheduling.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type Rng = ChaCha8Rng;

/// Generator for a single-stream computation.
pub fn seeded(seed: u64) -> Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Generator for trial `trial` of an experiment keyed by `seed`.
pub fn trial_stream(seed: u64, trial: u64) -> Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}
