//! Seeded, named random substreams.
//!
//! Every consumer of randomness (task generation, learners, estimators,
//! projections, samplers) draws from its own ChaCha stream derived from one
//! run seed and a stream name, so swapping one component never perturbs the
//! draws of another.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type StreamRng = ChaCha8Rng;

/// Stable 64-bit FNV-1a hash of the stream name.
fn stream_id(name: &str) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in name.as_bytes() {
        h ^= u64::from(*b);
        h = h.wrapping_mul(0x0100_0000_01b3);
    }
    h
}

/// Returns the RNG for substream `name` of the run seeded with `seed`.
pub fn substream(seed: u64, name: &str) -> StreamRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream_id(name));
    rng
}
