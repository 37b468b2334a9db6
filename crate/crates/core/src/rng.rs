//! Deterministic random streams.
//!
//! Every replication draws from its own ChaCha8 stream: the master seed keys
//! the generator and the replication index selects the stream, so the
//! outcome of replication `i` never depends on which worker ran it or on how
//! many replications ran before it. Rounds inside a replication consume the
//! stream sequentially.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type StreamRng = ChaCha8Rng;

/// Independent stream `index` under `seed`.
pub fn substream(seed: u64, index: u64) -> StreamRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Child seed for the `index`-th task of a campaign (a sweep cell, a prior draw).
pub fn derive_seed(seed: u64, index: u64) -> u64 {
    splitmix64(seed ^ splitmix64(index.wrapping_add(0x9E37_79B9_7F4A_7C15)))
}

/// Child seed in a separate namespace, so that two families of tasks keyed by
/// the same index do not share streams.
pub fn derive_tagged_seed(seed: u64, tag: u64, index: u64) -> u64 {
    derive_seed(derive_seed(seed, tag ^ 0xD6E8_FEB8_6659_FD93), index)
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}
