//! Counter-based seeded randomness: every randomized routine takes a
//! (seed, stream) pair so trials are reproducible and order-independent.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// RNG for one logical stream of a seeded run. The same (seed, stream)
/// always yields the same draws, independent of thread scheduling.
pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream.into());
    rng
}
