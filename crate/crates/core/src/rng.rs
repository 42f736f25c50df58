//! Seed-splitting: one master seed per invocation, split into independent
//! per-run substreams by a counter scheme.

use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;

/// Deterministic substream `stream_id` of `master_seed`.
///
/// ChaCha streams with different ids never overlap, so experiments can hand
/// each run its own stream and stay individually reproducible no matter how
/// runs are scheduled.
pub fn stream(master_seed: u64, stream_id: u64) -> ChaCha12Rng {
    let mut rng = ChaCha12Rng::seed_from_u64(master_seed);
    rng.set_stream(stream_id);
    rng
}
