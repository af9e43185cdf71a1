use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};

/// Identifies one reproducible random stream: a master `seed` and a
/// `stream_id` (usually the replica index).
///
/// The generator is ChaCha20 keyed by `seed` with the stream id written
/// into the cipher's stream word, so every `(seed, stream_id)` pair owns an
/// independent counter-addressed sequence and no state is shared between
/// replicas running on different threads.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RngStream {
    pub seed: u64,
    pub stream_id: u64,
}

impl RngStream {
    pub fn new(seed: u64, stream_id: u64) -> Self {
        RngStream { seed, stream_id }
    }

    /// Fresh generator positioned at the start of this stream.
    pub fn rng(&self) -> ChaCha20Rng {
        let mut rng = ChaCha20Rng::seed_from_u64(self.seed);
        rng.set_stream(self.stream_id);
        rng
    }

    /// A different stream derived from this one, for sub-tasks that must not
    /// overlap the parent stream.
    pub fn substream(&self, tag: u64) -> RngStream {
        RngStream {
            seed: self.seed ^ tag.wrapping_mul(0x9E37_79B9_7F4A_7C15).rotate_left(17),
            stream_id: self.stream_id,
        }
    }
}
