//! Named, seedable random streams.
//!
//! Every consumer of randomness owns its own stream, derived from the
//! experiment seed and a purpose tag, so adding draws in one place never
//! shifts another stream.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type StreamRng = ChaCha8Rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Stream {
    Fading,
    Exploration,
    Replay,
    WeightInit,
    Baseline,
}

impl Stream {
    fn tag(self) -> u64 {
        match self {
            Stream::Fading => 0x6661_6469_6e67,
            Stream::Exploration => 0x6578_706c_6f72,
            Stream::Replay => 0x7265_706c_6179,
            Stream::WeightInit => 0x696e_6974,
            Stream::Baseline => 0x6261_7365,
        }
    }
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Stream for `purpose` under experiment `seed`.
pub fn stream(seed: u64, purpose: Stream) -> StreamRng {
    substream(seed, purpose, 0)
}

/// Stream for `purpose` under experiment `seed`, further keyed by `index`
/// (used for per-episode fading draws).
pub fn substream(seed: u64, purpose: Stream, index: u64) -> StreamRng {
    let key = splitmix64(splitmix64(seed ^ purpose.tag()) ^ index);
    ChaCha8Rng::seed_from_u64(key)
}
