//! Counter-based random substreams.
//!
//! Every random draw in the crate comes from a ChaCha8 stream addressed by
//! `(master_seed, purpose label, indices)`. The key is derived from the seed
//! and label; the indices select the ChaCha stream id. Results therefore do
//! not depend on the order in which trials are evaluated.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[inline]
fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn fnv1a(label: &str) -> u64 {
    label.bytes().fold(0xcbf2_9ce4_8422_2325, |h, b| {
        (h ^ u64::from(b)).wrapping_mul(0x0000_0100_0000_01B3)
    })
}

/// Key material for one purpose label; cheap to copy into per-trial streams.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StreamKey {
    key: [u8; 32],
}

impl StreamKey {
    pub fn new(master_seed: u64, label: &str) -> Self {
        let mut state = master_seed ^ fnv1a(label).rotate_left(17);
        let mut key = [0u8; 32];
        for chunk in key.chunks_exact_mut(8) {
            chunk.copy_from_slice(&splitmix64(&mut state).to_le_bytes());
        }
        Self { key }
    }

    /// The stream for a single index.
    #[inline]
    pub fn stream(&self, index: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::from_seed(self.key);
        rng.set_stream(index);
        rng
    }

    /// The stream for a tuple of indices such as `(round, attempt, atom)`.
    pub fn stream_nd(&self, indices: &[u64]) -> ChaCha8Rng {
        let mut acc = 0x243F_6A88_85A3_08D3u64;
        for &i in indices {
            let mut s = acc ^ i;
            acc = splitmix64(&mut s);
        }
        self.stream(acc)
    }
}
