//! Keyed random streams.
//!
//! Every draw is taken from a ChaCha8 generator whose key is derived from
//! `(master seed, namespace, major index)` and whose stream id is the minor
//! index. Two different `(major, minor)` pairs never share keystream, so a
//! result computed for a given pair is independent of evaluation order and
//! thread count.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

#[inline]
fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// A namespace of reproducible random streams.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RngStream {
    key: u64,
}

impl RngStream {
    pub fn new(seed: u64) -> Self {
        let mut s = seed;
        Self { key: splitmix64(&mut s) }
    }

    /// Child namespace; distinct labels give unrelated streams.
    pub fn derive(&self, label: u64) -> Self {
        let mut s = self.key ^ label.wrapping_mul(0xD6E8_FEB8_6659_FD93);
        splitmix64(&mut s);
        Self { key: splitmix64(&mut s) }
    }

    /// Generator for the `(major, minor)` cell of this namespace.
    pub fn rng(&self, major: u64, minor: u64) -> ChaCha8Rng {
        let mut s = self.key ^ major.wrapping_mul(0xA076_1D64_78BD_642F);
        let mut seed = [0u8; 32];
        for chunk in seed.chunks_exact_mut(8) {
            chunk.copy_from_slice(&splitmix64(&mut s).to_le_bytes());
        }
        let mut rng = ChaCha8Rng::from_seed(seed);
        rng.set_stream(minor);
        rng
    }
}
