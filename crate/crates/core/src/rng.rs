//! Counter-based random streams.
//!
//! Every random number in a simulation is addressed by a key path such as
//! `(seed, shape, xi, delta, trial, qubit, quadrature)`. Keys are folded with the
//! SplitMix64 finaliser; the stream itself is SplitMix64, i.e. `mix(key + i * gamma)`,
//! so the value drawn for a given address does not depend on how work is scheduled.

use rand::RngCore;

const GAMMA: u64 = 0x9e37_79b9_7f4a_7c15;

#[inline]
pub fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// A position in the key tree.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct StreamKey(u64);

impl StreamKey {
    pub fn root(seed: u64) -> Self {
        StreamKey(mix64(seed ^ 0x6a09_e667_f3bc_c908))
    }

    /// Child key for one more address component.
    #[inline]
    pub fn child(self, word: u64) -> Self {
        StreamKey(mix64(self.0.rotate_left(17) ^ word.wrapping_add(1).wrapping_mul(GAMMA)))
    }

    pub fn child_f64(self, x: f64) -> Self {
        self.child(x.to_bits())
    }

    pub fn rng(self) -> CounterRng {
        CounterRng { key: self.0, counter: 0 }
    }

    pub fn raw(self) -> u64 {
        self.0
    }
}

/// SplitMix64 stream over a fixed key.
#[derive(Debug, Clone)]
pub struct CounterRng {
    key: u64,
    counter: u64,
}

impl CounterRng {
    /// The `index`-th output of this stream, without advancing it.
    pub fn at(&self, index: u64) -> u64 {
        mix64(self.key.wrapping_add(index.wrapping_add(1).wrapping_mul(GAMMA)))
    }
}

impl RngCore for CounterRng {
    #[inline]
    fn next_u32(&mut self) -> u32 {
        (self.next_u64() >> 32) as u32
    }

    #[inline]
    fn next_u64(&mut self) -> u64 {
        let out = self.at(self.counter);
        self.counter = self.counter.wrapping_add(1);
        out
    }

    fn fill_bytes(&mut self, dst: &mut [u8]) {
        for chunk in dst.chunks_mut(8) {
            let bytes = self.next_u64().to_le_bytes();
            chunk.copy_from_slice(&bytes[..chunk.len()]);
        }
    }
}
