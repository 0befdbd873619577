//! Counter-based random streams.
//!
//! Every random draw in the crate is a pure function of a 64-bit stream key
//! and a position inside that stream. Keys are derived from the user seed and
//! from structural coordinates (replica index, tree node word, pool index,
//! sweep number), so results do not depend on traversal order or on how work
//! is split across threads.

use rand::RngCore;

const GOLDEN: u64 = 0x9e37_79b9_7f4a_7c15;

/// SplitMix64 finalizer.
#[inline]
pub fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Derives a child key from a parent key and a coordinate.
#[inline]
pub fn derive(key: u64, coord: u64) -> u64 {
    mix64(key ^ mix64(coord.wrapping_add(1).wrapping_mul(GOLDEN)))
}

/// Key for a list of coordinates under a seed.
pub fn key_of(seed: u64, coords: &[u64]) -> u64 {
    coords.iter().fold(mix64(seed ^ GOLDEN), |k, &c| derive(k, c))
}

/// A random stream: output `i` is `mix64(key + (i + 1) * GOLDEN)`.
///
/// This is SplitMix64 with the state exposed as `(key, counter)`, so a stream
/// can be opened at any key in O(1).
#[derive(Clone, Debug)]
pub struct CounterRng {
    key: u64,
    counter: u64,
}

impl CounterRng {
    pub fn new(key: u64) -> Self {
        Self { key, counter: 0 }
    }

    pub fn from_coords(seed: u64, coords: &[u64]) -> Self {
        Self::new(key_of(seed, coords))
    }

    /// Uniform draw in the open interval (0, 1).
    #[inline]
    pub fn open01(&mut self) -> f64 {
        ((self.next_u64() >> 11) as f64 + 0.5) * (1.0 / (1u64 << 53) as f64)
    }

    /// Exponential draw with the given rate.
    #[inline]
    pub fn exp(&mut self, rate: f64) -> f64 {
        -self.open01().ln() / rate
    }

    /// Uniform index in `0..n` (Lemire's multiply-shift, bias < n / 2^64).
    #[inline]
    pub fn index(&mut self, n: usize) -> usize {
        ((self.next_u64() as u128 * n as u128) >> 64) as usize
    }
}

impl RngCore for CounterRng {
    #[inline]
    fn next_u32(&mut self) -> u32 {
        (self.next_u64() >> 32) as u32
    }

    #[inline]
    fn next_u64(&mut self) -> u64 {
        self.counter = self.counter.wrapping_add(1);
        mix64(self.key.wrapping_add(self.counter.wrapping_mul(GOLDEN)))
    }

    fn fill_bytes(&mut self, dst: &mut [u8]) {
        for chunk in dst.chunks_mut(8) {
            let v = self.next_u64().to_le_bytes();
            chunk.copy_from_slice(&v[..chunk.len()]);
        }
    }
}
