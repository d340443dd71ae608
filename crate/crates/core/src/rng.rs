//! Portable random streams.
//!
//! Every stream is a SplitMix64 generator. Child streams are keyed by
//! `derive_seed(parent, index)`, so trial `i` of a run seeded with `s` always
//! sees the same numbers regardless of scheduling or worker count.

use rand_core::{Rng, SeedableRng};
use rand_xoshiro::SplitMix64;

const GOLDEN: u64 = 0x9e37_79b9_7f4a_7c15;
const STREAM_KEY: u64 = 0xd1b5_4a32_d192_ed03;

/// Stafford variant-13 finalizer (the SplitMix64 output function).
fn finalize(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Seed of child stream `index` under `parent`.
pub fn derive_seed(parent: u64, index: u64) -> u64 {
    finalize(parent ^ finalize(index.wrapping_mul(STREAM_KEY).wrapping_add(GOLDEN)))
}

/// A deterministic random stream.
#[derive(Debug, Clone)]
pub struct Stream(SplitMix64);

impl Stream {
    pub fn new(seed: u64) -> Self {
        Stream(SplitMix64::seed_from_u64(seed))
    }

    /// Child stream `index` of a stream seeded with `parent`.
    pub fn derive(parent: u64, index: u64) -> Self {
        Stream::new(derive_seed(parent, index))
    }

    pub fn next_u64(&mut self) -> u64 {
        self.0.next_u64()
    }

    /// Uniform integer in `0..n` (Lemire's multiply-and-reject). `n` must be
    /// positive.
    pub fn below(&mut self, n: usize) -> usize {
        assert!(n > 0, "below(0)");
        let n = n as u64;
        let threshold = n.wrapping_neg() % n;
        loop {
            let m = u128::from(self.next_u64()) * u128::from(n);
            if (m as u64) >= threshold {
                return (m >> 64) as usize;
            }
        }
    }

    /// Uniformly chosen element of a non-empty slice.
    pub fn pick<T: Copy>(&mut self, items: &[T]) -> T {
        items[self.below(items.len())]
    }

    /// Fisher-Yates shuffle driven by [`Stream::below`].
    pub fn shuffle<T>(&mut self, items: &mut [T]) {
        for i in (1..items.len()).rev() {
            let j = self.below(i + 1);
            items.swap(i, j);
        }
    }
}
