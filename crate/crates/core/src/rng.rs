//! SplitMix64, used for every random draw in the crate.
//!
//! The generator is counter-based: the `i`-th output of a stream seeded with
//! `s` is `mix64(s + (i + 1) * GOLDEN_GAMMA)`, so any position in any stream
//! can be computed directly. Independent substreams are addressed by hashing
//! a parent seed together with an index ([`split`]), which is how per-edge,
//! per-stage and per-trial randomness is kept order-independent.

/// Weyl increment of SplitMix64 (the odd integer closest to 2^64 / phi).
pub const GOLDEN_GAMMA: u64 = 0x9e37_79b9_7f4a_7c15;

/// The SplitMix64 output finalizer (variant 13 of Stafford's mixers).
#[inline]
pub fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Seed of the `index`-th child stream of `parent`.
#[inline]
pub fn split(parent: u64, index: u64) -> u64 {
    mix64(mix64(parent.wrapping_add(GOLDEN_GAMMA)) ^ index.wrapping_mul(GOLDEN_GAMMA).rotate_left(29))
}

/// Seed of a nested child stream, `split(split(parent, path[0]), path[1]) ...`.
pub fn split_path(parent: u64, path: &[u64]) -> u64 {
    path.iter().fold(parent, |s, &i| split(s, i))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        Self { state: seed }
    }

    /// Output number `index` (0-based) of the stream seeded with `seed`,
    /// without stepping through the earlier ones.
    pub fn at(seed: u64, index: u64) -> u64 {
        mix64(seed.wrapping_add(index.wrapping_add(1).wrapping_mul(GOLDEN_GAMMA)))
    }

    #[inline]
    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(GOLDEN_GAMMA);
        mix64(self.state)
    }

    /// Uniform double in [0, 1) with 53 random bits.
    #[inline]
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform integer in `0..bound` by rejection, so there is no modulo bias.
    pub fn below(&mut self, bound: u64) -> u64 {
        assert!(bound > 0, "below(0)");
        let zone = u64::MAX - (u64::MAX % bound + 1) % bound;
        loop {
            let x = self.next_u64();
            if x <= zone {
                return x % bound;
            }
        }
    }

    /// In-place Fisher–Yates shuffle.
    pub fn shuffle<T>(&mut self, items: &mut [T]) {
        for i in (1..items.len()).rev() {
            let j = self.below(i as u64 + 1) as usize;
            items.swap(i, j);
        }
    }
}
