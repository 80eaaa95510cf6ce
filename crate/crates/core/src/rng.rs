//! Seeded random streams.
//!
//! Every random quantity in the crate is drawn from [`SeedRng`], a ChaCha8
//! keystream seeded from a single `u64`. The variate algorithms on top of the
//! raw `u64` stream are fixed here so equal seeds give equal problems,
//! permutations and trajectories on every platform:
//!
//! * uniform `[0, 1)`: top 53 bits of one word, scaled by `2^-53`;
//! * bounded integers: rejection sampling on the low zone (no modulo bias);
//! * standard normals: Box–Muller, consuming two uniforms per pair and
//!   returning the cosine branch first, then the cached sine branch;
//! * permutations: Fisher–Yates, swapping from the back.

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

#[derive(Debug, Clone)]
pub struct SeedRng {
    inner: ChaCha8Rng,
    spare_normal: Option<f64>,
}

impl SeedRng {
    pub fn new(seed: u64) -> Self {
        Self {
            inner: ChaCha8Rng::seed_from_u64(seed),
            spare_normal: None,
        }
    }

    /// Stream for the `index`-th independent worker under `master`.
    pub fn derived(master: u64, index: u64) -> Self {
        Self::new(derive_seed(master, index))
    }

    pub fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    /// Uniform on `[0, 1)`.
    pub fn uniform(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform on `[lo, hi)`.
    pub fn uniform_in(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.uniform()
    }

    /// Uniform integer in `0..bound`.
    pub fn below(&mut self, bound: usize) -> usize {
        assert!(bound > 0, "bound must be positive");
        let bound = bound as u64;
        // 2^64 mod bound; words below it would bias the low residues
        let threshold = bound.wrapping_neg() % bound;
        loop {
            let v = self.next_u64();
            if v >= threshold {
                return (v % bound) as usize;
            }
        }
    }

    pub fn normal(&mut self) -> f64 {
        if let Some(v) = self.spare_normal.take() {
            return v;
        }
        // 1 - u lies in (0, 1], keeping the log finite
        let u1 = 1.0 - self.uniform();
        let u2 = self.uniform();
        let radius = (-2.0 * u1.ln()).sqrt();
        let angle = 2.0 * std::f64::consts::PI * u2;
        self.spare_normal = Some(radius * angle.sin());
        radius * angle.cos()
    }

    pub fn shuffle<T>(&mut self, items: &mut [T]) {
        for i in (1..items.len()).rev() {
            let j = self.below(i + 1);
            items.swap(i, j);
        }
    }

    /// Uniformly random permutation of `0..n`.
    pub fn permutation(&mut self, n: usize) -> Vec<usize> {
        let mut perm: Vec<usize> = (0..n).collect();
        self.shuffle(&mut perm);
        perm
    }
}

/// SplitMix64 finalizer applied to `(master, index)`; used to give each
/// trial or sweep cell its own stream.
pub fn derive_seed(master: u64, index: u64) -> u64 {
    let mut z = master ^ index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}
