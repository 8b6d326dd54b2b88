//! Reproducible Gaussian noise streams.
//!
//! Each trajectory owns a ChaCha8 generator keyed by the run seed and
//! positioned on its own 64-bit stream, so ensemble member `i` sees the same
//! draws no matter which thread runs it or in what order. Normal variates
//! use the ziggurat transform of `rand_distr::StandardNormal`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

#[derive(Debug, Clone)]
pub struct NoiseStream {
    rng: ChaCha8Rng,
}

impl NoiseStream {
    /// Stream `index` of the family keyed by `seed`.
    pub fn child(seed: u64, index: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(index);
        Self { rng }
    }

    #[inline]
    pub fn standard_normal(&mut self) -> f64 {
        self.rng.sample(StandardNormal)
    }
}

/// Standard normal increments of one trajectory, one per step.
///
/// At refinement level `L` the increments are those of the run with step
/// `dt 2^L` (same seed and stream), split by Brownian bridges: an interval
/// normal `z` becomes the halves `(z + b)/sqrt 2` and `(z - b)/sqrt 2`, with
/// `b` drawn from a separate stream per level. Level 0 is the plain stream.
#[derive(Debug, Clone)]
pub struct BrownianNoise {
    base: NoiseStream,
    bridges: Vec<NoiseStream>,
    components: usize,
    /// fine normals of the current coarse step, components interleaved
    pending: Vec<f64>,
    next: usize,
}

const BRIDGE_KEY: u64 = 0x9e37_79b9_7f4a_7c15;

impl BrownianNoise {
    pub fn new(seed: u64, stream: u64, components: usize, levels: u32) -> Self {
        assert!((1..=2).contains(&components));
        let bridges = (1..=u64::from(levels))
            .map(|l| NoiseStream::child(seed.wrapping_add(l.wrapping_mul(BRIDGE_KEY)), stream))
            .collect();
        Self {
            base: NoiseStream::child(seed, stream),
            bridges,
            components,
            pending: Vec::with_capacity(components << levels),
            next: 0,
        }
    }

    pub fn levels(&self) -> u32 {
        self.bridges.len() as u32
    }

    /// Normals for the next step; the second entry is unused in one
    /// dimension.
    #[inline]
    pub fn step(&mut self) -> [f64; 2] {
        let c = self.components;
        if self.bridges.is_empty() {
            let x = self.base.standard_normal();
            let y = if c == 2 { self.base.standard_normal() } else { 0.0 };
            return [x, y];
        }
        if self.next == self.pending.len() {
            self.refill();
        }
        let i = self.next;
        self.next += c;
        [self.pending[i], if c == 2 { self.pending[i + 1] } else { 0.0 }]
    }

    fn refill(&mut self) {
        let c = self.components;
        let mut cur: Vec<f64> = (0..c).map(|_| self.base.standard_normal()).collect();
        for bridge in &mut self.bridges {
            let mut finer = Vec::with_capacity(2 * cur.len());
            for interval in cur.chunks(c) {
                let b: Vec<f64> = (0..c).map(|_| bridge.standard_normal()).collect();
                for half in [1.0, -1.0] {
                    finer.extend((0..c).map(|j| (interval[j] + half * b[j]) * std::f64::consts::FRAC_1_SQRT_2));
                }
            }
            cur = finer;
        }
        self.pending = cur;
        self.next = 0;
    }
}
