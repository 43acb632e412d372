//! Counter-based SplitMix64.
//!
//! The `k`-th draw for a seed is
//!
//! ```text
//! z = seed + (k + 1) · 0x9E3779B97F4A7C15        (mod 2⁶⁴)
//! z = (z ^ (z >> 30)) · 0xBF58476D1CE4E5B9
//! z = (z ^ (z >> 27)) · 0x94D049BB133111EB
//! z =  z ^ (z >> 31)
//! ```
//!
//! which equals the `(k+1)`-th output of the sequential SplitMix64 generator
//! started from `seed`. Uniform doubles take the top 53 bits: `(z >> 11)·2⁻⁵³`.
//! Because every draw is a pure function of `(seed, k)`, any partition of the
//! counter space reproduces the same stream.

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

/// The `counter`-th 64-bit draw for `seed`.
pub fn draw_u64(seed: u64, counter: u64) -> u64 {
    let mut z = seed.wrapping_add(counter.wrapping_add(1).wrapping_mul(GOLDEN_GAMMA));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// The `counter`-th uniform double in `[0, 1)` for `seed`.
pub fn draw_f64(seed: u64, counter: u64) -> f64 {
    (draw_u64(seed, counter) >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Sequential view over the counter stream.
#[derive(Debug, Clone)]
pub struct CounterRng {
    seed: u64,
    counter: u64,
}

impl CounterRng {
    pub fn new(seed: u64) -> Self {
        Self { seed, counter: 0 }
    }

    pub fn at(seed: u64, counter: u64) -> Self {
        Self { seed, counter }
    }

    pub fn counter(&self) -> u64 {
        self.counter
    }

    pub fn next_u64(&mut self) -> u64 {
        let v = draw_u64(self.seed, self.counter);
        self.counter += 1;
        v
    }

    pub fn next_f64(&mut self) -> f64 {
        let v = draw_f64(self.seed, self.counter);
        self.counter += 1;
        v
    }
}
