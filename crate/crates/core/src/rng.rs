//! Reproducible random streams.
//!
//! Every random quantity in the crate comes from [`SplitMix64`], a 64-bit
//! counter generator with the constants published by Steele, Lea and Flood:
//! the state advances by `0x9E37_79B9_7F4A_7C15` and is finalized with the
//! multipliers `0xBF58_476D_1CE4_E5B9` and `0x94D0_49BB_1331_11EB`. Gaussian
//! deviates use the Marsaglia polar method. Both are simple enough to be
//! reproduced bit-for-bit in other languages.

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

/// SplitMix64 finalizer; also used for seed derivation.
#[inline]
pub fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

#[derive(Debug, Clone)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        Self { state: seed }
    }

    #[inline]
    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(GOLDEN_GAMMA);
        mix64(self.state)
    }

    /// Uniform in `[0, 1)` with 53 bits of resolution.
    #[inline]
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// A pair of independent standard normal deviates (polar method).
    pub fn gaussian_pair(&mut self) -> (f64, f64) {
        loop {
            let u = 2.0 * self.next_f64() - 1.0;
            let v = 2.0 * self.next_f64() - 1.0;
            let s = u * u + v * v;
            if s > 0.0 && s < 1.0 {
                let f = (-2.0 * s.ln() / s).sqrt();
                return (u * f, v * f);
            }
        }
    }

    /// Uniform random bits, consuming one word per 64 bits.
    pub fn bits(&mut self, n: usize) -> Vec<u8> {
        let mut out = Vec::with_capacity(n);
        while out.len() < n {
            let w = self.next_u64();
            let take = (n - out.len()).min(64);
            out.extend((0..take).map(|i| ((w >> i) & 1) as u8));
        }
        out
    }
}
