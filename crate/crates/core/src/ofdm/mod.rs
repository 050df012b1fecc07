//! OFDM subcarrier planning, modulation and demodulation.
//!
//! Subcarriers are addressed by signed frequency index `-N/2 .. N/2-1`. The
//! lower guard band takes `G = (N - N_U - N_P) / 2` bins from the bottom
//! edge, the upper guard band `G - 1` bins from the top edge, and the DC bin
//! is always null. Pilots are spread evenly over the occupied bins (for the
//! default 64/48/4 grid they sit at ±7 and ±20) and carry `(1+j)/√2`.

mod fft;

pub use fft::{fft, Direction, FftPlan};

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Subcarrier allocation for one OFDM symbol.
#[derive(Debug, Clone, PartialEq)]
pub struct OfdmGrid {
    pub n_fft: usize,
    pub n_used: usize,
    pub n_pilot: usize,
    pub guard_lo: usize,
    pub guard_hi: usize,
    pub dc_null: usize,
    pub cp_len: usize,
    /// FFT bin indices carrying data, in ascending frequency order.
    pub data_indices: Vec<usize>,
    /// FFT bin indices carrying pilots, in ascending frequency order.
    pub pilot_indices: Vec<usize>,
    pub pilot_value: Complex64,
}

impl OfdmGrid {
    pub fn plan(n_fft: usize, n_used: usize, n_pilot: usize, cp_len: usize) -> Result<Self> {
        if n_fft < 4 || !n_fft.is_power_of_two() {
            return Err(Error::Config(format!(
                "FFT length {n_fft} must be a power of two >= 4"
            )));
        }
        if n_used == 0 {
            return Err(Error::Config(
                "at least one data subcarrier is required".into(),
            ));
        }
        let spare = n_fft as isize - n_used as isize - n_pilot as isize;
        if spare < 2 || spare % 2 != 0 {
            return Err(Error::Config(format!(
                "N - N_U - N_P = {spare} must be even and at least 2 for the guard bands"
            )));
        }
        if cp_len > n_fft {
            return Err(Error::Config(format!(
                "cyclic prefix {cp_len} longer than the FFT {n_fft}"
            )));
        }
        let guard_lo = spare as usize / 2;
        let guard_hi = guard_lo - 1;
        let half = (n_used + n_pilot) / 2;
        let n = n_fft as isize;
        let occupied: Vec<isize> = (-(half as isize)..0).chain(1..=half as isize).collect();
        let pilot_slots: Vec<usize> = (0..n_pilot)
            .map(|j| ((2 * j + 1) * occupied.len()) / (2 * n_pilot))
            .collect();
        let to_bin = |f: isize| ((f + n) % n) as usize;
        let mut data_indices = Vec::with_capacity(n_used);
        let mut pilot_indices = Vec::with_capacity(n_pilot);
        for (slot, &f) in occupied.iter().enumerate() {
            if pilot_slots.contains(&slot) {
                pilot_indices.push(to_bin(f));
            } else {
                data_indices.push(to_bin(f));
            }
        }
        Ok(Self {
            n_fft,
            n_used,
            n_pilot,
            guard_lo,
            guard_hi,
            dc_null: 1,
            cp_len,
            data_indices,
            pilot_indices,
            pilot_value: Complex64::new(1.0, 1.0) / 2f64.sqrt(),
        })
    }

    /// Samples per OFDM symbol including the cyclic prefix.
    pub fn symbol_len(&self) -> usize {
        self.n_fft + self.cp_len
    }

    /// Signed frequency index of an FFT bin.
    pub fn frequency_of(&self, bin: usize) -> isize {
        if bin < self.n_fft / 2 {
            bin as isize
        } else {
            bin as isize - self.n_fft as isize
        }
    }

    pub fn modulate(&self, symbols: &[Complex64]) -> Result<Vec<Complex64>> {
        if !symbols.len().is_multiple_of(self.n_used) {
            return Err(Error::Alignment(format!(
                "{} symbols do not fill whole OFDM symbols of {} data subcarriers",
                symbols.len(),
                self.n_used
            )));
        }
        let plan = FftPlan::new(self.n_fft)?;
        let count = symbols.len() / self.n_used;
        let mut out = Vec::with_capacity(count * self.symbol_len());
        let mut bins = vec![Complex64::default(); self.n_fft];
        for chunk in symbols.chunks(self.n_used) {
            bins.iter_mut().for_each(|b| *b = Complex64::default());
            for (&idx, &s) in self.data_indices.iter().zip(chunk) {
                bins[idx] = s;
            }
            for &idx in &self.pilot_indices {
                bins[idx] = self.pilot_value;
            }
            plan.process(&mut bins, Direction::Inverse);
            out.extend_from_slice(&bins[self.n_fft - self.cp_len..]);
            out.extend_from_slice(&bins);
        }
        Ok(out)
    }

    /// Removes the cyclic prefix, transforms, and returns all `n_fft` bins per
    /// OFDM symbol.
    pub fn demodulate_bins(&self, samples: &[Complex64]) -> Result<Vec<Vec<Complex64>>> {
        if !samples.len().is_multiple_of(self.symbol_len()) {
            return Err(Error::Alignment(format!(
                "{} samples do not fill whole OFDM symbols of {} samples",
                samples.len(),
                self.symbol_len()
            )));
        }
        let plan = FftPlan::new(self.n_fft)?;
        Ok(samples
            .chunks(self.symbol_len())
            .map(|sym| {
                let mut bins = sym[self.cp_len..].to_vec();
                plan.process(&mut bins, Direction::Forward);
                bins
            })
            .collect())
    }

    /// Data subcarriers only, in planning order.
    pub fn demodulate(&self, samples: &[Complex64]) -> Result<Vec<Complex64>> {
        Ok(self
            .demodulate_bins(samples)?
            .iter()
            .flat_map(|bins| self.data_indices.iter().map(move |&i| bins[i]))
            .collect())
    }
}

impl Default for OfdmGrid {
    /// 64-point FFT, 48 data and 4 pilot subcarriers, 16-sample cyclic prefix.
    fn default() -> Self {
        Self::plan(64, 48, 4, 16).expect("default grid is valid")
    }
}

pub fn plan_grid(n_fft: usize, n_used: usize, n_pilot: usize, cp_len: usize) -> Result<OfdmGrid> {
    OfdmGrid::plan(n_fft, n_used, n_pilot, cp_len)
}

pub fn ofdm_modulate(symbols: &[Complex64], grid: &OfdmGrid) -> Result<Vec<Complex64>> {
    grid.modulate(symbols)
}

pub fn ofdm_demodulate(samples: &[Complex64], grid: &OfdmGrid) -> Result<Vec<Complex64>> {
    grid.demodulate(samples)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::SplitMix64;
    use std::f64::consts::PI;

    #[test]
    fn guard_arithmetic() {
        let g = plan_grid(64, 48, 4, 16).unwrap();
        assert_eq!((g.guard_lo, g.guard_hi), (6, 5));
        assert_eq!(
            g.n_used + g.n_pilot + g.dc_null + g.guard_lo + g.guard_hi,
            64
        );
        let g = plan_grid(256, 192, 8, 64).unwrap();
        assert_eq!((g.guard_lo, g.guard_hi), (28, 27));
        assert!(matches!(plan_grid(64, 49, 4, 16), Err(Error::Config(_))));
        assert!(plan_grid(64, 62, 2, 16).is_err());
        assert!(plan_grid(48, 30, 4, 8).is_err());
    }

    #[test]
    fn default_pilots_are_symmetric() {
        let g = OfdmGrid::default();
        let freqs: Vec<isize> = g.pilot_indices.iter().map(|&b| g.frequency_of(b)).collect();
        assert_eq!(freqs, vec![-20, -7, 7, 20]);
    }

    #[test]
    fn allocation_is_disjoint_and_in_band() {
        for (n, u, p) in [(64, 48, 4), (128, 96, 6), (256, 192, 8), (64, 52, 0)] {
            let g = plan_grid(n, u, p, 0).unwrap();
            assert_eq!(g.data_indices.len(), u);
            assert_eq!(g.pilot_indices.len(), p);
            let mut all: Vec<usize> = g
                .data_indices
                .iter()
                .chain(&g.pilot_indices)
                .copied()
                .collect();
            assert!(!all.contains(&0));
            all.sort();
            all.dedup();
            assert_eq!(all.len(), u + p);
            for &b in &all {
                let f = g.frequency_of(b);
                assert!(f >= -(n as isize) / 2 + g.guard_lo as isize);
                assert!(f <= n as isize / 2 - 1 - g.guard_hi as isize);
            }
        }
    }

    fn random_symbols(n: usize, seed: u64) -> Vec<Complex64> {
        let mut rng = SplitMix64::new(seed);
        (0..n)
            .map(|_| Complex64::new(rng.next_f64() - 0.5, rng.next_f64() - 0.5))
            .collect()
    }

    #[test]
    fn round_trip_and_length() {
        let g = OfdmGrid::default();
        let x = random_symbols(48 * 5, 1);
        let t = ofdm_modulate(&x, &g).unwrap();
        assert_eq!(t.len(), 80 * 5);
        let y = ofdm_demodulate(&t, &g).unwrap();
        for (a, b) in x.iter().zip(&y) {
            assert!((a - b).norm() < 1e-12);
        }
        assert!(matches!(
            ofdm_modulate(&x[..47], &g),
            Err(Error::Alignment(_))
        ));
        assert!(matches!(
            ofdm_demodulate(&t[..79], &g),
            Err(Error::Alignment(_))
        ));
    }

    #[test]
    fn zero_input_zero_output() {
        let g = OfdmGrid {
            pilot_value: Complex64::default(),
            ..OfdmGrid::default()
        };
        let t = g.modulate(&vec![Complex64::default(); 96]).unwrap();
        assert!(t.iter().all(|s| s.norm() == 0.0));
    }

    #[test]
    fn parseval_without_prefix() {
        let g = plan_grid(64, 48, 4, 0).unwrap();
        let x = random_symbols(48 * 3, 2);
        let t = g.modulate(&x).unwrap();
        let time: f64 = t.iter().map(|s| s.norm_sqr()).sum();
        let freq: f64 =
            x.iter().map(|s| s.norm_sqr()).sum::<f64>() + 3.0 * 4.0 * g.pilot_value.norm_sqr();
        assert!((time - freq).abs() / freq < 1e-10);
    }

    #[test]
    fn single_bin_is_a_complex_exponential() {
        let mut g = plan_grid(64, 48, 4, 0).unwrap();
        g.pilot_value = Complex64::default();
        let mut x = vec![Complex64::default(); 48];
        x[30] = Complex64::new(1.0, 0.0);
        let bin = g.data_indices[30];
        let f = g.frequency_of(bin) as f64;
        let t = g.modulate(&x).unwrap();
        for (n, s) in t.iter().enumerate() {
            let expect = Complex64::from_polar(1.0 / 8.0, 2.0 * PI * f * n as f64 / 64.0);
            assert!((s - expect).norm() < 1e-12);
        }
    }
}
