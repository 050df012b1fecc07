//! AWGN and multipath channel models, and the SNR / Eb/N0 link budget.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::rng::SplitMix64;

/// Converts Eb/N0 to SNR: `snr = ebn0 · (bits_per_symbol · code_rate)`, in dB.
pub fn ebn0_to_snr(ebn0_db: f64, bits_per_symbol: u32, code_rate: f64) -> Result<f64> {
    let n = spectral_efficiency(bits_per_symbol, code_rate)?;
    Ok(ebn0_db + 10.0 * n.log10())
}

/// Inverse of [`ebn0_to_snr`].
pub fn snr_to_ebn0(snr_db: f64, bits_per_symbol: u32, code_rate: f64) -> Result<f64> {
    let n = spectral_efficiency(bits_per_symbol, code_rate)?;
    Ok(snr_db - 10.0 * n.log10())
}

fn spectral_efficiency(bits_per_symbol: u32, code_rate: f64) -> Result<f64> {
    if bits_per_symbol == 0 || !(code_rate > 0.0 && code_rate <= 1.0) {
        return Err(Error::InvalidParameter(format!(
            "spectral efficiency needs bits_per_symbol >= 1 and 0 < rate <= 1, got {bits_per_symbol} and {code_rate}"
        )));
    }
    Ok(bits_per_symbol as f64 * code_rate)
}

/// Operating point of a link, with the SNR derived from Eb/N0.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkBudget {
    pub ebn0_db: f64,
    pub bits_per_symbol: u32,
    pub code_rate: f64,
    pub snr_db: f64,
}

impl LinkBudget {
    pub fn from_ebn0(ebn0_db: f64, bits_per_symbol: u32, code_rate: f64) -> Result<Self> {
        Ok(Self {
            ebn0_db,
            bits_per_symbol,
            code_rate,
            snr_db: ebn0_to_snr(ebn0_db, bits_per_symbol, code_rate)?,
        })
    }

    pub fn from_snr(snr_db: f64, bits_per_symbol: u32, code_rate: f64) -> Result<Self> {
        Ok(Self {
            ebn0_db: snr_to_ebn0(snr_db, bits_per_symbol, code_rate)?,
            bits_per_symbol,
            code_rate,
            snr_db,
        })
    }

    pub fn spectral_efficiency(&self) -> f64 {
        self.bits_per_symbol as f64 * self.code_rate
    }
}

/// Total complex noise variance for a given reference power and SNR.
/// `snr_db = +inf` yields zero.
pub fn noise_variance(signal_power_w: f64, snr_db: f64) -> f64 {
    if snr_db == f64::INFINITY {
        0.0
    } else {
        signal_power_w / 10f64.powf(snr_db / 10.0)
    }
}

/// Adds circularly-symmetric complex Gaussian noise of total variance
/// `signal_power_w / 10^(snr_db/10)` (half per real dimension).
///
/// `snr_db = f64::INFINITY` bypasses the noise entirely. The noise sequence
/// depends only on `seed`.
pub fn awgn(
    symbols: &[Complex64],
    snr_db: f64,
    signal_power_w: f64,
    seed: u64,
) -> Result<Vec<Complex64>> {
    let mut out = symbols.to_vec();
    awgn_in_place(&mut out, snr_db, signal_power_w, seed)?;
    Ok(out)
}

pub fn awgn_in_place(
    symbols: &mut [Complex64],
    snr_db: f64,
    signal_power_w: f64,
    seed: u64,
) -> Result<()> {
    if !(signal_power_w > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "signal power must be positive, got {signal_power_w}"
        )));
    }
    let var = noise_variance(signal_power_w, snr_db);
    if var == 0.0 {
        return Ok(());
    }
    let sigma = (var / 2.0).sqrt();
    let mut rng = SplitMix64::new(seed);
    for s in symbols.iter_mut() {
        let (a, b) = rng.gaussian_pair();
        *s += Complex64::new(a * sigma, b * sigma);
    }
    Ok(())
}

/// Tapped-delay-line multipath channel `y_t = Σ h_i x_{t-i}`.
#[derive(Debug, Clone, PartialEq)]
pub struct FirChannel {
    taps: Vec<Complex64>,
}

impl FirChannel {
    pub fn new(taps: Vec<Complex64>) -> Result<Self> {
        if taps.iter().all(|t| t.norm_sqr() == 0.0) {
            return Err(Error::InvalidParameter(
                "channel needs at least one nonzero tap".into(),
            ));
        }
        Ok(Self { taps })
    }

    /// The default dispersive channel `[0.8, 0.5, 0.3]`, scaled to unit energy.
    pub fn default_dispersive() -> Self {
        let taps = [0.8, 0.5, 0.3].map(|t| Complex64::new(t, 0.0)).to_vec();
        Self { taps }.normalized()
    }

    /// Scales the taps so that `Σ|h_i|² = 1`.
    pub fn normalized(&self) -> Self {
        let e: f64 = self.taps.iter().map(|t| t.norm_sqr()).sum::<f64>().sqrt();
        Self {
            taps: self.taps.iter().map(|t| t / e).collect(),
        }
    }

    pub fn taps(&self) -> &[Complex64] {
        &self.taps
    }

    /// Channel memory `L` (number of taps minus one).
    pub fn memory(&self) -> usize {
        self.taps.len() - 1
    }

    /// Linear convolution with zero initial state, truncated to the input
    /// length so that output `t` lines up with input `t`.
    pub fn apply(&self, symbols: &[Complex64]) -> Vec<Complex64> {
        (0..symbols.len())
            .map(|t| {
                self.taps
                    .iter()
                    .enumerate()
                    .take(t + 1)
                    .map(|(i, h)| h * symbols[t - i])
                    .sum()
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn ebn0_snr_examples() {
        for x in [-3.0, 0.0, 7.5] {
            assert_eq!(ebn0_to_snr(x, 1, 1.0).unwrap(), x);
        }
        assert_abs_diff_eq!(
            ebn0_to_snr(10.0, 4, 0.75).unwrap(),
            10.0 + 10.0 * 3f64.log10(),
            epsilon = 1e-12
        );
        assert_abs_diff_eq!(ebn0_to_snr(10.0, 4, 0.75).unwrap(), 14.77, epsilon = 5e-3);
        assert_abs_diff_eq!(ebn0_to_snr(0.0, 2, 0.5).unwrap(), 0.0, epsilon = 1e-12);
        assert!(ebn0_to_snr(0.0, 0, 0.5).is_err());
        assert!(ebn0_to_snr(0.0, 2, 0.0).is_err());
        assert!(ebn0_to_snr(0.0, 2, 1.5).is_err());
    }

    #[test]
    fn link_budget_round_trip() {
        let lb = LinkBudget::from_ebn0(4.2, 6, 5.0 / 7.0).unwrap();
        let back = LinkBudget::from_snr(lb.snr_db, 6, 5.0 / 7.0).unwrap();
        assert_abs_diff_eq!(back.ebn0_db, 4.2, epsilon = 1e-12);
    }

    #[test]
    fn infinite_snr_bypasses_noise() {
        let x: Vec<_> = (0..10).map(|i| c(i as f64)).collect();
        assert_eq!(awgn(&x, f64::INFINITY, 1.0, 3).unwrap(), x);
    }

    #[test]
    fn nonpositive_power_is_rejected() {
        assert!(awgn(&[c(1.0)], 10.0, 0.0, 1).is_err());
    }

    #[test]
    fn noise_power_at_10_db() {
        let x = vec![c(0.0); 1_000_000];
        let y = awgn(&x, 10.0, 1.0, 42).unwrap();
        let p: f64 = y.iter().map(|s| s.norm_sqr()).sum::<f64>() / y.len() as f64;
        assert!((p - 0.1).abs() < 0.002, "noise power {p}");
    }

    #[test]
    fn same_seed_same_noise() {
        let x = vec![c(0.0); 1000];
        assert_eq!(
            awgn(&x, 3.0, 1.0, 5).unwrap(),
            awgn(&x, 3.0, 1.0, 5).unwrap()
        );
        assert_ne!(
            awgn(&x, 3.0, 1.0, 5).unwrap(),
            awgn(&x, 3.0, 1.0, 6).unwrap()
        );
    }

    #[test]
    fn fir_identity_and_impulse() {
        let x: Vec<_> = (0..8).map(|i| c(i as f64 - 3.0)).collect();
        assert_eq!(FirChannel::new(vec![c(1.0)]).unwrap().apply(&x), x);
        let h = FirChannel::new(vec![c(0.5), Complex64::new(0.1, -0.2), c(-0.3)]).unwrap();
        let mut imp = vec![c(0.0); 5];
        imp[0] = c(1.0);
        let y = h.apply(&imp);
        assert_eq!(&y[..3], h.taps());
        assert_eq!(&y[3..], &[c(0.0), c(0.0)]);
    }

    #[test]
    fn fir_two_tap_matches_direct_sum() {
        let mut rng = SplitMix64::new(11);
        let x: Vec<_> = (0..200)
            .map(|_| Complex64::new(rng.next_f64() - 0.5, rng.next_f64() - 0.5))
            .collect();
        let y = FirChannel::new(vec![c(1.0), c(0.5)]).unwrap().apply(&x);
        for t in 0..x.len() {
            let prev = if t == 0 { c(0.0) } else { x[t - 1] };
            assert_abs_diff_eq!((y[t] - (x[t] + prev * 0.5)).norm(), 0.0, epsilon = 1e-15);
        }
    }

    #[test]
    fn zero_channel_rejected() {
        assert!(FirChannel::new(vec![c(0.0), c(0.0)]).is_err());
    }

    #[test]
    fn default_channel_has_unit_energy() {
        let e: f64 = FirChannel::default_dispersive()
            .taps()
            .iter()
            .map(|t| t.norm_sqr())
            .sum();
        assert_abs_diff_eq!(e, 1.0, epsilon = 1e-12);
    }
}
