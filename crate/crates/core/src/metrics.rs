//! Bit-error accounting, error vector magnitude and a Welch periodogram.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::ofdm::{Direction, FftPlan};

/// One BER measurement. CSV and JSON use these field names in this order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BerRecord {
    pub chain: String,
    pub modulation: String,
    pub family: String,
    pub code_rate: String,
    pub snr_db: Option<f64>,
    pub ebn0_db: Option<f64>,
    pub bits: u64,
    pub errors: u64,
    pub ber: f64,
    pub seed: u64,
}

impl BerRecord {
    pub fn new(bits: u64, errors: u64) -> Self {
        Self {
            chain: String::new(),
            modulation: String::new(),
            family: String::new(),
            code_rate: String::new(),
            snr_db: None,
            ebn0_db: None,
            bits,
            errors,
            ber: if bits == 0 {
                0.0
            } else {
                errors as f64 / bits as f64
            },
            seed: 0,
        }
    }

    /// Series label used for plotting: `chain/modulation/code_rate`.
    pub fn label(&self) -> String {
        format!("{}/{}/{}", self.chain, self.modulation, self.code_rate)
    }

    /// Adds another shard's counts into this record.
    pub fn merge(&mut self, other: &BerRecord) {
        self.bits += other.bits;
        self.errors += other.errors;
        self.ber = if self.bits == 0 {
            0.0
        } else {
            self.errors as f64 / self.bits as f64
        };
    }

    /// Binomial standard error of the BER estimate.
    pub fn std_error(&self) -> f64 {
        if self.bits == 0 {
            return 0.0;
        }
        (self.ber * (1.0 - self.ber) / self.bits as f64).sqrt()
    }
}

/// Hamming distance between two equal-length bit streams.
pub fn count_errors(tx_bits: &[u8], rx_bits: &[u8]) -> Result<BerRecord> {
    if tx_bits.len() != rx_bits.len() {
        return Err(Error::Alignment(format!(
            "bit streams differ in length: {} vs {}",
            tx_bits.len(),
            rx_bits.len()
        )));
    }
    let errors = tx_bits
        .iter()
        .zip(rx_bits)
        .filter(|(a, b)| (*a ^ *b) & 1 == 1)
        .count();
    Ok(BerRecord::new(tx_bits.len() as u64, errors as u64))
}

/// EVM of a block of received points against their references.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvmReport {
    pub evm_ratio: f64,
    /// `20 log10(evm_ratio)`; `-inf` serializes as `null`.
    #[serde(serialize_with = "finite_or_null")]
    pub evm_db: f64,
    pub limit_db: f64,
    pub compliant: bool,
}

impl EvmReport {
    /// `evm_db` as text, with `-inf` for a perfect match.
    pub fn db_text(&self) -> String {
        if self.evm_db == f64::NEG_INFINITY {
            "-inf".into()
        } else {
            format!("{:.2}", self.evm_db)
        }
    }
}

fn finite_or_null<S: Serializer>(v: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
    if v.is_finite() {
        s.serialize_f64(*v)
    } else {
        s.serialize_none()
    }
}

/// RMS error vector over `frames × carriers` points, normalized by the RMS
/// reference magnitude. A single point reduces to `|R-S| / |S|`.
pub fn evm(
    received: &[Vec<Complex64>],
    reference: &[Vec<Complex64>],
    limit_db: f64,
) -> Result<EvmReport> {
    if received.len() != reference.len()
        || received
            .iter()
            .zip(reference)
            .any(|(r, s)| r.len() != s.len())
    {
        return Err(Error::Alignment(
            "received and reference grids differ in shape".into(),
        ));
    }
    let (err, refp) = received
        .iter()
        .flatten()
        .zip(reference.iter().flatten())
        .fold((0.0, 0.0), |(e, p), (r, s)| {
            (e + (r - s).norm_sqr(), p + s.norm_sqr())
        });
    if refp == 0.0 {
        return Err(Error::UndefinedEvm);
    }
    let evm_ratio = (err / refp).sqrt();
    let evm_db = if evm_ratio == 0.0 {
        f64::NEG_INFINITY
    } else {
        20.0 * evm_ratio.log10()
    };
    Ok(EvmReport {
        evm_ratio,
        evm_db,
        limit_db,
        compliant: evm_db <= limit_db,
    })
}

/// Power spectral density estimate, ascending in frequency from `-fs/2`.
#[derive(Debug, Clone, PartialEq)]
pub struct Psd {
    pub freqs_hz: Vec<f64>,
    pub dbw_per_hz: Vec<f64>,
    pub bin_width_hz: f64,
}

impl Psd {
    /// Linear PSD in W/Hz.
    pub fn linear(&self) -> Vec<f64> {
        self.dbw_per_hz
            .iter()
            .map(|d| 10f64.powf(d / 10.0))
            .collect()
    }

    /// Integrated power, `Σ PSD · Δf`.
    pub fn total_power(&self) -> f64 {
        self.linear().iter().sum::<f64>() * self.bin_width_hz
    }
}

/// Welch periodogram: Hann-windowed segments of `fft_len` with 50% overlap.
/// Each bin is the averaged windowed power divided by the bin width, i.e.
/// `|Σ w x e^{-j..}|² / (fs Σ w²)`, reported in dBW/Hz.
pub fn periodogram(samples: &[Complex64], sample_rate_hz: f64, fft_len: usize) -> Result<Psd> {
    if samples.len() < fft_len {
        return Err(Error::Size(format!(
            "periodogram needs at least {fft_len} samples, got {}",
            samples.len()
        )));
    }
    if !(sample_rate_hz > 0.0) {
        return Err(Error::InvalidParameter(
            "sample rate must be positive".into(),
        ));
    }
    let plan = FftPlan::new(fft_len)?;
    let window: Vec<f64> = (0..fft_len)
        .map(|n| 0.5 - 0.5 * (2.0 * PI * n as f64 / fft_len as f64).cos())
        .collect();
    let wpow: f64 = window.iter().map(|w| w * w).sum();
    let hop = (fft_len / 2).max(1);
    let mut acc = vec![0.0; fft_len];
    let mut segments = 0usize;
    let mut buf = vec![Complex64::default(); fft_len];
    let mut start = 0;
    while start + fft_len <= samples.len() {
        for ((b, &x), &w) in buf
            .iter_mut()
            .zip(&samples[start..start + fft_len])
            .zip(&window)
        {
            *b = x * w;
        }
        plan.process(&mut buf, Direction::Forward);
        // Unitary FFT: |X_unitary|² · N = |X|².
        for (a, b) in acc.iter_mut().zip(&buf) {
            *a += b.norm_sqr() * fft_len as f64;
        }
        segments += 1;
        start += hop;
    }
    let scale = 1.0 / (segments as f64 * sample_rate_hz * wpow);
    let bin_width_hz = sample_rate_hz / fft_len as f64;
    let mut freqs_hz = Vec::with_capacity(fft_len);
    let mut dbw_per_hz = Vec::with_capacity(fft_len);
    for i in 0..fft_len {
        let k = (i + fft_len / 2) % fft_len;
        let f = if k < fft_len / 2 {
            k as f64
        } else {
            k as f64 - fft_len as f64
        };
        freqs_hz.push(f * bin_width_hz);
        dbw_per_hz.push(10.0 * (acc[k] * scale).max(f64::MIN_POSITIVE).log10());
    }
    Ok(Psd {
        freqs_hz,
        dbw_per_hz,
        bin_width_hz,
    })
}
