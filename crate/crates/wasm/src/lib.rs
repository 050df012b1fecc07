//! Browser bindings for three phylab operations. The `*_data` functions are
//! plain Rust and return flat `f64` vectors so they can be tested natively;
//! the `#[wasm_bindgen]` wrappers only translate errors.

use num_complex::Complex64;
use wasm_bindgen::prelude::*;

use phylab::channel::awgn;
use phylab::fec_conv::{
    default_d_max, distance_spectrum, free_distance, parse_octal_list, punctured_bound_ber,
    PuncturePattern, Trellis,
};
use phylab::harness::{parse_range, Chain, ChainConfig, ChainKind, CodeSpec, XAxis};
use phylab::metrics::{evm, periodogram};
use phylab::modem::Constellation;
use phylab::rng::{mix64, SplitMix64};
use phylab::Result;

/// EVM limit the demo reports compliance against, in dB.
pub const EVM_LIMIT_DB: f64 = -19.0;

/// Noisy constellation with its EVM against the transmitted points.
#[wasm_bindgen]
#[derive(Debug, Clone, PartialEq)]
pub struct ConstellationView {
    received: Vec<f64>,
    ideal: Vec<f64>,
    evm_db: f64,
    evm_ratio: f64,
    compliant: bool,
}

#[wasm_bindgen]
impl ConstellationView {
    /// Received symbols as interleaved `re, im` pairs.
    #[wasm_bindgen(getter)]
    pub fn received(&self) -> Vec<f64> {
        self.received.clone()
    }

    /// Ideal constellation points as interleaved `re, im` pairs.
    #[wasm_bindgen(getter)]
    pub fn ideal(&self) -> Vec<f64> {
        self.ideal.clone()
    }

    #[wasm_bindgen(getter)]
    pub fn evm_db(&self) -> f64 {
        self.evm_db
    }

    #[wasm_bindgen(getter)]
    pub fn evm_ratio(&self) -> f64 {
        self.evm_ratio
    }

    #[wasm_bindgen(getter)]
    pub fn compliant(&self) -> bool {
        self.compliant
    }
}

fn interleave(points: &[Complex64]) -> Vec<f64> {
    points.iter().flat_map(|p| [p.re, p.im]).collect()
}

/// Maps `symbols` random symbols of `modulation` through AWGN at `snr_db`.
pub fn constellation_data(
    modulation: &str,
    snr_db: f64,
    symbols: usize,
    seed: u64,
) -> Result<ConstellationView> {
    let c = Constellation::from_name(modulation)?;
    let bits = SplitMix64::new(mix64(seed)).bits(symbols * c.bits_per_symbol() as usize);
    let tx = c.modulate(&bits)?;
    let rx = awgn(&tx, snr_db, 1.0, mix64(seed ^ 1))?;
    let report = evm(std::slice::from_ref(&rx), &[tx], EVM_LIMIT_DB)?;
    Ok(ConstellationView {
        received: interleave(&rx),
        ideal: interleave(c.points()),
        evm_db: report.evm_db,
        evm_ratio: report.evm_ratio,
        compliant: report.compliant,
    })
}

/// Union bound on BER over an Eb/N0 range `start:step:stop`, as interleaved
/// `ebn0_db, ber` pairs. An empty `puncture` mask means unpunctured.
pub fn bound_data(
    constraint_length: u32,
    generators: &str,
    puncture: &str,
    range: &str,
) -> Result<Vec<f64>> {
    let trellis = Trellis::new(constraint_length, &parse_octal_list(generators)?)?;
    let pattern = if puncture.trim().is_empty() {
        PuncturePattern::identity(trellis.outputs())
    } else {
        PuncturePattern::from_text(puncture.trim())?
    };
    let (num, den) = pattern.rate(trellis.outputs())?;
    let spectrum = distance_spectrum(
        &trellis,
        &pattern,
        default_d_max(free_distance(&trellis, &pattern)?),
    )?;
    let mut out = Vec::new();
    for x in parse_range(range)? {
        out.push(x);
        out.push(punctured_bound_ber(num, den, &spectrum, x)?);
    }
    Ok(out)
}

/// Welch PSD of the uncoded 16-QAM OFDM transmit signal after AWGN at
/// `snr_db`, as interleaved `frequency_mhz, dbw_per_hz` pairs.
pub fn spectrum_data(snr_db: f64, seed: u64) -> Result<Vec<f64>> {
    let mut cfg = ChainConfig::new(ChainKind::OfdmQam, "16qam", CodeSpec::None);
    cfg.payload_bits = 40_000;
    let chain = Chain::new(&cfg)?;
    let samples = chain.ofdm_waveform(XAxis::SnrDb, snr_db, seed)?;
    let psd = periodogram(&samples, cfg.grid.sample_rate_hz, 256)?;
    Ok(psd
        .freqs_hz
        .iter()
        .zip(&psd.dbw_per_hz)
        .flat_map(|(&f, &p)| [f / 1e6, p])
        .collect())
}

fn js(e: phylab::Error) -> JsError {
    JsError::new(&e.to_string())
}

#[wasm_bindgen]
pub fn constellation(
    modulation: &str,
    snr_db: f64,
    symbols: usize,
    seed: u32,
) -> std::result::Result<ConstellationView, JsError> {
    constellation_data(modulation, snr_db, symbols, seed.into()).map_err(js)
}

#[wasm_bindgen]
pub fn bound_curve(
    constraint_length: u32,
    generators: &str,
    puncture: &str,
    range: &str,
) -> std::result::Result<Vec<f64>, JsError> {
    bound_data(constraint_length, generators, puncture, range).map_err(js)
}

#[wasm_bindgen]
pub fn ofdm_spectrum(snr_db: f64, seed: u32) -> std::result::Result<Vec<f64>, JsError> {
    spectrum_data(snr_db, seed.into()).map_err(js)
}
