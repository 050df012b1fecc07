use num_complex::Complex64;
use phylab::harness::{Chain, ChainConfig, ChainKind, CodeSpec, XAxis};
use phylab::metrics::periodogram;
use phylab::ofdm::OfdmGrid;

const FS: f64 = 20e6;

fn waveform(snr_db: f64) -> Vec<Complex64> {
    let mut cfg = ChainConfig::new(ChainKind::OfdmQam, "16qam", CodeSpec::None);
    cfg.payload_bits = 200_000;
    Chain::new(&cfg)
        .unwrap()
        .ofdm_waveform(XAxis::SnrDb, snr_db, 1)
        .unwrap()
}

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    v[v.len() / 2]
}

fn median_in(freqs: &[f64], psd: &[f64], keep: impl Fn(f64) -> bool) -> f64 {
    median(
        freqs
            .iter()
            .zip(psd)
            .filter(|(f, _)| keep(f.abs()))
            .map(|(_, &p)| p)
            .collect(),
    )
}

#[test]
fn plateau_sits_25_db_above_noise_floor() {
    let noisy = waveform(25.0);
    let clean = waveform(f64::INFINITY);
    let noise: Vec<Complex64> = noisy.iter().zip(&clean).map(|(a, b)| a - b).collect();
    let psd = periodogram(&noisy, FS, 512).unwrap();
    let floor = periodogram(&noise, FS, 512).unwrap();
    let plateau = median_in(&psd.freqs_hz, &psd.dbw_per_hz, |f| {
        (0.5e6..7.0e6).contains(&f)
    });
    let noise_floor = median(floor.dbw_per_hz.clone());
    assert!(
        (plateau - noise_floor - 25.0).abs() <= 2.0,
        "plateau {plateau:.2}, noise floor {noise_floor:.2}"
    );
    let analytic = 10.0 * (0.01 / (52.0 * FS / 64.0)).log10();
    assert!(
        (plateau - analytic).abs() < 0.5,
        "plateau {plateau:.2} dBW/Hz, expected {analytic:.2}"
    );
}

#[test]
fn occupied_bandwidth_and_skirt() {
    let x = waveform(25.0);
    let psd = periodogram(&x, FS, 512).unwrap();
    let plateau = median_in(&psd.freqs_hz, &psd.dbw_per_hz, |f| {
        (0.5e6..7.0e6).contains(&f)
    });
    let edge = psd
        .freqs_hz
        .iter()
        .zip(&psd.dbw_per_hz)
        .skip_while(|(&f, _)| f < 7.0e6)
        .find(|(_, &p)| p < plateau - 10.0)
        .map(|(&f, _)| f)
        .unwrap();
    let expected = (48.0 + 4.0 + 1.0) / 2.0 * FS / 64.0;
    assert!((expected - 8.28e6).abs() < 0.01e6);
    assert!(
        (edge - expected).abs() <= 1e6,
        "edge {edge}, expected {expected}"
    );

    // Unwindowed symbols leak: near Nyquist the skirt is only 15-22 dB down,
    // above the 25 dB noise floor.
    let skirt = median_in(&psd.freqs_hz, &psd.dbw_per_hz, |f| f > 9.5e6);
    assert!(
        (15.0..22.0).contains(&(plateau - skirt)),
        "skirt {:.2} dB down",
        plateau - skirt
    );
}

#[test]
fn per_bin_snr_matches_channel_snr() {
    let x = waveform(25.0);
    let grid = OfdmGrid::plan(64, 48, 4, 16).unwrap();
    let bins = grid.demodulate_bins(&x).unwrap();
    for &p in &grid.pilot_indices {
        let v: Vec<Complex64> = bins.iter().map(|row| row[p]).collect();
        let mean = v.iter().sum::<Complex64>() / v.len() as f64;
        let var = v.iter().map(|z| (z - mean).norm_sqr()).sum::<f64>() / v.len() as f64;
        let snr = 10.0 * (mean.norm_sqr() / var).log10();
        assert!((snr - 25.0).abs() < 1.0, "pilot bin {p}: {snr:.2} dB");
    }
}
