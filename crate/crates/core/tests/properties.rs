use proptest::prelude::*;

use num_complex::Complex64;
use phylab::fec_conv::{
    bits_to_metrics, Decision, PuncturePattern, Trellis, ViterbiDecoder, RATE_3_4, RATE_5_7,
};
use phylab::fec_rs::RsCode;
use phylab::harness::{parse_csv, write_records, Format};
use phylab::metrics::{evm, BerRecord};
use phylab::modem::Constellation;
use phylab::ofdm::{fft, Direction};

fn bits(max: usize) -> impl Strategy<Value = Vec<u8>> {
    prop::collection::vec(0u8..2, 0..max)
}

fn pattern(name: &str) -> PuncturePattern {
    match name {
        "3/4" => PuncturePattern::from_text(RATE_3_4).unwrap(),
        "5/7" => PuncturePattern::from_text(RATE_5_7).unwrap(),
        _ => PuncturePattern::identity(2),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn encoder_is_linear(pair in (1usize..300).prop_flat_map(|n| (prop::collection::vec(0u8..2, n), prop::collection::vec(0u8..2, n)))) {
        let t = Trellis::new(7, &[133, 171]).unwrap();
        let (x, y) = pair;
        let xy: Vec<u8> = x.iter().zip(&y).map(|(a, b)| a ^ b).collect();
        let ex = t.encode(&x, false);
        let ey = t.encode(&y, false);
        let sum: Vec<u8> = ex.iter().zip(&ey).map(|(a, b)| a ^ b).collect();
        prop_assert_eq!(t.encode(&xy, false), sum);
    }

    #[test]
    fn viterbi_round_trip(x in bits(2000), rate in prop::sample::select(vec!["1/2", "3/4", "5/7"]), soft in any::<bool>()) {
        let t = Trellis::new(7, &[133, 171]).unwrap();
        let p = pattern(rate);
        let mut coded = t.encode(&x, true);
        let padded = coded.len().div_ceil(p.period()) * p.period();
        coded.resize(padded, 0);
        let metrics = p.depuncture(&bits_to_metrics(&p.puncture(&coded).unwrap())).unwrap();
        let steps = x.len() + t.memory();
        let mode = if soft { Decision::Soft } else { Decision::Hard };
        let out = ViterbiDecoder::new(&t, mode, 72).unwrap().terminated(true).decode(&metrics[..2 * steps]).unwrap();
        prop_assert_eq!(&out[..x.len()], &x[..]);
    }

    #[test]
    fn depuncture_restores_positions(periods in 1usize..50, rate in prop::sample::select(vec!["3/4", "5/7"])) {
        let p = pattern(rate);
        let values: Vec<f64> = (0..periods * p.period()).map(|i| i as f64 + 1.0).collect();
        let back = p.depuncture(&p.puncture(&values).unwrap()).unwrap();
        prop_assert_eq!(back.len(), values.len());
        for (i, (&b, &v)) in back.iter().zip(&values).enumerate() {
            let kept = p.mask()[i % p.period()];
            prop_assert_eq!(b, if kept { v } else { 0.0 });
        }
    }

    #[test]
    fn rs_round_trip(msg in prop::collection::vec(0u8..16, 9)) {
        let code = RsCode::new(4, 15, 9).unwrap();
        let cw = code.encode(&msg).unwrap();
        prop_assert_eq!(&cw[..9], &msg[..]);
        prop_assert_eq!(code.decode(&cw).unwrap().message, msg);
    }

    #[test]
    fn modem_round_trip(name in prop::sample::select(vec!["bpsk", "qpsk", "8psk", "4qam", "16qam", "64qam", "256qam"]), seed in any::<u64>()) {
        let c = Constellation::from_name(name).unwrap();
        let n = c.bits_per_symbol() as usize * 40;
        let b = phylab::rng::SplitMix64::new(seed).bits(n);
        prop_assert_eq!(c.demodulate_hard(&c.modulate(&b).unwrap()), b);
    }

    #[test]
    fn fft_round_trip(log_n in 0u32..10, seed in any::<u64>()) {
        let n = 1usize << log_n;
        let mut r = phylab::rng::SplitMix64::new(seed);
        let x: Vec<Complex64> = (0..n).map(|_| Complex64::new(r.next_f64(), r.next_f64())).collect();
        let y = fft(&fft(&x, Direction::Forward).unwrap(), Direction::Inverse).unwrap();
        for (a, b) in x.iter().zip(&y) {
            prop_assert!((a - b).norm() < 1e-10);
        }
    }

    #[test]
    fn evm_scale_invariance(seed in any::<u64>(), c in 0.01f64..100.0, phase in 0.0f64..std::f64::consts::TAU) {
        let mut r = phylab::rng::SplitMix64::new(seed);
        let mut point = || Complex64::new(r.next_f64() - 0.5, r.next_f64() - 0.5);
        let s: Vec<Vec<Complex64>> = (0..4).map(|_| (0..8).map(|_| point()).collect()).collect();
        let rx: Vec<Vec<Complex64>> = s.iter().map(|row| row.iter().map(|&v| v + point() * 0.1).collect()).collect();
        let base = evm(&rx, &s, -19.0).unwrap().evm_ratio;
        let k = Complex64::from_polar(c, phase);
        let scale = |g: &Vec<Vec<Complex64>>| -> Vec<Vec<Complex64>> { g.iter().map(|row| row.iter().map(|&v| v * k).collect()).collect() };
        prop_assert!((evm(&scale(&rx), &scale(&s), -19.0).unwrap().evm_ratio / base - 1.0).abs() < 1e-9);
        let stretched: Vec<Vec<Complex64>> = rx.iter().zip(&s).map(|(a, b)| a.iter().zip(b).map(|(&x, &y)| y + (x - y) * c).collect()).collect();
        prop_assert!((evm(&stretched, &s, -19.0).unwrap().evm_ratio / (base * c) - 1.0).abs() < 1e-9);
    }

    #[test]
    fn csv_round_trip(rows in prop::collection::vec((0u64..1_000_000, any::<u64>(), -30.0f64..40.0), 1..20)) {
        let recs: Vec<BerRecord> = rows
            .iter()
            .map(|&(bits, seed, x)| {
                let mut r = BerRecord::new(bits + 1, (seed % (bits + 2)).min(bits + 1));
                r.chain = "ofdm_qam".into();
                r.modulation = "16qam".into();
                r.family = "qam".into();
                r.code_rate = "3/4".into();
                r.snr_db = Some(x);
                r.ebn0_db = Some(x - 4.77);
                r.seed = seed;
                r
            })
            .collect();
        let mut buf = Vec::new();
        write_records(&recs, Format::Csv, &mut buf).unwrap();
        prop_assert_eq!(parse_csv(std::str::from_utf8(&buf).unwrap()).unwrap(), recs);
    }

    #[test]
    fn error_count_is_symmetric(a in bits(500), seed in any::<u64>()) {
        let b: Vec<u8> = phylab::rng::SplitMix64::new(seed).bits(a.len());
        let ab = phylab::metrics::count_errors(&a, &b).unwrap();
        let ba = phylab::metrics::count_errors(&b, &a).unwrap();
        prop_assert_eq!(ab, ba);
    }
}
