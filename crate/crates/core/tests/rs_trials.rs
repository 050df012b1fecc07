use phylab::fec_rs::RsCode;
use phylab::rng::SplitMix64;

fn trials(code: &RsCode, count: usize, seed: u64) {
    let mut rng = SplitMix64::new(seed);
    let q = 1u64 << code.m();
    for e in 0..=code.t() {
        for _ in 0..count {
            let msg: Vec<u8> = (0..code.k()).map(|_| (rng.next_u64() % q) as u8).collect();
            let cw = code.encode(&msg).unwrap();
            assert!(code.syndromes(&cw).iter().all(|&s| s == 0));
            let mut rx = cw.clone();
            let mut positions: Vec<usize> = Vec::new();
            while positions.len() < e {
                let p = (rng.next_u64() % code.n() as u64) as usize;
                if !positions.contains(&p) {
                    positions.push(p);
                }
            }
            for &p in &positions {
                rx[p] ^= 1 + (rng.next_u64() % (q - 1)) as u8;
            }
            let d = code.decode(&rx).unwrap();
            assert_eq!(d.message, msg);
            assert_eq!(d.corrected, e);
        }
    }
}

#[test]
fn rs_7_5_corrects_up_to_t() {
    trials(&RsCode::new(3, 7, 5).unwrap(), 10_000, 1);
}

#[test]
fn rs_15_9_corrects_up_to_t() {
    trials(&RsCode::new(4, 15, 9).unwrap(), 10_000, 2);
}

#[test]
fn rs_7_5_double_errors_never_claim_two_corrections() {
    let code = RsCode::new(3, 7, 5).unwrap();
    let mut rng = SplitMix64::new(3);
    for _ in 0..10_000 {
        let msg: Vec<u8> = (0..5).map(|_| (rng.next_u64() % 8) as u8).collect();
        let mut rx = code.encode(&msg).unwrap();
        let a = (rng.next_u64() % 7) as usize;
        let b = (a + 1 + (rng.next_u64() % 6) as usize) % 7;
        rx[a] ^= 1 + (rng.next_u64() % 7) as u8;
        rx[b] ^= 1 + (rng.next_u64() % 7) as u8;
        match code.decode(&rx) {
            Ok(d) => {
                assert!(d.corrected <= 1);
                assert_ne!(d.message, msg);
            }
            Err(phylab::Error::DecodeFailure) => {}
            Err(e) => panic!("unexpected error {e}"),
        }
    }
}
