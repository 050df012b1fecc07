use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::modem::Constellation;

use super::{EqKind, EqualizerConfig};

const DIVERGENCE_NORM: f64 = 1e6;

/// LMS-adapted transversal equalizer with an optional decision-feedback
/// section. With `fb_taps = 0` it is exactly the linear equalizer.
///
/// Output `n` estimates transmitted symbol `n`: the feedforward filter sees
/// `rx[n + D - j]` for `j = 0..ff_taps` where `D = reference_tap`, with zeros
/// past either end of the block. The first `training_len` outputs adapt
/// against the known symbols; after that the filter is decision-directed.
#[derive(Debug, Clone)]
pub struct AdaptiveEqualizer {
    ff: Vec<Complex64>,
    fb: Vec<Complex64>,
    step: f64,
    delay: usize,
}

impl AdaptiveEqualizer {
    pub fn new(cfg: &EqualizerConfig) -> Result<Self> {
        cfg.validate()?;
        let fb_taps = if cfg.kind == EqKind::Dfe {
            cfg.fb_taps
        } else {
            0
        };
        let mut ff = vec![Complex64::default(); cfg.ff_taps];
        ff[cfg.reference_tap] = Complex64::new(1.0, 0.0);
        Ok(Self {
            ff,
            fb: vec![Complex64::default(); fb_taps],
            step: cfg.step_size,
            delay: cfg.reference_tap,
        })
    }

    pub fn feedforward(&self) -> &[Complex64] {
        &self.ff
    }

    pub fn feedback(&self) -> &[Complex64] {
        &self.fb
    }

    pub fn run(
        &mut self,
        rx: &[Complex64],
        training: &[Complex64],
        constellation: &Constellation,
    ) -> Result<Vec<Complex64>> {
        let n = rx.len();
        let mut out = Vec::with_capacity(n);
        let mut decisions: Vec<Complex64> = Vec::with_capacity(n);
        let sample = |i: isize| -> Complex64 {
            if i >= 0 && (i as usize) < n {
                rx[i as usize]
            } else {
                Complex64::default()
            }
        };
        for t in 0..n {
            let mut y = Complex64::default();
            for (j, w) in self.ff.iter().enumerate() {
                y += w * sample(t as isize + self.delay as isize - j as isize);
            }
            for (i, b) in self.fb.iter().enumerate() {
                if t > i {
                    y += b * decisions[t - 1 - i];
                }
            }
            let d = if t < training.len() {
                training[t]
            } else {
                constellation.point(constellation.nearest(y))
            };
            let e = d - y;
            if self.step != 0.0 {
                let mu_e = e * self.step;
                for (j, w) in self.ff.iter_mut().enumerate() {
                    *w += mu_e * sample(t as isize + self.delay as isize - j as isize).conj();
                }
                for (i, b) in self.fb.iter_mut().enumerate() {
                    if t > i {
                        *b += mu_e * decisions[t - 1 - i].conj();
                    }
                }
                let norm = self
                    .ff
                    .iter()
                    .chain(&self.fb)
                    .map(|w| w.norm_sqr())
                    .sum::<f64>()
                    .sqrt();
                if !(norm <= DIVERGENCE_NORM) {
                    return Err(Error::Divergence(norm));
                }
            }
            decisions.push(d);
            out.push(y);
        }
        Ok(out)
    }
}

/// Linear LMS equalizer. Returns one soft estimate per received sample.
pub fn equalize_linear(
    rx: &[Complex64],
    training: &[Complex64],
    cfg: &EqualizerConfig,
    constellation: &Constellation,
) -> Result<Vec<Complex64>> {
    if cfg.kind != EqKind::Linear {
        return Err(Error::Config(format!(
            "equalize_linear called with kind {:?}",
            cfg.kind
        )));
    }
    AdaptiveEqualizer::new(cfg)?.run(rx, training, constellation)
}

/// Decision-feedback LMS equalizer.
pub fn equalize_dfe(
    rx: &[Complex64],
    training: &[Complex64],
    cfg: &EqualizerConfig,
    constellation: &Constellation,
) -> Result<Vec<Complex64>> {
    if cfg.kind != EqKind::Dfe {
        return Err(Error::Config(format!(
            "equalize_dfe called with kind {:?}",
            cfg.kind
        )));
    }
    AdaptiveEqualizer::new(cfg)?.run(rx, training, constellation)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{awgn, FirChannel};
    use crate::rng::SplitMix64;

    fn bpsk(n: usize, seed: u64) -> (Constellation, Vec<Complex64>) {
        let c = Constellation::from_name("bpsk").unwrap();
        let s = c.modulate(&SplitMix64::new(seed).bits(n)).unwrap();
        (c, s)
    }

    #[test]
    fn identity_channel_passthrough() {
        let (c, tx) = bpsk(3000, 1);
        for kind in [EqKind::Linear, EqKind::Dfe] {
            let cfg = EqualizerConfig::new(kind);
            let y = AdaptiveEqualizer::new(&cfg)
                .unwrap()
                .run(&tx, &tx[..500], &c)
                .unwrap();
            let rms = (y[500..]
                .iter()
                .zip(&tx[500..])
                .map(|(a, b)| (a - b).norm_sqr())
                .sum::<f64>()
                / 2500.0)
                .sqrt();
            assert!(rms < 0.01, "{kind:?}: {rms}");
        }
    }

    #[test]
    fn zero_step_freezes_taps() {
        let (c, tx) = bpsk(500, 2);
        let rx = FirChannel::default_dispersive().apply(&tx);
        let mut cfg = EqualizerConfig::new(EqKind::Dfe);
        cfg.step_size = 0.0;
        let mut eq = AdaptiveEqualizer::new(&cfg).unwrap();
        let before = (eq.feedforward().to_vec(), eq.feedback().to_vec());
        eq.run(&rx, &tx[..100], &c).unwrap();
        assert_eq!(before, (eq.feedforward().to_vec(), eq.feedback().to_vec()));
    }

    #[test]
    fn dfe_without_feedback_is_linear() {
        let (c, tx) = bpsk(2000, 3);
        let rx = awgn(&FirChannel::default_dispersive().apply(&tx), 8.0, 1.0, 4).unwrap();
        let lin = EqualizerConfig::new(EqKind::Linear);
        let mut dfe = lin.clone();
        dfe.kind = EqKind::Dfe;
        dfe.fb_taps = 0;
        let a = equalize_linear(&rx, &tx[..500], &lin, &c).unwrap();
        let b = equalize_dfe(&rx, &tx[..500], &dfe, &c).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn divergence_is_reported() {
        let (c, tx) = bpsk(2000, 5);
        let rx: Vec<_> = tx.iter().map(|s| s * 40.0).collect();
        let mut cfg = EqualizerConfig::new(EqKind::Linear);
        cfg.step_size = 0.9;
        assert!(matches!(
            AdaptiveEqualizer::new(&cfg)
                .unwrap()
                .run(&rx, &tx[..500], &c),
            Err(Error::Divergence(_))
        ));
    }

    #[test]
    fn wrong_kind_rejected() {
        let (c, tx) = bpsk(100, 6);
        let cfg = EqualizerConfig::new(EqKind::Dfe);
        assert!(equalize_linear(&tx, &tx, &cfg, &c).is_err());
    }
}
