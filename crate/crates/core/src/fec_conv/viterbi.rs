use crate::error::{Error, Result};

use super::Trellis;

/// Branch metric used by the decoder.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Decision {
    /// Hamming distance between the metric signs and the branch label.
    Hard,
    /// Negative correlation between the real metrics and the ±1 label.
    Soft,
}

/// Sliding-window Viterbi decoder.
///
/// Input metrics follow the LLR convention: positive means bit 0 is more
/// likely, `0.0` is an erasure and contributes nothing to any branch. On equal
/// path metrics the lower-numbered predecessor wins, and the survivor is
/// traced back from the lowest-numbered best state.
#[derive(Debug, Clone)]
pub struct ViterbiDecoder<'a> {
    trellis: &'a Trellis,
    decision: Decision,
    traceback: usize,
    terminated: bool,
}

impl<'a> ViterbiDecoder<'a> {
    pub fn new(trellis: &'a Trellis, decision: Decision, traceback: usize) -> Result<Self> {
        if traceback < 1 {
            return Err(Error::InvalidParameter(
                "traceback depth must be at least 1".into(),
            ));
        }
        Ok(Self {
            trellis,
            decision,
            traceback,
            terminated: false,
        })
    }

    /// Final traceback starts from state 0 (the encoder was flushed).
    pub fn terminated(mut self, terminated: bool) -> Self {
        self.terminated = terminated;
        self
    }

    /// Decodes one bit per `n` metrics.
    pub fn decode(&self, metrics: &[f64]) -> Result<Vec<u8>> {
        let t = self.trellis;
        let n = t.outputs();
        if !metrics.len().is_multiple_of(n) {
            return Err(Error::Alignment(format!(
                "{} metrics is not a multiple of the {n} encoder outputs",
                metrics.len()
            )));
        }
        let steps = metrics.len() / n;
        if steps == 0 {
            return Ok(Vec::new());
        }
        let ns = t.num_states();
        let words = ns.div_ceil(64);
        let labels = 1usize << n;

        // Per state: the two predecessors, their branch labels and the input bit.
        let branches: Vec<(usize, usize, usize, usize)> = (0..ns)
            .map(|s| {
                let ([p0, p1], input) = t.predecessors(s);
                (
                    p0,
                    p1,
                    t.output_label(p0, input) as usize,
                    t.output_label(p1, input) as usize,
                )
            })
            .collect();

        let mut pm = vec![f64::INFINITY; ns];
        pm[0] = 0.0;
        let mut next = vec![0.0; ns];
        let mut bm = vec![0.0; labels];
        let mut decisions = vec![0u64; steps * words];
        let mut out = Vec::with_capacity(steps);
        let chunk = self.traceback;

        for step in 0..steps {
            let m = &metrics[step * n..(step + 1) * n];
            for (label, slot) in bm.iter_mut().enumerate() {
                *slot = self.branch_metric(m, label);
            }
            let dec = &mut decisions[step * words..(step + 1) * words];
            for (s, &(p0, p1, l0, l1)) in branches.iter().enumerate() {
                let m0 = pm[p0] + bm[l0];
                let m1 = pm[p1] + bm[l1];
                if m1 < m0 {
                    next[s] = m1;
                    dec[s / 64] |= 1 << (s % 64);
                } else {
                    next[s] = m0;
                }
            }
            std::mem::swap(&mut pm, &mut next);
            if step % 256 == 255 {
                let min = pm.iter().copied().fold(f64::INFINITY, f64::min);
                pm.iter_mut().for_each(|x| *x -= min);
            }

            let processed = step + 1;
            if processed - out.len() >= self.traceback + chunk {
                let start = best_state(&pm);
                let emit_to = processed - self.traceback;
                self.trace(
                    &decisions,
                    words,
                    start,
                    processed,
                    out.len(),
                    emit_to,
                    &mut out,
                );
            }
        }

        let start = if self.terminated { 0 } else { best_state(&pm) };
        let emitted = out.len();
        self.trace(&decisions, words, start, steps, emitted, steps, &mut out);
        Ok(out)
    }

    #[inline]
    fn branch_metric(&self, m: &[f64], label: usize) -> f64 {
        match self.decision {
            Decision::Soft => m
                .iter()
                .enumerate()
                .map(|(j, &x)| if (label >> j) & 1 == 1 { x } else { -x })
                .sum(),
            Decision::Hard => m
                .iter()
                .enumerate()
                .filter(|&(j, &x)| x != 0.0 && ((x < 0.0) != ((label >> j) & 1 == 1)))
                .count() as f64,
        }
    }

    /// Traces back from `start` at the end of step `end - 1` and appends the
    /// decided bits for steps `from..to`.
    #[allow(clippy::too_many_arguments)]
    fn trace(
        &self,
        decisions: &[u64],
        words: usize,
        start: usize,
        end: usize,
        from: usize,
        to: usize,
        out: &mut Vec<u8>,
    ) {
        let mem = self.trellis.memory();
        let mask = self.trellis.num_states() - 1;
        let mut state = start;
        let mut bits = vec![0u8; to - from];
        for step in (from..end).rev() {
            if step < to {
                bits[step - from] = (state >> (mem - 1)) as u8;
            }
            let d = (decisions[step * words + state / 64] >> (state % 64)) & 1;
            state = ((state << 1) & mask) | d as usize;
        }
        out.extend_from_slice(&bits);
    }
}

fn best_state(pm: &[f64]) -> usize {
    let mut best = 0;
    for (s, &v) in pm.iter().enumerate() {
        if v < pm[best] {
            best = s;
        }
    }
    best
}

/// Decodes with an unterminated final traceback.
pub fn viterbi_decode(
    trellis: &Trellis,
    metrics: &[f64],
    decision: Decision,
    traceback_depth: usize,
) -> Result<Vec<u8>> {
    ViterbiDecoder::new(trellis, decision, traceback_depth)?.decode(metrics)
}

/// Default traceback depth: `5(K-1)`, or `12(K-1)` when punctured.
pub fn default_traceback(trellis: &Trellis, punctured: bool) -> usize {
    trellis.memory() * if punctured { 12 } else { 5 }
}

/// Maps hard bits to unit-magnitude metrics (`0 -> +1`, `1 -> -1`).
pub fn bits_to_metrics(bits: &[u8]) -> Vec<f64> {
    bits.iter()
        .map(|&b| if b == 0 { 1.0 } else { -1.0 })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fec_conv::PuncturePattern;
    use crate::rng::SplitMix64;

    #[test]
    fn noiseless_round_trip_k7() {
        let t = Trellis::new(7, &[133, 171]).unwrap();
        let bits = SplitMix64::new(1).bits(10_000);
        let coded = t.encode(&bits, true);
        for d in [Decision::Hard, Decision::Soft] {
            let dec = ViterbiDecoder::new(&t, d, 30).unwrap().terminated(true);
            let out = dec.decode(&bits_to_metrics(&coded)).unwrap();
            assert_eq!(&out[..bits.len()], &bits[..]);
            assert!(out[bits.len()..].iter().all(|&b| b == 0));
        }
    }

    #[test]
    fn unterminated_round_trip() {
        let t = Trellis::new(7, &[133, 171]).unwrap();
        let bits = SplitMix64::new(2).bits(777);
        let coded = t.encode(&bits, false);
        let out = viterbi_decode(&t, &bits_to_metrics(&coded), Decision::Soft, 30).unwrap();
        assert_eq!(out, bits);
    }

    #[test]
    fn punctured_round_trip() {
        let t = Trellis::new(7, &[133, 171]).unwrap();
        let p = PuncturePattern::from_text("111001").unwrap();
        let bits = SplitMix64::new(3).bits(3000);
        let coded = t.encode(&bits, true);
        let tx = p.puncture(&bits_to_metrics(&coded)).unwrap();
        let rx = p.depuncture(&tx).unwrap();
        for d in [Decision::Hard, Decision::Soft] {
            let out = ViterbiDecoder::new(&t, d, default_traceback(&t, true))
                .unwrap()
                .terminated(true)
                .decode(&rx)
                .unwrap();
            assert_eq!(&out[..bits.len()], &bits[..]);
        }
    }

    #[test]
    fn k3_corrects_every_single_flip() {
        let t = Trellis::new(3, &[7, 5]).unwrap();
        let bits = SplitMix64::new(4).bits(50);
        let coded = t.encode(&bits, true);
        for pos in 0..coded.len() {
            let mut rx = coded.clone();
            rx[pos] ^= 1;
            let out = ViterbiDecoder::new(&t, Decision::Hard, 15)
                .unwrap()
                .terminated(true)
                .decode(&bits_to_metrics(&rx))
                .unwrap();
            assert_eq!(&out[..50], &bits[..], "flip at {pos}");
        }
    }

    #[test]
    fn empty_and_bad_input() {
        let t = Trellis::new(3, &[7, 5]).unwrap();
        assert!(viterbi_decode(&t, &[], Decision::Soft, 10)
            .unwrap()
            .is_empty());
        assert!(matches!(
            viterbi_decode(&t, &[1.0], Decision::Soft, 10),
            Err(Error::Alignment(_))
        ));
        assert!(matches!(
            viterbi_decode(&t, &[1.0, 1.0], Decision::Soft, 0),
            Err(Error::InvalidParameter(_))
        ));
    }

    #[test]
    fn short_traceback_still_decodes_clean_input() {
        let t = Trellis::new(7, &[133, 171]).unwrap();
        let bits = SplitMix64::new(5).bits(500);
        let coded = t.encode(&bits, false);
        let out = viterbi_decode(&t, &bits_to_metrics(&coded), Decision::Hard, 1).unwrap();
        assert_eq!(out, bits);
    }
}
