use std::cmp::Reverse;
use std::collections::{BTreeMap, BinaryHeap};

use crate::error::{Error, Result};

use super::{PuncturePattern, Trellis};

/// Distance spectrum of a (possibly punctured) convolutional code.
///
/// `omega[d]` is the total information-bit weight of all error events with
/// output Hamming weight `d`, summed over every puncturing phase at which an
/// event can start and expressed per `rate.0` information bits, so that the
/// union bound for a rate `(n-1)/n` code is `1/(2(n-1)) Σ ω_d erfc(...)`.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightSpectrum {
    pub d_free: u32,
    pub omega: BTreeMap<u32, f64>,
    /// Reduced code rate `(num, den)` the spectrum is normalized to.
    pub rate: (usize, usize),
}

impl WeightSpectrum {
    pub fn d_max(&self) -> Option<u32> {
        self.omega.keys().next_back().copied()
    }

    pub fn omega(&self, d: u32) -> f64 {
        self.omega.get(&d).copied().unwrap_or(0.0)
    }
}

fn branch_weight(
    trellis: &Trellis,
    pattern: &PuncturePattern,
    state: usize,
    input: u8,
    phase: usize,
) -> u32 {
    let n = trellis.outputs();
    let label = trellis.output_label(state, input);
    let mask = pattern.mask();
    (0..n)
        .filter(|&j| mask[phase * n + j] && (label >> j) & 1 == 1)
        .count() as u32
}

/// Free distance over the period-extended trellis (shortest error event
/// from any puncturing phase).
pub fn free_distance(trellis: &Trellis, pattern: &PuncturePattern) -> Result<u32> {
    let p = pattern.inputs_per_period(trellis.outputs())?;
    let ns = trellis.num_states();
    let mut best = u32::MAX;
    for start in 0..p {
        // Dijkstra over (state, phase); state 0 is the absorbing target.
        let mut dist = vec![u32::MAX; ns * p];
        let mut heap = BinaryHeap::new();
        let w0 = branch_weight(trellis, pattern, 0, 1, start);
        let s0 = trellis.next_state(0, 1);
        let ph0 = (start + 1) % p;
        dist[s0 * p + ph0] = w0;
        heap.push(Reverse((w0, s0, ph0)));
        while let Some(Reverse((w, s, ph))) = heap.pop() {
            if w > dist[s * p + ph] || w >= best {
                continue;
            }
            for input in 0..2u8 {
                let nw = w + branch_weight(trellis, pattern, s, input, ph);
                let nsx = trellis.next_state(s, input);
                let nph = (ph + 1) % p;
                if nsx == 0 {
                    best = best.min(nw);
                } else if nw < dist[nsx * p + nph] {
                    dist[nsx * p + nph] = nw;
                    heap.push(Reverse((nw, nsx, nph)));
                }
            }
        }
    }
    if best == u32::MAX {
        return Err(Error::Catastrophic);
    }
    Ok(best)
}

/// Computes `ω_d` for `d_free <= d <= d_max` by dynamic programming over
/// the product of encoder state and puncturing phase.
pub fn distance_spectrum(
    trellis: &Trellis,
    pattern: &PuncturePattern,
    d_max: u32,
) -> Result<WeightSpectrum> {
    if d_max < 1 {
        return Err(Error::InvalidParameter("d_max must be at least 1".into()));
    }
    let n = trellis.outputs();
    let p = pattern.inputs_per_period(n)?;
    let rate = pattern.rate(n)?;
    let d_free = free_distance(trellis, pattern)?;
    if d_max < d_free {
        return Err(Error::EmptySpectrum { d_free, d_max });
    }
    let ns = trellis.num_states();
    let dm = d_max as usize;
    let cells = ns * p * (dm + 1);
    let idx = |s: usize, ph: usize, w: usize| (s * p + ph) * (dm + 1) + w;
    // Longer paths than this necessarily exceed d_max unless a zero-weight
    // cycle exists.
    let max_steps = ns * p * (dm + 2) + 1;

    let mut totals = vec![0.0f64; dm + 1];
    for start in 0..p {
        // (path count, accumulated information weight)
        let mut cur = vec![(0.0f64, 0.0f64); cells];
        let mut next = vec![(0.0f64, 0.0f64); cells];
        let w0 = branch_weight(trellis, pattern, 0, 1, start) as usize;
        if w0 <= dm {
            cur[idx(trellis.next_state(0, 1), (start + 1) % p, w0)] = (1.0, 1.0);
        }
        let mut steps = 0;
        loop {
            let mut live = false;
            next.iter_mut().for_each(|c| *c = (0.0, 0.0));
            for s in 1..ns {
                for ph in 0..p {
                    for w in 0..=dm {
                        let (count, info) = cur[idx(s, ph, w)];
                        if count == 0.0 {
                            continue;
                        }
                        for input in 0..2u8 {
                            let nw = w + branch_weight(trellis, pattern, s, input, ph) as usize;
                            if nw > dm {
                                continue;
                            }
                            let ninfo = info + input as f64 * count;
                            let nsx = trellis.next_state(s, input);
                            if nsx == 0 {
                                totals[nw] += ninfo;
                            } else {
                                let c = &mut next[idx(nsx, (ph + 1) % p, nw)];
                                c.0 += count;
                                c.1 += ninfo;
                                live = true;
                            }
                        }
                    }
                }
            }
            std::mem::swap(&mut cur, &mut next);
            if !live {
                break;
            }
            steps += 1;
            if steps > max_steps {
                return Err(Error::Catastrophic);
            }
        }
    }
    // Per-period totals over p phases, rescaled to rate.0 information bits.
    let scale = rate.0 as f64 / p as f64;
    let omega = (d_free..=d_max)
        .map(|d| (d, totals[d as usize] * scale))
        .collect();
    Ok(WeightSpectrum {
        d_free,
        omega,
        rate,
    })
}

/// Union bound on the bit error rate of a rate `(n-1)/n` punctured code
/// under soft-decision decoding on an AWGN channel:
/// `P_b <= 1/(2(n-1)) Σ_d ω_d erfc(√(r d Eb/N0))`, truncated at the
/// spectrum's largest distance and clamped to `[0, 1]`.
pub fn punctured_bound_ber(
    rate_num: usize,
    rate_den: usize,
    spectrum: &WeightSpectrum,
    ebn0_db: f64,
) -> Result<f64> {
    if rate_num == 0 || rate_den != rate_num + 1 {
        return Err(Error::InvalidParameter(format!(
            "bound needs a rate of the form (n-1)/n, got {rate_num}/{rate_den}"
        )));
    }
    if spectrum.omega.is_empty() {
        return Err(Error::EmptySpectrum {
            d_free: spectrum.d_free,
            d_max: 0,
        });
    }
    if spectrum.rate != (rate_num, rate_den) {
        return Err(Error::InvalidParameter(format!(
            "spectrum was computed for rate {}/{}, not {rate_num}/{rate_den}",
            spectrum.rate.0, spectrum.rate.1
        )));
    }
    let r = rate_num as f64 / rate_den as f64;
    let ebn0 = 10f64.powf(ebn0_db / 10.0);
    let sum: f64 = spectrum
        .omega
        .iter()
        .map(|(&d, &w)| w * libm::erfc((r * d as f64 * ebn0).sqrt()))
        .sum();
    Ok((sum / (2.0 * rate_num as f64)).clamp(0.0, 1.0))
}

/// Default truncation: ten distances past the free distance.
pub fn default_d_max(d_free: u32) -> u32 {
    d_free + 10
}
