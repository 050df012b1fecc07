use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::modem::Constellation;

use super::ChannelEstimate;

/// Largest channel trellis the MLSE equalizer will build.
pub const MAX_STATES: usize = 4096;

/// Viterbi search over the `M^L`-state channel trellis with branch metric
/// `|r_t - Σ_i h_i s_{t-i}|²`. Symbols before the block are taken as zero.
/// Returns the Gray bits of the decided symbols.
///
/// Decisions are released with a sliding window of `traceback` symbols; a
/// window at least as long as the block gives the exact block ML sequence.
pub fn equalize_mlse(
    rx: &[Complex64],
    est: &ChannelEstimate,
    constellation: &Constellation,
    traceback: usize,
) -> Result<Vec<u8>> {
    let labels = mlse_labels(rx, est, constellation, traceback)?;
    let k = constellation.bits_per_symbol();
    Ok(labels
        .iter()
        .flat_map(|&l| (0..k).rev().map(move |i| ((l >> i) & 1) as u8))
        .collect())
}

/// As [`equalize_mlse`] but returns constellation labels.
pub fn mlse_labels(
    rx: &[Complex64],
    est: &ChannelEstimate,
    constellation: &Constellation,
    traceback: usize,
) -> Result<Vec<usize>> {
    let m = constellation.order();
    let l = est.memory();
    if est.taps.is_empty() {
        return Err(Error::Config("channel estimate has no taps".into()));
    }
    let states = m
        .checked_pow(l as u32)
        .filter(|&s| s <= MAX_STATES)
        .ok_or_else(|| {
            Error::Config(format!(
                "MLSE trellis of {m}^{l} states exceeds {MAX_STATES}"
            ))
        })?;
    if traceback < l.max(1) {
        return Err(Error::InvalidParameter(format!(
            "MLSE traceback {traceback} is shorter than the channel memory {l}"
        )));
    }
    let n = rx.len();
    if n == 0 {
        return Ok(Vec::new());
    }
    let pts = constellation.points();
    let h = &est.taps;
    // State = (s_{t-1}, ..., s_{t-L}) as base-M digits, s_{t-1} most significant.
    let top = if l == 0 { 1 } else { m.pow(l as u32 - 1) };
    let digit = |state: usize, i: usize| -> usize {
        // i = 1..=L picks s_{t-i}
        (state / m.pow((l - i) as u32)) % m
    };
    let isi_full: Vec<Complex64> = (0..states)
        .map(|s| (1..=l).map(|i| h[i] * pts[digit(s, i)]).sum())
        .collect();

    let mut pm = vec![0.0f64; states];
    let mut next = vec![0.0f64; states];
    // decisions[t * states + ns] = dropped oldest digit of the chosen predecessor
    let mut decisions = vec![0u16; n * states];
    let mut out: Vec<usize> = Vec::with_capacity(n);

    for t in 0..n {
        let r = rx[t];
        for ns in 0..states {
            let a = if l == 0 { ns } else { ns / top };
            let base = if l == 0 { 0 } else { (ns % top) * m };
            let mut best = f64::INFINITY;
            let mut arg = 0usize;
            for x in 0..if l == 0 { 1 } else { m } {
                let prev = base + x;
                let isi = if t >= l {
                    isi_full[prev]
                } else {
                    (1..=t).map(|i| h[i] * pts[digit(prev, i)]).sum()
                };
                let (metric, sym) = if l == 0 {
                    // Single-state trellis: the choice is the symbol itself.
                    let mut best_sym = 0;
                    let mut best_d = f64::INFINITY;
                    for (label, p) in pts.iter().enumerate() {
                        let d = (r - h[0] * p).norm_sqr();
                        if d < best_d {
                            best_d = d;
                            best_sym = label;
                        }
                    }
                    (pm[0] + best_d, best_sym)
                } else {
                    (pm[prev] + (r - h[0] * pts[a] - isi).norm_sqr(), x)
                };
                if metric < best {
                    best = metric;
                    arg = sym;
                }
            }
            next[ns] = best;
            decisions[t * states + ns] = arg as u16;
        }
        std::mem::swap(&mut pm, &mut next);
        let min = pm.iter().copied().fold(f64::INFINITY, f64::min);
        pm.iter_mut().for_each(|v| *v -= min);

        let processed = t + 1;
        if processed - out.len() >= 2 * traceback {
            let start = best_state(&pm);
            let to = processed - traceback;
            trace(
                &decisions,
                states,
                l,
                m,
                top,
                start,
                processed,
                out.len(),
                to,
                &mut out,
            );
        }
    }
    let start = best_state(&pm);
    let from = out.len();
    trace(&decisions, states, l, m, top, start, n, from, n, &mut out);
    Ok(out)
}

#[allow(clippy::too_many_arguments)]
fn trace(
    decisions: &[u16],
    states: usize,
    l: usize,
    m: usize,
    top: usize,
    start: usize,
    end: usize,
    from: usize,
    to: usize,
    out: &mut Vec<usize>,
) {
    let mut labels = vec![0usize; to - from];
    let mut state = start;
    for t in (from..end).rev() {
        let d = decisions[t * states + state] as usize;
        if l == 0 {
            if t < to {
                labels[t - from] = d;
            }
            continue;
        }
        if t < to {
            labels[t - from] = state / top;
        }
        state = (state % top) * m + d;
    }
    out.extend_from_slice(&labels);
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
