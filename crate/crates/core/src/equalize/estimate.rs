use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Number of frequency points in [`ChannelEstimate::freq_response`].
pub const RESPONSE_POINTS: usize = 64;

/// FIR channel estimate and its sampled frequency response.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelEstimate {
    pub taps: Vec<Complex64>,
    /// `H(k) = Σ_i h_i e^{-j2πki/N}` for `k = 0..N`.
    pub freq_response: Vec<Complex64>,
    /// Mean squared residual over the training fit.
    pub residual: f64,
}

impl ChannelEstimate {
    /// Wraps known taps (zero residual).
    pub fn from_taps(taps: Vec<Complex64>) -> Self {
        let freq_response = frequency_response(&taps, RESPONSE_POINTS);
        Self {
            taps,
            freq_response,
            residual: 0.0,
        }
    }

    pub fn memory(&self) -> usize {
        self.taps.len().saturating_sub(1)
    }

    pub fn magnitude(&self) -> Vec<f64> {
        self.freq_response.iter().map(|h| h.norm()).collect()
    }

    pub fn phase(&self) -> Vec<f64> {
        self.freq_response.iter().map(|h| h.arg()).collect()
    }
}

pub fn frequency_response(taps: &[Complex64], points: usize) -> Vec<Complex64> {
    (0..points)
        .map(|k| {
            taps.iter()
                .enumerate()
                .map(|(i, h)| {
                    h * Complex64::from_polar(1.0, -2.0 * PI * (k * i) as f64 / points as f64)
                })
                .sum()
        })
        .collect()
}

/// Least-squares FIR estimate of order `order` (memory `L`, `L+1` taps)
/// from known training symbols, using the fully-populated rows
/// `t = L .. len` so that a rank-deficient training sequence is detected.
pub fn estimate_channel_ls(
    tx_training: &[Complex64],
    rx_training: &[Complex64],
    order: usize,
) -> Result<ChannelEstimate> {
    let taps = order + 1;
    if tx_training.len() != rx_training.len() {
        return Err(Error::Alignment(
            "training sequences differ in length".into(),
        ));
    }
    if tx_training.len() < 4 * taps {
        return Err(Error::InvalidParameter(format!(
            "training length {} is shorter than 4(L+1) = {}",
            tx_training.len(),
            4 * taps
        )));
    }
    // Normal equations G h = b with G = A^H A, b = A^H r.
    let mut g = vec![vec![Complex64::default(); taps]; taps];
    let mut b = vec![Complex64::default(); taps];
    for t in order..tx_training.len() {
        for i in 0..taps {
            let ai = tx_training[t - i];
            b[i] += ai.conj() * rx_training[t];
            for j in 0..taps {
                g[i][j] += ai.conj() * tx_training[t - j];
            }
        }
    }
    let h = solve(g, b)?;
    let rows = tx_training.len() - order;
    let residual = (order..tx_training.len())
        .map(|t| {
            let pred: Complex64 = (0..taps).map(|i| h[i] * tx_training[t - i]).sum();
            (rx_training[t] - pred).norm_sqr()
        })
        .sum::<f64>()
        / rows as f64;
    let freq_response = frequency_response(&h, RESPONSE_POINTS);
    Ok(ChannelEstimate {
        taps: h,
        freq_response,
        residual,
    })
}

/// Gaussian elimination with partial pivoting on a Hermitian system.
fn solve(mut a: Vec<Vec<Complex64>>, mut b: Vec<Complex64>) -> Result<Vec<Complex64>> {
    let n = b.len();
    let scale = (0..n).map(|i| a[i][i].norm()).fold(0.0, f64::max);
    if scale == 0.0 {
        return Err(Error::IllConditioned(
            "training sequence is all zero".into(),
        ));
    }
    for col in 0..n {
        let piv = (col..n)
            .max_by(|&x, &y| a[x][col].norm().total_cmp(&a[y][col].norm()))
            .unwrap();
        if a[piv][col].norm() < 1e-10 * scale {
            return Err(Error::IllConditioned(format!(
                "normal equations are singular at column {col}; training is not persistently exciting"
            )));
        }
        a.swap(col, piv);
        b.swap(col, piv);
        for row in col + 1..n {
            let f = a[row][col] / a[col][col];
            for k in col..n {
                let v = a[col][k];
                a[row][k] -= f * v;
            }
            let v = b[col];
            b[row] -= f * v;
        }
    }
    let mut x = vec![Complex64::default(); n];
    for row in (0..n).rev() {
        let s: Complex64 = (row + 1..n).map(|k| a[row][k] * x[k]).sum();
        x[row] = (b[row] - s) / a[row][row];
    }
    Ok(x)
}
