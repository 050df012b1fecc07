//! Gray-labelled PSK and square QAM constellations with hard and max-log
//! soft demapping.
//!
//! Bits are grouped MSB-first into labels. PSK uses circular reflected Gray
//! code (`label = i ^ (i >> 1)` for the point at angle `2πi/M`, rotated by
//! π/4 for QPSK). QAM splits the label into an in-phase half (first `k/2`
//! bits) and a quadrature half, each Gray-mapped onto the levels
//! `-(√M-1), ..., √M-1`. Every constellation has unit average energy.

use std::f64::consts::PI;
use std::fmt;

use num_complex::Complex64;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    Psk,
    Qam,
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Family::Psk => "psk",
            Family::Qam => "qam",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Constellation {
    family: Family,
    order: usize,
    bits: u32,
    /// `points[label]` is the point carrying `label`.
    points: Vec<Complex64>,
    norm: f64,
}

impl Constellation {
    pub fn new(family: Family, order: usize) -> Result<Self> {
        if order < 2 || !order.is_power_of_two() {
            return Err(Error::Config(format!(
                "modulation order {order} must be a power of two >= 2"
            )));
        }
        let bits = order.trailing_zeros();
        match family {
            Family::Psk => {
                let offset = if order == 4 { PI / 4.0 } else { 0.0 };
                let mut points = vec![Complex64::new(0.0, 0.0); order];
                for i in 0..order {
                    let label = i ^ (i >> 1);
                    let p = Complex64::from_polar(1.0, 2.0 * PI * i as f64 / order as f64 + offset);
                    // Exact zeros keep axis-symmetric decision ties exact.
                    let snap = |x: f64| if x.abs() < 1e-12 { 0.0 } else { x };
                    points[label] = Complex64::new(snap(p.re), snap(p.im));
                }
                Ok(Self {
                    family,
                    order,
                    bits,
                    points,
                    norm: 1.0,
                })
            }
            Family::Qam => {
                if !bits.is_multiple_of(2) {
                    return Err(Error::Config(format!(
                        "QAM order {order} is not a square constellation"
                    )));
                }
                let side = 1usize << (bits / 2);
                let half = bits / 2;
                let norm = 1.0 / (2.0 * (order as f64 - 1.0) / 3.0).sqrt();
                let level = |g: usize| {
                    let i = gray_inverse(g);
                    (2 * i) as f64 - (side - 1) as f64
                };
                let points = (0..order)
                    .map(|label| {
                        let gi = label >> half;
                        let gq = label & (side - 1);
                        Complex64::new(level(gi), level(gq)) * norm
                    })
                    .collect();
                Ok(Self {
                    family,
                    order,
                    bits,
                    points,
                    norm,
                })
            }
        }
    }

    /// Looks up a modulation by name: `bpsk`, `qpsk`, `8psk`, `4qam`,
    /// `16qam`, `64qam`, `256qam` (and generally `<M>psk` / `<M>qam`).
    pub fn from_name(name: &str) -> Result<Self> {
        let lower = name.trim().to_ascii_lowercase();
        match lower.as_str() {
            "bpsk" => return Self::new(Family::Psk, 2),
            "qpsk" => return Self::new(Family::Psk, 4),
            _ => {}
        }
        let (digits, family) = if let Some(d) = lower.strip_suffix("psk") {
            (d, Family::Psk)
        } else if let Some(d) = lower.strip_suffix("qam") {
            (d, Family::Qam)
        } else {
            return Err(Error::Config(format!("unknown modulation {name:?}")));
        };
        let order = digits
            .parse::<usize>()
            .map_err(|_| Error::Config(format!("unknown modulation {name:?}")))?;
        Self::new(family, order)
    }

    /// Canonical short name (`bpsk`, `qpsk`, `16qam`, ...).
    pub fn name(&self) -> String {
        match (self.family, self.order) {
            (Family::Psk, 2) => "bpsk".into(),
            (Family::Psk, 4) => "qpsk".into(),
            (f, m) => format!("{m}{f}"),
        }
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn bits_per_symbol(&self) -> u32 {
        self.bits
    }

    /// Points indexed by label.
    pub fn points(&self) -> &[Complex64] {
        &self.points
    }

    /// Scale applied to the integer QAM lattice (1 for PSK).
    pub fn norm(&self) -> f64 {
        self.norm
    }

    pub fn point(&self, label: usize) -> Complex64 {
        self.points[label]
    }

    /// Label of the nearest point; ties go to the lowest label.
    pub fn nearest(&self, y: Complex64) -> usize {
        let mut best = 0;
        let mut best_d = f64::INFINITY;
        for (label, p) in self.points.iter().enumerate() {
            let d = (y - p).norm_sqr();
            if d < best_d {
                best_d = d;
                best = label;
            }
        }
        best
    }

    pub fn modulate(&self, bits: &[u8]) -> Result<Vec<Complex64>> {
        let k = self.bits as usize;
        if !bits.len().is_multiple_of(k) {
            return Err(Error::Alignment(format!(
                "{} bits is not a multiple of {k} bits per symbol",
                bits.len()
            )));
        }
        Ok(bits
            .chunks(k)
            .map(|c| {
                self.points[c
                    .iter()
                    .fold(0usize, |acc, &b| (acc << 1) | (b & 1) as usize)]
            })
            .collect())
    }

    pub fn demodulate_hard(&self, symbols: &[Complex64]) -> Vec<u8> {
        let k = self.bits;
        let mut out = Vec::with_capacity(symbols.len() * k as usize);
        for &y in symbols {
            let label = self.nearest(y);
            out.extend((0..k).rev().map(|i| ((label >> i) & 1) as u8));
        }
        out
    }

    /// Max-log LLRs: `(min_{b=1} |y-s|² - min_{b=0} |y-s|²) / noise_var`,
    /// positive when 0 is the more likely bit.
    pub fn demodulate_soft(&self, symbols: &[Complex64], noise_var: f64) -> Result<Vec<f64>> {
        if !(noise_var > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "noise variance must be positive, got {noise_var}"
            )));
        }
        let k = self.bits as usize;
        let mut out = Vec::with_capacity(symbols.len() * k);
        let mut d0 = vec![0.0; k];
        let mut d1 = vec![0.0; k];
        for &y in symbols {
            d0.iter_mut().for_each(|d| *d = f64::INFINITY);
            d1.iter_mut().for_each(|d| *d = f64::INFINITY);
            for (label, p) in self.points.iter().enumerate() {
                let d = (y - p).norm_sqr();
                for j in 0..k {
                    let slot = if (label >> (k - 1 - j)) & 1 == 1 {
                        &mut d1[j]
                    } else {
                        &mut d0[j]
                    };
                    if d < *slot {
                        *slot = d;
                    }
                }
            }
            out.extend((0..k).map(|j| (d1[j] - d0[j]) / noise_var));
        }
        Ok(out)
    }
}

fn gray_inverse(mut g: usize) -> usize {
    let mut b = g;
    while g > 0 {
        g >>= 1;
        b ^= g;
    }
    b
}

pub fn modulate(bits: &[u8], c: &Constellation) -> Result<Vec<Complex64>> {
    c.modulate(bits)
}

pub fn demodulate_hard(symbols: &[Complex64], c: &Constellation) -> Vec<u8> {
    c.demodulate_hard(symbols)
}

pub fn demodulate_soft(
    symbols: &[Complex64],
    c: &Constellation,
    noise_var: f64,
) -> Result<Vec<f64>> {
    c.demodulate_soft(symbols, noise_var)
}
