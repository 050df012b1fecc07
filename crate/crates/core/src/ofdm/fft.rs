use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    /// `X_k = N^-1/2 Σ x_n e^{-j2πkn/N}`
    Forward,
    /// `x_n = N^-1/2 Σ X_k e^{+j2πkn/N}`
    Inverse,
}

/// Radix-2 decimation-in-time FFT with unitary scaling in both directions.
#[derive(Debug, Clone)]
pub struct FftPlan {
    n: usize,
    twiddles: Vec<Complex64>,
    scale: f64,
}

impl FftPlan {
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 || !n.is_power_of_two() {
            return Err(Error::Size(format!("FFT length {n} is not a power of two")));
        }
        let twiddles = (0..n / 2)
            .map(|k| Complex64::from_polar(1.0, -2.0 * PI * k as f64 / n as f64))
            .collect();
        Ok(Self {
            n,
            twiddles,
            scale: 1.0 / (n as f64).sqrt(),
        })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn process(&self, data: &mut [Complex64], direction: Direction) {
        assert_eq!(data.len(), self.n, "buffer length does not match the plan");
        let n = self.n;
        let bits = n.trailing_zeros();
        if bits > 0 {
            for i in 0..n {
                let j = i.reverse_bits() >> (usize::BITS - bits);
                if j > i {
                    data.swap(i, j);
                }
            }
        }
        let mut len = 2;
        while len <= n {
            let stride = n / len;
            for start in (0..n).step_by(len) {
                for k in 0..len / 2 {
                    let mut w = self.twiddles[k * stride];
                    if direction == Direction::Inverse {
                        w = w.conj();
                    }
                    let a = data[start + k];
                    let b = data[start + k + len / 2] * w;
                    data[start + k] = a + b;
                    data[start + k + len / 2] = a - b;
                }
            }
            len <<= 1;
        }
        data.iter_mut().for_each(|x| *x *= self.scale);
    }
}

/// Unitary FFT of a power-of-two length buffer.
pub fn fft(samples: &[Complex64], direction: Direction) -> Result<Vec<Complex64>> {
    let plan = FftPlan::new(samples.len())?;
    let mut out = samples.to_vec();
    plan.process(&mut out, direction);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::SplitMix64;

    fn naive_dft(x: &[Complex64], sign: f64) -> Vec<Complex64> {
        let n = x.len();
        (0..n)
            .map(|k| {
                x.iter()
                    .enumerate()
                    .map(|(t, &v)| {
                        v * Complex64::from_polar(
                            1.0,
                            sign * 2.0 * PI * ((k * t) % n) as f64 / n as f64,
                        )
                    })
                    .sum::<Complex64>()
                    / (n as f64).sqrt()
            })
            .collect()
    }

    fn random(n: usize, seed: u64) -> Vec<Complex64> {
        let mut rng = SplitMix64::new(seed);
        (0..n)
            .map(|_| Complex64::new(rng.next_f64() - 0.5, rng.next_f64() - 0.5))
            .collect()
    }

    #[test]
    fn matches_naive_dft() {
        for n in [1, 2, 8, 64, 256] {
            let x = random(n, n as u64);
            let fast = fft(&x, Direction::Forward).unwrap();
            let slow = naive_dft(&x, -1.0);
            let err = fast
                .iter()
                .zip(&slow)
                .map(|(a, b)| (a - b).norm())
                .fold(0.0, f64::max);
            assert!(err < 1e-9, "n = {n}: {err}");
            let fast = fft(&x, Direction::Inverse).unwrap();
            let slow = naive_dft(&x, 1.0);
            let err = fast
                .iter()
                .zip(&slow)
                .map(|(a, b)| (a - b).norm())
                .fold(0.0, f64::max);
            assert!(err < 1e-9, "n = {n}: {err}");
        }
    }

    #[test]
    fn inverse_undoes_forward() {
        let x = random(128, 1);
        let y = fft(&fft(&x, Direction::Forward).unwrap(), Direction::Inverse).unwrap();
        for (a, b) in x.iter().zip(&y) {
            assert!((a - b).norm() < 1e-10);
        }
    }

    #[test]
    fn constant_gives_dc_impulse() {
        let x = vec![Complex64::new(1.0, 0.0); 16];
        let y = fft(&x, Direction::Forward).unwrap();
        assert!((y[0] - Complex64::new(4.0, 0.0)).norm() < 1e-12);
        assert!(y[1..].iter().all(|v| v.norm() < 1e-12));
    }

    #[test]
    fn non_power_of_two_rejected() {
        assert!(matches!(
            fft(&[Complex64::default(); 12], Direction::Forward),
            Err(Error::Size(_))
        ));
        assert!(fft(&[], Direction::Forward).is_err());
    }
}
