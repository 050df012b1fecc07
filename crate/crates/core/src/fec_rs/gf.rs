use crate::error::{Error, Result};

/// Primitive polynomials used for GF(2^m), indexed by `m` (bit `m` set).
///
/// | m | polynomial            |
/// |---|-----------------------|
/// | 2 | x^2 + x + 1           |
/// | 3 | x^3 + x + 1           |
/// | 4 | x^4 + x + 1           |
/// | 5 | x^5 + x^2 + 1         |
/// | 6 | x^6 + x + 1           |
/// | 7 | x^7 + x^3 + 1         |
/// | 8 | x^8 + x^4 + x^3 + x^2 + 1 |
pub const PRIMITIVE_POLYS: [u32; 9] = [0, 0, 0x7, 0xB, 0x13, 0x25, 0x43, 0x89, 0x11D];

/// Log/antilog tables for GF(2^m), `2 <= m <= 8`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GaloisField {
    m: u32,
    exp: Vec<u8>,
    log: Vec<u8>,
}

impl GaloisField {
    pub fn new(m: u32) -> Result<Self> {
        if !(2..=8).contains(&m) {
            return Err(Error::InvalidParameter(format!(
                "GF(2^{m}) not supported; m must be in 2..=8"
            )));
        }
        let q = 1usize << m;
        let poly = PRIMITIVE_POLYS[m as usize];
        let mut exp = vec![0u8; 2 * q];
        let mut log = vec![0u8; q];
        let mut x = 1u32;
        for i in 0..q - 1 {
            exp[i] = x as u8;
            log[x as usize] = i as u8;
            x <<= 1;
            if x & (1 << m) != 0 {
                x ^= poly;
            }
        }
        for i in q - 1..2 * q {
            exp[i] = exp[i - (q - 1)];
        }
        Ok(Self { m, exp, log })
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    /// Field size `2^m`.
    pub fn size(&self) -> usize {
        1 << self.m
    }

    /// Multiplicative group order `2^m - 1`.
    pub fn order(&self) -> usize {
        self.size() - 1
    }

    #[inline]
    pub fn add(&self, a: u8, b: u8) -> u8 {
        a ^ b
    }

    #[inline]
    pub fn mul(&self, a: u8, b: u8) -> u8 {
        if a == 0 || b == 0 {
            0
        } else {
            self.exp[self.log[a as usize] as usize + self.log[b as usize] as usize]
        }
    }

    #[inline]
    pub fn inv(&self, a: u8) -> u8 {
        assert!(a != 0, "zero has no inverse");
        self.exp[self.order() - self.log[a as usize] as usize]
    }

    #[inline]
    pub fn div(&self, a: u8, b: u8) -> u8 {
        self.mul(a, self.inv(b))
    }

    /// `α^i` for any integer exponent.
    #[inline]
    pub fn alpha_pow(&self, i: i64) -> u8 {
        self.exp[i.rem_euclid(self.order() as i64) as usize]
    }

    #[inline]
    pub fn log(&self, a: u8) -> usize {
        self.log[a as usize] as usize
    }

    /// Evaluates a polynomial stored highest-degree first.
    pub fn poly_eval(&self, poly: &[u8], x: u8) -> u8 {
        poly.iter().fold(0u8, |acc, &c| self.mul(acc, x) ^ c)
    }
}
