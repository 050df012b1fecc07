//! Systematic Reed-Solomon codes over GF(2^m) with a Berlekamp-Massey
//! decoder.

mod gf;

pub use gf::{GaloisField, PRIMITIVE_POLYS};

use crate::error::{Error, Result};

/// An `RS(n, k)` code with generator roots `α^1 ... α^(n-k)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RsCode {
    field: GaloisField,
    n: usize,
    k: usize,
    /// Generator polynomial, highest degree first, monic.
    generator: Vec<u8>,
}

/// Result of a successful decode.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RsDecoded {
    pub message: Vec<u8>,
    pub corrected: usize,
}

impl RsCode {
    pub fn new(m: u32, n: usize, k: usize) -> Result<Self> {
        let field = GaloisField::new(m)?;
        if n > field.order() || k < 1 || k >= n || !(n - k).is_multiple_of(2) {
            return Err(Error::Config(format!(
                "RS({n},{k}) over GF(2^{m}) needs n <= {}, n > k >= 1 and n - k even",
                field.order()
            )));
        }
        let mut generator = vec![1u8];
        for i in 1..=(n - k) {
            // Multiply by (x - α^i).
            let root = field.alpha_pow(i as i64);
            let mut next = vec![0u8; generator.len() + 1];
            for (j, &c) in generator.iter().enumerate() {
                next[j] ^= c;
                next[j + 1] ^= field.mul(c, root);
            }
            generator = next;
        }
        Ok(Self {
            field,
            n,
            k,
            generator,
        })
    }

    /// Parses `"rs:m,n,k"` (the `rs:` prefix is optional).
    pub fn from_text(text: &str) -> Result<Self> {
        let body = text.strip_prefix("rs:").unwrap_or(text);
        let parts: Vec<usize> = body
            .split(',')
            .map(|s| s.trim().parse::<usize>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|_| {
                Error::Config(format!("cannot parse RS code {text:?}; expected rs:m,n,k"))
            })?;
        match parts[..] {
            [m, n, k] => Self::new(m as u32, n, k),
            _ => Err(Error::Config(format!(
                "cannot parse RS code {text:?}; expected rs:m,n,k"
            ))),
        }
    }

    pub fn field(&self) -> &GaloisField {
        &self.field
    }

    pub fn m(&self) -> u32 {
        self.field.m()
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// Correctable symbol errors `(n - k) / 2`.
    pub fn t(&self) -> usize {
        (self.n - self.k) / 2
    }

    pub fn generator(&self) -> &[u8] {
        &self.generator
    }

    pub fn rate(&self) -> f64 {
        self.k as f64 / self.n as f64
    }

    fn check_symbols(&self, symbols: &[u8]) -> Result<()> {
        match symbols.iter().find(|&&s| s as usize >= self.field.size()) {
            Some(s) => Err(Error::InvalidParameter(format!(
                "symbol {s} out of range for GF(2^{})",
                self.m()
            ))),
            None => Ok(()),
        }
    }

    /// Systematic encoding: the message followed by `n - k` parity symbols.
    pub fn encode(&self, message: &[u8]) -> Result<Vec<u8>> {
        if message.len() != self.k {
            return Err(Error::Size(format!(
                "RS message must have {} symbols, got {}",
                self.k,
                message.len()
            )));
        }
        self.check_symbols(message)?;
        let parity_len = self.n - self.k;
        // Remainder of message(x) · x^(n-k) divided by g(x), by LFSR division.
        let mut rem = vec![0u8; parity_len];
        for &m in message {
            let feedback = m ^ rem[0];
            rem.rotate_left(1);
            rem[parity_len - 1] = 0;
            if feedback != 0 {
                for (r, &g) in rem.iter_mut().zip(&self.generator[1..]) {
                    *r ^= self.field.mul(feedback, g);
                }
            }
        }
        let mut cw = message.to_vec();
        cw.extend(rem);
        Ok(cw)
    }

    /// Syndromes `S_j = r(α^j)` for `j = 1..=n-k`.
    pub fn syndromes(&self, received: &[u8]) -> Vec<u8> {
        (1..=(self.n - self.k))
            .map(|j| {
                self.field
                    .poly_eval(received, self.field.alpha_pow(j as i64))
            })
            .collect()
    }

    /// Corrects up to `t` symbol errors. Heavier error patterns either fail
    /// with [`Error::DecodeFailure`] or decode to a different codeword.
    pub fn decode(&self, received: &[u8]) -> Result<RsDecoded> {
        if received.len() != self.n {
            return Err(Error::Size(format!(
                "RS block must have {} symbols, got {}",
                self.n,
                received.len()
            )));
        }
        self.check_symbols(received)?;
        let f = &self.field;
        let synd = self.syndromes(received);
        if synd.iter().all(|&s| s == 0) {
            return Ok(RsDecoded {
                message: received[..self.k].to_vec(),
                corrected: 0,
            });
        }

        let lambda = self.berlekamp_massey(&synd);
        let nerr = lambda.len() - 1;
        if nerr > self.t() {
            return Err(Error::DecodeFailure);
        }

        // Chien search: position p has locator X = α^(n-1-p).
        let mut positions = Vec::new();
        for p in 0..self.n {
            let x_inv = f.alpha_pow(-((self.n - 1 - p) as i64));
            if poly_eval_low(f, &lambda, x_inv) == 0 {
                positions.push(p);
            }
        }
        if positions.len() != nerr {
            return Err(Error::DecodeFailure);
        }

        // Forney: e = Ω(X^-1) / Λ'(X^-1) with Ω = S·Λ mod x^(2t).
        let two_t = self.n - self.k;
        let mut omega = vec![0u8; two_t];
        for (i, &s) in synd.iter().enumerate() {
            for (j, &l) in lambda.iter().enumerate() {
                if i + j < two_t {
                    omega[i + j] ^= f.mul(s, l);
                }
            }
        }
        let dlambda: Vec<u8> = lambda
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, &c)| if i % 2 == 1 { c } else { 0 })
            .collect();

        let mut corrected = received.to_vec();
        for &p in &positions {
            let x_inv = f.alpha_pow(-((self.n - 1 - p) as i64));
            let den = poly_eval_low(f, &dlambda, x_inv);
            if den == 0 {
                return Err(Error::DecodeFailure);
            }
            corrected[p] ^= f.div(poly_eval_low(f, &omega, x_inv), den);
        }
        if self.syndromes(&corrected).iter().any(|&s| s != 0) {
            return Err(Error::DecodeFailure);
        }
        Ok(RsDecoded {
            message: corrected[..self.k].to_vec(),
            corrected: nerr,
        })
    }

    /// Error locator Λ(x), lowest degree first, with trailing zeros removed.
    fn berlekamp_massey(&self, synd: &[u8]) -> Vec<u8> {
        let f = &self.field;
        let mut c = vec![1u8];
        let mut b = vec![1u8];
        let mut l = 0usize;
        let mut shift = 1usize;
        let mut last = 1u8;
        for i in 0..synd.len() {
            let mut d = synd[i];
            for j in 1..=l.min(c.len() - 1) {
                d ^= f.mul(c[j], synd[i - j]);
            }
            if d == 0 {
                shift += 1;
                continue;
            }
            let coef = f.div(d, last);
            let mut t = c.clone();
            if c.len() < b.len() + shift {
                c.resize(b.len() + shift, 0);
            }
            for (j, &bj) in b.iter().enumerate() {
                c[j + shift] ^= f.mul(coef, bj);
            }
            if 2 * l <= i {
                l = i + 1 - l;
                std::mem::swap(&mut b, &mut t);
                last = d;
                shift = 1;
            } else {
                shift += 1;
            }
        }
        while c.len() > 1 && *c.last().unwrap() == 0 {
            c.pop();
        }
        c
    }
}

fn poly_eval_low(f: &GaloisField, poly: &[u8], x: u8) -> u8 {
    poly.iter().rev().fold(0u8, |acc, &c| f.mul(acc, x) ^ c)
}

/// Packs bits (MSB first) into `m`-bit symbols; the bit count must divide evenly.
pub fn bits_to_symbols(bits: &[u8], m: u32) -> Vec<u8> {
    bits.chunks(m as usize)
        .map(|c| c.iter().fold(0u8, |acc, &b| (acc << 1) | (b & 1)))
        .collect()
}

pub fn symbols_to_bits(symbols: &[u8], m: u32) -> Vec<u8> {
    symbols
        .iter()
        .flat_map(|&s| (0..m).rev().map(move |i| (s >> i) & 1))
        .collect()
}
