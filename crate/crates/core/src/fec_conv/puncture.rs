use crate::error::{Error, Result};

/// Periodic keep/delete mask applied to the serialized encoder output.
///
/// The encoder output is serialized per input bit (`g1(t) g2(t) g1(t+1) ...`)
/// and the mask is cycled over that stream, so `"111001"` over a rate-1/2
/// code covers three input bits and yields rate 3/4.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PuncturePattern {
    mask: Vec<bool>,
    kept: usize,
}

/// Rate-3/4 mask used with the `(7, [133, 171])` code.
pub const RATE_3_4: &str = "111001";

/// Rate-5/7 mask (five input bits, seven of ten coded bits kept). Chosen as
/// the period-10 mask with the largest free distance and smallest
/// free-distance multiplicity for `(7, [133, 171])` (d_free 5, ω 16).
pub const RATE_5_7: &str = "1110101011";

impl PuncturePattern {
    pub fn new(mask: Vec<bool>) -> Result<Self> {
        let kept = mask.iter().filter(|&&m| m).count();
        if kept == 0 {
            return Err(Error::InvalidParameter(
                "puncture mask must keep at least one bit".into(),
            ));
        }
        Ok(Self { mask, kept })
    }

    /// Parses a `0`/`1` string such as `"111001"`.
    pub fn from_text(text: &str) -> Result<Self> {
        let mask = text
            .chars()
            .filter(|c| !c.is_whitespace())
            .map(|c| match c {
                '1' => Ok(true),
                '0' => Ok(false),
                _ => Err(Error::InvalidParameter(format!(
                    "bad puncture mask character {c:?}"
                ))),
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(mask)
    }

    /// Mask that keeps every bit of a code with `n` outputs.
    pub fn identity(n: usize) -> Self {
        Self {
            mask: vec![true; n.max(1)],
            kept: n.max(1),
        }
    }

    pub fn mask(&self) -> &[bool] {
        &self.mask
    }

    pub fn period(&self) -> usize {
        self.mask.len()
    }

    pub fn kept(&self) -> usize {
        self.kept
    }

    pub fn is_identity(&self) -> bool {
        self.kept == self.mask.len()
    }

    /// Number of input bits covered by one period of a code with `n` outputs.
    pub fn inputs_per_period(&self, n: usize) -> Result<usize> {
        if !self.period().is_multiple_of(n) {
            return Err(Error::Alignment(format!(
                "puncture period {} is not a multiple of the {n} encoder outputs",
                self.period()
            )));
        }
        Ok(self.period() / n)
    }

    /// Overall code rate as a reduced fraction for a rate-1/n mother code.
    pub fn rate(&self, n: usize) -> Result<(usize, usize)> {
        let num = self.inputs_per_period(n)?;
        let g = gcd(num, self.kept);
        Ok((num / g, self.kept / g))
    }

    pub fn punctured_len(&self, len: usize) -> usize {
        len / self.period() * self.kept
    }

    /// Keeps the positions where the cycled mask is 1.
    pub fn puncture<T: Copy>(&self, bits: &[T]) -> Result<Vec<T>> {
        if !bits.len().is_multiple_of(self.period()) {
            return Err(Error::Alignment(format!(
                "input length {} is not a multiple of the puncture period {}",
                bits.len(),
                self.period()
            )));
        }
        Ok(bits
            .iter()
            .zip(self.mask.iter().cycle())
            .filter_map(|(&b, &keep)| keep.then_some(b))
            .collect())
    }

    /// Reinserts deleted positions as erasures (metric 0).
    pub fn depuncture(&self, metrics: &[f64]) -> Result<Vec<f64>> {
        if !metrics.len().is_multiple_of(self.kept) {
            return Err(Error::Alignment(format!(
                "{} metrics do not fill whole puncture periods of {} kept bits",
                metrics.len(),
                self.kept
            )));
        }
        let mut out = Vec::with_capacity(metrics.len() / self.kept * self.period());
        let mut it = metrics.iter();
        for _ in 0..metrics.len() / self.kept {
            for &keep in &self.mask {
                out.push(if keep { *it.next().unwrap() } else { 0.0 });
            }
        }
        Ok(out)
    }
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}
