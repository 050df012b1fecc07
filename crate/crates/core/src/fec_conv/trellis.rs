use crate::error::{Error, Result};

/// State machine of a feed-forward binary convolutional encoder.
///
/// The shift register holds `K` bits. The current input enters at the
/// high-order end (bit `K-1`), so the most recent bit meets the highest-order
/// tap of each generator; the state is the `K-1` most recent past inputs with
/// the newest in bit `K-2`. Output `j` is the parity of
/// `register & generator[j]`. This matches the usual octal convention, where
/// `(7, [133, 171])` is the industry-standard rate-1/2 code.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Trellis {
    constraint_length: u32,
    generators: Vec<u32>,
    num_states: usize,
    // Indexed by `state << 1 | input`.
    next_state: Vec<u32>,
    // Output bits packed LSB-first: bit j is generator j's output.
    output: Vec<u32>,
}

impl Trellis {
    /// Builds a trellis from octal generator polynomials.
    pub fn new(constraint_length: u32, generators_octal: &[u32]) -> Result<Self> {
        if constraint_length < 2 {
            return Err(Error::InvalidConstraint(constraint_length));
        }
        if constraint_length > 16 {
            return Err(Error::InvalidParameter(format!(
                "constraint length {constraint_length} exceeds the supported maximum of 16"
            )));
        }
        if generators_octal.is_empty() || generators_octal.len() > 8 {
            return Err(Error::InvalidParameter(
                "need between 1 and 8 generators".into(),
            ));
        }
        let k = constraint_length;
        let mut generators = Vec::with_capacity(generators_octal.len());
        for &g in generators_octal {
            let bin = octal_to_binary(g).ok_or_else(|| Error::InvalidPolynomial {
                octal: g.to_string(),
                k,
            })?;
            if bin == 0 || bin >= 1 << k {
                return Err(Error::InvalidPolynomial {
                    octal: g.to_string(),
                    k,
                });
            }
            generators.push(bin);
        }
        let num_states = 1usize << (k - 1);
        let mut next_state = Vec::with_capacity(2 * num_states);
        let mut output = Vec::with_capacity(2 * num_states);
        for state in 0..num_states as u32 {
            for input in 0..2u32 {
                let reg = (input << (k - 1)) | state;
                next_state.push(reg >> 1);
                let label = generators.iter().enumerate().fold(0u32, |acc, (j, &g)| {
                    acc | (((reg & g).count_ones() & 1) << j)
                });
                output.push(label);
            }
        }
        Ok(Self {
            constraint_length: k,
            generators,
            num_states,
            next_state,
            output,
        })
    }

    /// Parses generators written as comma-separated octal text, e.g. `"133,171"`.
    pub fn from_text(constraint_length: u32, generators: &str) -> Result<Self> {
        let gens = parse_octal_list(generators)?;
        Self::new(constraint_length, &gens)
    }

    pub fn constraint_length(&self) -> u32 {
        self.constraint_length
    }

    /// Generator tap masks in binary (not octal).
    pub fn generators(&self) -> &[u32] {
        &self.generators
    }

    pub fn num_states(&self) -> usize {
        self.num_states
    }

    /// Number of coded bits per input bit.
    pub fn outputs(&self) -> usize {
        self.generators.len()
    }

    /// Register memory `K - 1`.
    pub fn memory(&self) -> usize {
        self.constraint_length as usize - 1
    }

    #[inline]
    pub fn next_state(&self, state: usize, input: u8) -> usize {
        self.next_state[(state << 1) | input as usize] as usize
    }

    /// Packed output label: bit `j` holds generator `j`'s output.
    #[inline]
    pub fn output_label(&self, state: usize, input: u8) -> u32 {
        self.output[(state << 1) | input as usize]
    }

    /// Output bits for a transition, in generator order.
    pub fn output_bits(&self, state: usize, input: u8) -> Vec<u8> {
        let label = self.output_label(state, input);
        (0..self.outputs())
            .map(|j| ((label >> j) & 1) as u8)
            .collect()
    }

    /// The two predecessors of `state`, lower-numbered first, and the input
    /// bit that drives either of them into `state`.
    #[inline]
    pub fn predecessors(&self, state: usize) -> ([usize; 2], u8) {
        let m = self.memory();
        let input = (state >> (m - 1)) as u8;
        let base = (state << 1) & (self.num_states - 1);
        ([base, base | 1], input)
    }

    /// Encodes `bits`; with `terminate`, appends `K-1` zero tail bits so the
    /// encoder finishes in state 0.
    pub fn encode(&self, bits: &[u8], terminate: bool) -> Vec<u8> {
        let n = self.outputs();
        let tail = if terminate { self.memory() } else { 0 };
        let mut out = Vec::with_capacity(n * (bits.len() + tail));
        let mut state = 0usize;
        for &b in bits.iter().chain(std::iter::repeat_n(&0u8, tail)) {
            let b = b & 1;
            let label = self.output_label(state, b);
            out.extend((0..n).map(|j| ((label >> j) & 1) as u8));
            state = self.next_state(state, b);
        }
        out
    }
}

fn octal_to_binary(octal: u32) -> Option<u32> {
    let mut value = 0u32;
    let mut shift = 0;
    let mut rest = octal;
    if rest == 0 {
        return Some(0);
    }
    while rest > 0 {
        let digit = rest % 10;
        if digit > 7 || shift > 27 {
            return None;
        }
        value |= digit << shift;
        shift += 3;
        rest /= 10;
    }
    Some(value)
}

/// Parses `"133,171"` (or space-separated) into decimal-written octal numbers.
pub fn parse_octal_list(text: &str) -> Result<Vec<u32>> {
    text.split(|c: char| c == ',' || c.is_whitespace())
        .filter(|s| !s.is_empty())
        .map(|s| {
            s.trim()
                .parse::<u32>()
                .map_err(|_| Error::InvalidPolynomial {
                    octal: s.to_string(),
                    k: 0,
                })
        })
        .collect()
}

/// Convenience wrapper for [`Trellis::encode`].
pub fn conv_encode(trellis: &Trellis, bits: &[u8], terminate: bool) -> Vec<u8> {
    trellis.encode(bits, terminate)
}
