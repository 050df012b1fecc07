//! Convolutional coding: encoder trellis, puncturing, Viterbi decoding and
//! the distance-spectrum union bound for punctured codes.

mod puncture;
mod spectrum;
mod trellis;
mod viterbi;

pub use puncture::{PuncturePattern, RATE_3_4, RATE_5_7};
pub use spectrum::{
    default_d_max, distance_spectrum, free_distance, punctured_bound_ber, WeightSpectrum,
};
pub use trellis::{conv_encode, parse_octal_list, Trellis};
pub use viterbi::{bits_to_metrics, default_traceback, viterbi_decode, Decision, ViterbiDecoder};

/// Soft metrics per coded bit; positive favours 0, zero is an erasure.
pub type SoftStream = Vec<f64>;
