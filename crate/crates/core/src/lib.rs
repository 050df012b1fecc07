pub mod channel;
pub mod error;
pub mod fec_conv;
pub mod rng;

pub use error::{Error, Result};
pub mod equalize;
pub mod fec_rs;
pub mod harness;
pub mod metrics;
pub mod modem;
pub mod ofdm;
