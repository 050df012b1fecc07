//! Channel estimation and single-carrier equalizers: LMS linear, LMS
//! decision-feedback, and MLSE (Viterbi over the channel trellis).

mod adaptive;
mod estimate;
mod mlse;

pub use adaptive::{equalize_dfe, equalize_linear, AdaptiveEqualizer};
pub use estimate::{estimate_channel_ls, frequency_response, ChannelEstimate, RESPONSE_POINTS};
pub use mlse::{equalize_mlse, mlse_labels, MAX_STATES};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EqKind {
    Linear,
    Dfe,
    Mlse,
}

impl std::str::FromStr for EqKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "linear" => Ok(EqKind::Linear),
            "dfe" => Ok(EqKind::Dfe),
            "mlse" => Ok(EqKind::Mlse),
            other => Err(Error::Config(format!("unknown equalizer kind {other:?}"))),
        }
    }
}

/// Equalizer settings. JSON keys: `eq_kind`, `ff_taps`, `fb_taps`,
/// `step_size`, `training_len`, `traceback`, `reference_tap`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(from = "RawConfig")]
pub struct EqualizerConfig {
    #[serde(rename = "eq_kind")]
    pub kind: EqKind,
    pub ff_taps: usize,
    pub fb_taps: usize,
    pub step_size: f64,
    pub traceback: usize,
    pub training_len: usize,
    pub reference_tap: usize,
}

impl EqualizerConfig {
    /// Defaults: 11 feedforward taps centred on tap 5, 3 feedback taps for
    /// the DFE, LMS step 0.01, 500 training symbols, MLSE traceback 30.
    pub fn new(kind: EqKind) -> Self {
        Self {
            kind,
            ff_taps: 11,
            fb_taps: if kind == EqKind::Dfe { 3 } else { 0 },
            step_size: 0.01,
            traceback: 30,
            training_len: 500,
            reference_tap: 5,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self.kind {
            EqKind::Linear | EqKind::Dfe => {
                if self.ff_taps < 1 {
                    return Err(Error::Config("ff_taps must be at least 1".into()));
                }
                if self.reference_tap >= self.ff_taps {
                    return Err(Error::Config(format!(
                        "reference_tap {} must index one of the {} feedforward taps",
                        self.reference_tap, self.ff_taps
                    )));
                }
                if !(0.0..1.0).contains(&self.step_size) {
                    return Err(Error::Config(format!(
                        "step_size {} must lie in [0, 1)",
                        self.step_size
                    )));
                }
            }
            EqKind::Mlse => {
                if self.traceback < 1 {
                    return Err(Error::Config("traceback must be at least 1".into()));
                }
            }
        }
        Ok(())
    }
}

/// Missing keys take the defaults of the given `eq_kind`.
#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    eq_kind: EqKind,
    ff_taps: Option<usize>,
    fb_taps: Option<usize>,
    step_size: Option<f64>,
    traceback: Option<usize>,
    training_len: Option<usize>,
    reference_tap: Option<usize>,
}

impl From<RawConfig> for EqualizerConfig {
    fn from(r: RawConfig) -> Self {
        let d = EqualizerConfig::new(r.eq_kind);
        let ff_taps = r.ff_taps.unwrap_or(d.ff_taps);
        Self {
            kind: r.eq_kind,
            ff_taps,
            fb_taps: r.fb_taps.unwrap_or(d.fb_taps),
            step_size: r.step_size.unwrap_or(d.step_size),
            traceback: r.traceback.unwrap_or(d.traceback),
            training_len: r.training_len.unwrap_or(d.training_len),
            reference_tap: r.reference_tap.unwrap_or(if r.ff_taps.is_some() {
                ff_taps / 2
            } else {
                d.reference_tap
            }),
        }
    }
}
