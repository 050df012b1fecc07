use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::equalize::EqualizerConfig;
use crate::error::{Error, Result};
use crate::fec_conv::{parse_octal_list, Decision, PuncturePattern, Trellis};
use crate::fec_rs::RsCode;

/// The three end-to-end links.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ChainKind {
    /// Coded single-carrier link over AWGN.
    PuncturedBpsk,
    /// Coded OFDM link over AWGN.
    OfdmQam,
    /// Single-carrier link through a multipath channel with an equalizer.
    EqualizerBpsk,
}

impl ChainKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            ChainKind::PuncturedBpsk => "punctured_bpsk",
            ChainKind::OfdmQam => "ofdm_qam",
            ChainKind::EqualizerBpsk => "equalizer_bpsk",
        }
    }
}

impl FromStr for ChainKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "punctured_bpsk" => Ok(ChainKind::PuncturedBpsk),
            "ofdm_qam" => Ok(ChainKind::OfdmQam),
            "equalizer_bpsk" => Ok(ChainKind::EqualizerBpsk),
            other => Err(Error::Config(format!("unknown chain {other:?}"))),
        }
    }
}

impl fmt::Display for ChainKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Channel code, written as `none`, `conv:K:gens[:mask]` or `rs:m,n,k`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CodeSpec {
    None,
    Conv {
        constraint_length: u32,
        generators: Vec<u32>,
        puncture: Option<String>,
    },
    Rs {
        m: u32,
        n: usize,
        k: usize,
    },
}

impl CodeSpec {
    /// `(7, [133, 171])`, optionally punctured.
    pub fn standard_conv(puncture: Option<&str>) -> Self {
        CodeSpec::Conv {
            constraint_length: 7,
            generators: vec![133, 171],
            puncture: puncture.map(str::to_string),
        }
    }

    /// Code rate as a reduced fraction.
    pub fn rate(&self) -> Result<(usize, usize)> {
        match self {
            CodeSpec::None => Ok((1, 1)),
            CodeSpec::Conv {
                generators,
                puncture,
                ..
            } => match puncture {
                Some(mask) => PuncturePattern::from_text(mask)?.rate(generators.len()),
                None => Ok((1, generators.len())),
            },
            CodeSpec::Rs { n, k, .. } => {
                let g = gcd(*n, *k);
                Ok((k / g, n / g))
            }
        }
    }

    pub fn rate_text(&self) -> Result<String> {
        let (a, b) = self.rate()?;
        Ok(if b == 1 {
            a.to_string()
        } else {
            format!("{a}/{b}")
        })
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            CodeSpec::None => Ok(()),
            CodeSpec::Conv {
                constraint_length,
                generators,
                puncture,
            } => {
                let t = Trellis::new(*constraint_length, generators)?;
                if let Some(mask) = puncture {
                    PuncturePattern::from_text(mask)?.inputs_per_period(t.outputs())?;
                }
                Ok(())
            }
            CodeSpec::Rs { m, n, k } => RsCode::new(*m, *n, *k).map(|_| ()),
        }
    }
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

impl FromStr for CodeSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.is_empty() || s == "none" {
            return Ok(CodeSpec::None);
        }
        if let Some(rest) = s.strip_prefix("rs:") {
            let code = RsCode::from_text(rest)?;
            return Ok(CodeSpec::Rs {
                m: code.m(),
                n: code.n(),
                k: code.k(),
            });
        }
        if let Some(rest) = s.strip_prefix("conv:") {
            let parts: Vec<&str> = rest.split(':').collect();
            if !(2..=3).contains(&parts.len()) {
                return Err(Error::Config(format!(
                    "cannot parse code {s:?}; expected conv:K:gens[:mask]"
                )));
            }
            let constraint_length = parts[0]
                .parse()
                .map_err(|_| Error::Config(format!("bad constraint length in {s:?}")))?;
            let generators = parse_octal_list(parts[1])?;
            let puncture = parts
                .get(2)
                .map(|m| m.to_string())
                .filter(|m| !m.is_empty());
            let spec = CodeSpec::Conv {
                constraint_length,
                generators,
                puncture,
            };
            spec.validate()?;
            return Ok(spec);
        }
        Err(Error::Config(format!("unknown code {s:?}")))
    }
}

impl fmt::Display for CodeSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CodeSpec::None => f.write_str("none"),
            CodeSpec::Conv {
                constraint_length,
                generators,
                puncture,
            } => {
                let gens: Vec<String> = generators.iter().map(|g| g.to_string()).collect();
                write!(f, "conv:{constraint_length}:{}", gens.join(","))?;
                if let Some(m) = puncture {
                    write!(f, ":{m}")?;
                }
                Ok(())
            }
            CodeSpec::Rs { m, n, k } => write!(f, "rs:{m},{n},{k}"),
        }
    }
}

impl Serialize for CodeSpec {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for CodeSpec {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// OFDM grid settings (JSON keys `fft_len`, `used`, `pilots`, `cp_len`,
/// `sample_rate_hz`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridConfig {
    pub fft_len: usize,
    pub used: usize,
    pub pilots: usize,
    pub cp_len: usize,
    pub sample_rate_hz: f64,
}

impl Default for GridConfig {
    fn default() -> Self {
        Self {
            fft_len: 64,
            used: 48,
            pilots: 4,
            cp_len: 16,
            sample_rate_hz: 20e6,
        }
    }
}

/// Channel settings. `snr_db` / `ebn0_db` (at most one) give a single
/// operating point when no sweep is configured.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ChannelConfig {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub snr_db: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ebn0_db: Option<f64>,
    pub signal_power_w: f64,
    /// Multipath taps as `[re, im]` pairs; the equalizer chain defaults to
    /// `[0.8, 0.5, 0.3]` normalized to unit energy.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub channel_taps: Option<Vec<[f64; 2]>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

impl Default for ChannelConfig {
    fn default() -> Self {
        Self {
            snr_db: None,
            ebn0_db: None,
            signal_power_w: 0.01,
            channel_taps: None,
            seed: None,
        }
    }
}

impl ChannelConfig {
    pub fn taps(&self) -> Option<Vec<Complex64>> {
        self.channel_taps
            .as_ref()
            .map(|t| t.iter().map(|&[re, im]| Complex64::new(re, im)).collect())
    }
}

/// Everything needed to build a link.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChainConfig {
    pub chain: ChainKind,
    #[serde(default = "default_modulation")]
    pub modulation: String,
    #[serde(default = "default_code")]
    pub code: CodeSpec,
    #[serde(default = "default_decision")]
    pub decision: Decision,
    /// Viterbi traceback; defaults to 5(K-1), or 12(K-1) when punctured.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub traceback: Option<usize>,
    #[serde(default)]
    pub grid: GridConfig,
    #[serde(default)]
    pub channel: ChannelConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub equalizer: Option<EqualizerConfig>,
    #[serde(default = "default_payload")]
    pub payload_bits: usize,
}

fn default_modulation() -> String {
    "bpsk".into()
}

fn default_code() -> CodeSpec {
    CodeSpec::None
}

fn default_decision() -> Decision {
    Decision::Soft
}

fn default_payload() -> usize {
    10_000
}

impl ChainConfig {
    pub fn new(chain: ChainKind, modulation: &str, code: CodeSpec) -> Self {
        Self {
            chain,
            modulation: modulation.into(),
            code,
            decision: Decision::Soft,
            traceback: None,
            grid: GridConfig::default(),
            channel: ChannelConfig::default(),
            equalizer: None,
            payload_bits: default_payload(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.payload_bits < 1000 {
            return Err(Error::Config(format!(
                "payload_bits {} must be at least 1000",
                self.payload_bits
            )));
        }
        if self.channel.snr_db.is_some() && self.channel.ebn0_db.is_some() {
            return Err(Error::Config(
                "give at most one of snr_db and ebn0_db".into(),
            ));
        }
        if !(self.channel.signal_power_w > 0.0) {
            return Err(Error::Config("signal_power_w must be positive".into()));
        }
        self.code.validate()?;
        if let Some(eq) = &self.equalizer {
            eq.validate()?;
        }
        if self.chain == ChainKind::EqualizerBpsk && self.equalizer.is_none() {
            return Err(Error::Config(
                "equalizer_bpsk chain needs an equalizer section".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum XAxis {
    SnrDb,
    Ebn0Db,
}

/// Sweep points, either a list or `"start:step:stop"` (inclusive).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Points {
    List(Vec<f64>),
    Range(String),
}

impl Points {
    pub fn values(&self) -> Result<Vec<f64>> {
        let v = match self {
            Points::List(v) => v.clone(),
            Points::Range(s) => parse_range(s)?,
        };
        if v.is_empty() {
            return Err(Error::Config("sweep needs at least one point".into()));
        }
        if v.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Config(
                "sweep points must be strictly increasing".into(),
            ));
        }
        Ok(v)
    }
}

/// Parses `a:s:b` into `a, a+s, ..., b` (inclusive, tolerant to rounding).
pub fn parse_range(s: &str) -> Result<Vec<f64>> {
    let parts: Vec<f64> = s
        .split(':')
        .map(|p| p.trim().parse::<f64>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|_| {
            Error::Config(format!(
                "cannot parse range {s:?}; expected start:step:stop"
            ))
        })?;
    let [start, step, stop] = parts[..] else {
        return Err(Error::Config(format!(
            "cannot parse range {s:?}; expected start:step:stop"
        )));
    };
    if !(step > 0.0) || stop < start {
        return Err(Error::Config(format!(
            "range {s:?} needs step > 0 and stop >= start"
        )));
    }
    let count = ((stop - start) / step + 1e-9).floor() as usize + 1;
    Ok((0..count).map(|i| start + i as f64 * step).collect())
}

/// Monte Carlo sweep settings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepConfig {
    pub x_axis: XAxis,
    pub points: Points,
    /// Stop a point once this many errors are counted (`null` = never).
    pub stop_min_errors: Option<u64>,
    /// Stop a point once this many bits are simulated.
    pub stop_max_bits: u64,
    /// Trials run side by side between stopping-rule checks.
    pub seeds_per_point: usize,
    pub master_seed: u64,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            x_axis: XAxis::Ebn0Db,
            points: Points::List(vec![0.0]),
            stop_min_errors: Some(100),
            stop_max_bits: 10_000_000,
            seeds_per_point: 8,
            master_seed: 1,
        }
    }
}

impl SweepConfig {
    pub fn validate(&self, payload_bits: usize) -> Result<()> {
        self.points.values()?;
        if self.stop_max_bits < payload_bits as u64 {
            return Err(Error::Config(format!(
                "stop_max_bits {} is smaller than one payload of {payload_bits} bits",
                self.stop_max_bits
            )));
        }
        if self.seeds_per_point == 0 {
            return Err(Error::Config("seeds_per_point must be at least 1".into()));
        }
        Ok(())
    }
}

/// On-disk configuration: a chain plus an optional sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfigFile {
    #[serde(flatten)]
    pub chain: ChainConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepConfig>,
}

impl ConfigFile {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: ConfigFile = serde_json::from_str(text)?;
        cfg.chain.validate()?;
        if let Some(s) = &cfg.sweep {
            s.validate(cfg.chain.payload_bits)?;
        }
        Ok(cfg)
    }

    /// The sweep to run: the configured one, or a single point from the
    /// channel's `snr_db` / `ebn0_db`.
    pub fn effective_sweep(&self) -> Result<SweepConfig> {
        if let Some(s) = &self.sweep {
            return Ok(s.clone());
        }
        let ch = &self.chain.channel;
        let (x_axis, x) = match (ch.snr_db, ch.ebn0_db) {
            (Some(v), None) => (XAxis::SnrDb, v),
            (None, Some(v)) => (XAxis::Ebn0Db, v),
            _ => {
                return Err(Error::Config(
                    "config has neither a sweep nor a channel snr_db / ebn0_db".into(),
                ))
            }
        };
        Ok(SweepConfig {
            x_axis,
            points: Points::List(vec![x]),
            master_seed: ch.seed.unwrap_or(1),
            ..SweepConfig::default()
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn code_spec_text() {
        for s in [
            "none",
            "conv:7:133,171",
            "conv:7:133,171:111001",
            "rs:3,7,5",
        ] {
            let c: CodeSpec = s.parse().unwrap();
            assert_eq!(c.to_string(), s);
        }
        assert_eq!(
            "conv:7:133,171:111001"
                .parse::<CodeSpec>()
                .unwrap()
                .rate_text()
                .unwrap(),
            "3/4"
        );
        assert_eq!(
            "conv:7:133,171"
                .parse::<CodeSpec>()
                .unwrap()
                .rate_text()
                .unwrap(),
            "1/2"
        );
        assert_eq!(
            "rs:3,7,5".parse::<CodeSpec>().unwrap().rate_text().unwrap(),
            "5/7"
        );
        assert_eq!(CodeSpec::None.rate_text().unwrap(), "1");
        assert!("conv:7:133,171:11100".parse::<CodeSpec>().is_err());
        assert!("turbo".parse::<CodeSpec>().is_err());
    }

    #[test]
    fn ranges() {
        assert_eq!(parse_range("0:1:10").unwrap().len(), 11);
        assert_eq!(
            parse_range("-5:5:25").unwrap(),
            vec![-5.0, 0.0, 5.0, 10.0, 15.0, 20.0, 25.0]
        );
        assert_eq!(parse_range("0:0.1:0.3").unwrap().len(), 4);
        assert!(parse_range("0:0:1").is_err());
        assert!(parse_range("0:1").is_err());
        assert!(Points::List(vec![1.0, 1.0]).values().is_err());
        assert!(Points::List(vec![]).values().is_err());
    }

    #[test]
    fn config_json() {
        let text = r#"{
            "chain": "ofdm_qam", "modulation": "16qam", "code": "conv:7:133,171:111001",
            "grid": {"fft_len": 64, "used": 48, "pilots": 4, "cp_len": 16, "sample_rate_hz": 2e7},
            "channel": {"signal_power_w": 0.01},
            "payload_bits": 360110,
            "sweep": {"x_axis": "snr_db", "points": "-5:5:25", "stop_min_errors": null,
                      "stop_max_bits": 360110, "master_seed": 7}
        }"#;
        let cfg = ConfigFile::from_json(text).unwrap();
        assert_eq!(cfg.chain.chain, ChainKind::OfdmQam);
        assert_eq!(
            cfg.sweep.as_ref().unwrap().points.values().unwrap().len(),
            7
        );
        assert_eq!(cfg.sweep.as_ref().unwrap().stop_min_errors, None);
        let back = ConfigFile::from_json(&serde_json::to_string(&cfg).unwrap()).unwrap();
        assert_eq!(back, cfg);
    }

    #[test]
    fn config_errors() {
        assert!(ConfigFile::from_json(r#"{"chain": "nope"}"#).is_err());
        assert!(
            ConfigFile::from_json(r#"{"chain": "punctured_bpsk", "payload_bits": 10}"#).is_err()
        );
        assert!(ConfigFile::from_json(
            r#"{"chain": "punctured_bpsk", "channel": {"snr_db": 1, "ebn0_db": 2}}"#
        )
        .is_err());
        assert!(ConfigFile::from_json(r#"{"chain": "equalizer_bpsk"}"#).is_err());
        let one =
            ConfigFile::from_json(r#"{"chain": "punctured_bpsk", "channel": {"ebn0_db": 3}}"#)
                .unwrap();
        assert_eq!(
            one.effective_sweep().unwrap().points.values().unwrap(),
            vec![3.0]
        );
    }
}
