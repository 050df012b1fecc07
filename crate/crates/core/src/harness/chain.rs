use num_complex::Complex64;

use crate::channel::{awgn_in_place, noise_variance, FirChannel, LinkBudget};
use crate::equalize::{
    equalize_mlse, estimate_channel_ls, AdaptiveEqualizer, EqKind, EqualizerConfig,
};
use crate::error::{Error, Result, StageExt};
use crate::fec_conv::{default_traceback, Decision, PuncturePattern, Trellis, ViterbiDecoder};
use crate::fec_rs::{bits_to_symbols, symbols_to_bits, RsCode};
use crate::metrics::{count_errors, BerRecord};
use crate::modem::{Constellation, Family};
use crate::ofdm::OfdmGrid;
use crate::rng::{mix64, SplitMix64};

use super::config::{ChainConfig, ChainKind, CodeSpec, XAxis};

const DATA_STREAM: u64 = 0x6461_7461;
const NOISE_STREAM: u64 = 0x6e6f_6973;

enum Coder {
    None,
    Conv {
        trellis: Trellis,
        pattern: PuncturePattern,
        decision: Decision,
        traceback: usize,
    },
    Rs(RsCode),
}

impl Coder {
    fn build(cfg: &ChainConfig) -> Result<Self> {
        Ok(match &cfg.code {
            CodeSpec::None => Coder::None,
            CodeSpec::Conv {
                constraint_length,
                generators,
                puncture,
            } => {
                let trellis = Trellis::new(*constraint_length, generators)?;
                let pattern = match puncture {
                    Some(m) => PuncturePattern::from_text(m)?,
                    None => PuncturePattern::identity(trellis.outputs()),
                };
                pattern.inputs_per_period(trellis.outputs())?;
                let traceback = cfg
                    .traceback
                    .unwrap_or_else(|| default_traceback(&trellis, !pattern.is_identity()));
                Coder::Conv {
                    trellis,
                    pattern,
                    decision: cfg.decision,
                    traceback,
                }
            }
            CodeSpec::Rs { m, n, k } => Coder::Rs(RsCode::new(*m, *n, *k)?),
        })
    }

    /// Coded bits for `payload`; the decoder needs only the payload length
    /// to undo the framing.
    fn encode(&self, payload: &[u8]) -> Result<Vec<u8>> {
        match self {
            Coder::None => Ok(payload.to_vec()),
            Coder::Conv {
                trellis, pattern, ..
            } => {
                let mut coded = trellis.encode(payload, true);
                let p = pattern.period();
                coded.resize(coded.len().div_ceil(p) * p, 0);
                pattern.puncture(&coded)
            }
            Coder::Rs(code) => {
                let block_bits = code.k() * code.m() as usize;
                let mut bits = payload.to_vec();
                bits.resize(bits.len().div_ceil(block_bits) * block_bits, 0);
                let symbols = bits_to_symbols(&bits, code.m());
                let mut out = Vec::with_capacity(symbols.len() / code.k() * code.n());
                for block in symbols.chunks(code.k()) {
                    out.extend(code.encode(block)?);
                }
                Ok(symbols_to_bits(&out, code.m()))
            }
        }
    }

    /// Decodes LLRs (positive favours 0) covering exactly the coded stream.
    fn decode(&self, llr: &[f64], payload_len: usize) -> Result<Vec<u8>> {
        match self {
            Coder::None => Ok(hard(&llr[..payload_len])),
            Coder::Conv {
                trellis,
                pattern,
                decision,
                traceback,
            } => {
                let full = pattern.depuncture(llr)?;
                let n = trellis.outputs();
                let steps = payload_len + trellis.memory();
                let mut bits = ViterbiDecoder::new(trellis, *decision, *traceback)?
                    .terminated(true)
                    .decode(&full[..n * steps])?;
                bits.truncate(payload_len);
                Ok(bits)
            }
            Coder::Rs(code) => {
                let m = code.m();
                let symbols = bits_to_symbols(&hard(llr), m);
                let mut out = Vec::with_capacity(symbols.len() / code.n() * code.k());
                for block in symbols.chunks(code.n()) {
                    match code.decode(block) {
                        Ok(d) => out.extend(d.message),
                        Err(Error::DecodeFailure) => out.extend_from_slice(&block[..code.k()]),
                        Err(e) => return Err(e),
                    }
                }
                let mut bits = symbols_to_bits(&out, m);
                bits.truncate(payload_len);
                Ok(bits)
            }
        }
    }
}

fn hard(llr: &[f64]) -> Vec<u8> {
    llr.iter().map(|&l| u8::from(l < 0.0)).collect()
}

/// A link ready to run trials. Building it validates the configuration once.
///
/// Framing: the payload is encoded (convolutional codes are flushed with
/// `K-1` zeros, so the decoder ends in state 0 and no transient bits need
/// discarding), zero-padded to whole symbols and, for OFDM, to whole OFDM
/// symbols. The equalizer chain prefixes `training_len` known symbols that
/// are not counted. Exactly `payload_bits` bits are compared per trial.
pub struct Chain {
    cfg: ChainConfig,
    constellation: Constellation,
    coder: Coder,
    grid: Option<OfdmGrid>,
    fir: Option<FirChannel>,
    code_rate: f64,
    rate_text: String,
}

impl Chain {
    pub fn new(cfg: &ChainConfig) -> Result<Self> {
        cfg.validate().stage("config")?;
        let constellation = Constellation::from_name(&cfg.modulation).stage("config")?;
        let coder = Coder::build(cfg).stage("config")?;
        let (num, den) = cfg.code.rate()?;
        let grid = match cfg.chain {
            ChainKind::OfdmQam => {
                let g = &cfg.grid;
                Some(OfdmGrid::plan(g.fft_len, g.used, g.pilots, g.cp_len).stage("config")?)
            }
            _ => None,
        };
        let fir = match (cfg.chain, cfg.channel.taps()) {
            (_, Some(taps)) => Some(FirChannel::new(taps).stage("config")?),
            (ChainKind::EqualizerBpsk, None) => Some(FirChannel::default_dispersive()),
            _ => None,
        };
        Ok(Self {
            cfg: cfg.clone(),
            constellation,
            coder,
            grid,
            fir,
            code_rate: num as f64 / den as f64,
            rate_text: cfg.code.rate_text()?,
        })
    }

    pub fn config(&self) -> &ChainConfig {
        &self.cfg
    }

    pub fn constellation(&self) -> &Constellation {
        &self.constellation
    }

    pub fn code_rate(&self) -> f64 {
        self.code_rate
    }

    /// Operating point for an x-axis value; `+inf` disables the noise.
    pub fn link_budget(&self, axis: XAxis, x: f64) -> Result<LinkBudget> {
        if x.is_nan() || x == f64::NEG_INFINITY {
            return Err(Error::InvalidParameter(format!(
                "operating point {x} is not usable"
            )));
        }
        let k = self.constellation.bits_per_symbol();
        match axis {
            XAxis::SnrDb => LinkBudget::from_snr(x, k, self.code_rate),
            XAxis::Ebn0Db => LinkBudget::from_ebn0(x, k, self.code_rate),
        }
    }

    /// An empty record labelled for this chain.
    pub fn record(&self, bits: u64, errors: u64) -> BerRecord {
        let mut r = BerRecord::new(bits, errors);
        r.chain = self.cfg.chain.to_string();
        r.modulation = self.constellation.name();
        r.family = match self.constellation.family() {
            Family::Psk => "psk".into(),
            Family::Qam => "qam".into(),
        };
        r.code_rate = self.rate_text.clone();
        r
    }

    /// Runs one trial. Deterministic in `(config, axis, x, seed)`.
    pub fn run(&self, axis: XAxis, x: f64, seed: u64) -> Result<BerRecord> {
        let budget = self.link_budget(axis, x).stage("channel")?;
        let payload = SplitMix64::new(mix64(seed ^ DATA_STREAM)).bits(self.cfg.payload_bits);
        let noise_seed = mix64(seed ^ NOISE_STREAM);

        let coded = self.coder.encode(&payload).stage("encode")?;
        let llr = match self.cfg.chain {
            ChainKind::PuncturedBpsk => self.single_carrier(&coded, budget.snr_db, noise_seed),
            ChainKind::OfdmQam => self.ofdm(&coded, budget.snr_db, noise_seed),
            ChainKind::EqualizerBpsk => self.equalized(&coded, budget.snr_db, seed, noise_seed),
        }?;
        let decoded = self
            .coder
            .decode(&llr[..coded.len()], payload.len())
            .stage("decode")?;
        let counted = count_errors(&payload, &decoded).stage("count")?;
        let mut rec = self.record(counted.bits, counted.errors);
        rec.snr_db = Some(budget.snr_db);
        rec.ebn0_db = Some(budget.ebn0_db);
        rec.seed = seed;
        Ok(rec)
    }

    fn modulate(&self, coded: &[u8], multiple: usize) -> Result<Vec<Complex64>> {
        let chunk = self.constellation.bits_per_symbol() as usize * multiple;
        let mut bits = coded.to_vec();
        bits.resize(bits.len().div_ceil(chunk) * chunk, 0);
        self.constellation.modulate(&bits).stage("modulate")
    }

    fn power(&self) -> f64 {
        self.cfg.channel.signal_power_w
    }

    /// Symbols are scaled to `signal_power_w` before noise is added and
    /// scaled back afterwards. For BPSK only the in-phase noise matters, so
    /// the effective real noise variance is `N0/2`.
    fn single_carrier(&self, coded: &[u8], snr_db: f64, noise_seed: u64) -> Result<Vec<f64>> {
        let tx = self.modulate(coded, 1)?;
        let p = self.power();
        let scale = p.sqrt();
        let mut rx: Vec<Complex64> = tx.iter().map(|s| s * scale).collect();
        awgn_in_place(&mut rx, snr_db, p, noise_seed).stage("channel")?;
        if self.constellation.order() == 2 {
            rx.iter_mut().for_each(|s| s.im = 0.0);
        }
        rx.iter_mut().for_each(|s| *s /= scale);
        let var = noise_variance(p, snr_db) / p;
        self.demap(&rx, var)
    }

    /// OFDM: the transmitted waveform is scaled to `signal_power_w` as
    /// measured, and the noise is referenced to the occupied band so that
    /// the per-subcarrier SNR equals `snr_db`.
    fn ofdm(&self, coded: &[u8], snr_db: f64, noise_seed: u64) -> Result<Vec<f64>> {
        let grid = self.grid.as_ref().expect("ofdm chain has a grid");
        let (mut rx, scale, noise_var) = self.ofdm_channel(grid, coded, snr_db, noise_seed)?;
        rx.iter_mut().for_each(|s| *s /= scale);
        let symbols = grid.demodulate(&rx).stage("ofdm")?;
        self.demap(&symbols, noise_var / (scale * scale))
    }

    /// Received OFDM samples at `signal_power_w`, the transmit scale and the
    /// total noise variance.
    fn ofdm_channel(
        &self,
        grid: &OfdmGrid,
        coded: &[u8],
        snr_db: f64,
        noise_seed: u64,
    ) -> Result<(Vec<Complex64>, f64, f64)> {
        let tx = self.modulate(coded, grid.data_indices.len())?;
        let samples = grid.modulate(&tx).stage("ofdm")?;
        let measured = samples.iter().map(|s| s.norm_sqr()).sum::<f64>() / samples.len() as f64;
        let p = self.power();
        let scale = (p / measured).sqrt();
        let occupied = (grid.data_indices.len() + grid.pilot_indices.len()) as f64;
        let reference = p * grid.n_fft as f64 / occupied;
        let mut rx: Vec<Complex64> = samples.iter().map(|s| s * scale).collect();
        awgn_in_place(&mut rx, snr_db, reference, noise_seed).stage("channel")?;
        Ok((rx, scale, noise_variance(reference, snr_db)))
    }

    /// The noisy OFDM waveform of one trial, at `signal_power_w`.
    pub fn ofdm_waveform(&self, axis: XAxis, x: f64, seed: u64) -> Result<Vec<Complex64>> {
        let Some(grid) = self.grid.as_ref() else {
            return Err(Error::Config(format!(
                "{} chain has no OFDM waveform",
                self.cfg.chain
            )));
        };
        let budget = self.link_budget(axis, x).stage("channel")?;
        let payload = SplitMix64::new(mix64(seed ^ DATA_STREAM)).bits(self.cfg.payload_bits);
        let coded = self.coder.encode(&payload).stage("encode")?;
        Ok(self
            .ofdm_channel(grid, &coded, budget.snr_db, mix64(seed ^ NOISE_STREAM))?
            .0)
    }

    /// Training symbols, then the coded payload, through the FIR channel
    /// and AWGN. BPSK over a real channel is received as a real signal. The equalizers are aligned internally, so their outputs
    /// line up with the transmitted symbols one for one.
    fn equalized(&self, coded: &[u8], snr_db: f64, seed: u64, noise_seed: u64) -> Result<Vec<f64>> {
        let eq = self.cfg.equalizer.as_ref().expect("validated");
        let fir = self.fir.as_ref().expect("equalizer chain has a channel");
        let k = self.constellation.bits_per_symbol() as usize;
        let training_bits =
            SplitMix64::new(mix64(seed ^ DATA_STREAM ^ 1)).bits(eq.training_len * k);
        let training = self
            .constellation
            .modulate(&training_bits)
            .stage("modulate")?;
        let mut tx = training.clone();
        tx.extend(self.modulate(coded, 1)?);

        let p = self.power();
        let scale = p.sqrt();
        let mut rx: Vec<Complex64> = fir.apply(&tx).iter().map(|s| s * scale).collect();
        awgn_in_place(&mut rx, snr_db, p, noise_seed).stage("channel")?;
        let real_signal = self.constellation.order() == 2 && fir.taps().iter().all(|h| h.im == 0.0);
        if real_signal {
            rx.iter_mut().for_each(|s| s.im = 0.0);
        }
        rx.iter_mut().for_each(|s| *s /= scale);

        let n_train = training.len();
        let bits =
            equalize(&rx, &training, eq, fir.memory(), &self.constellation).stage("equalize")?;
        Ok(bits[n_train * k..]
            .iter()
            .map(|&b| if b == 0 { 1.0 } else { -1.0 })
            .collect())
    }

    fn demap(&self, symbols: &[Complex64], noise_var: f64) -> Result<Vec<f64>> {
        if noise_var > 0.0 {
            self.constellation
                .demodulate_soft(symbols, noise_var)
                .stage("demodulate")
        } else {
            let bits = self.constellation.demodulate_hard(symbols);
            Ok(bits
                .iter()
                .map(|&b| if b == 0 { 1.0 } else { -1.0 })
                .collect())
        }
    }
}

/// Hard bit decisions for a received block that starts with `training`.
/// MLSE estimates an order-`memory` channel by least squares on the
/// training symbols first.
fn equalize(
    rx: &[Complex64],
    training: &[Complex64],
    cfg: &EqualizerConfig,
    memory: usize,
    constellation: &Constellation,
) -> Result<Vec<u8>> {
    match cfg.kind {
        EqKind::Linear | EqKind::Dfe => {
            let y = AdaptiveEqualizer::new(cfg)?.run(rx, training, constellation)?;
            Ok(constellation.demodulate_hard(&y))
        }
        EqKind::Mlse => {
            let est = estimate_channel_ls(training, &rx[..training.len()], memory)?;
            equalize_mlse(rx, &est, constellation, cfg.traceback)
        }
    }
}

/// One trial of `cfg` at `x` on the given axis.
pub fn run_chain(cfg: &ChainConfig, axis: XAxis, x: f64, seed: u64) -> Result<BerRecord> {
    Chain::new(cfg)?.run(axis, x, seed)
}
