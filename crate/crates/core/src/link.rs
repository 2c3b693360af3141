//! One Monte Carlo trial of the full link, and the run configuration.
//!
//! A trial draws `2R` fading links and the relay delays from its own
//! ChaCha8 stream seeded with `seed ^ trial_index` and counts errors.
//!
//! Frames go out in segments: a reference block followed by
//! `frames_per_draw` data frames, all over the same links, since
//! differential detection needs the channel unchanged across consecutive
//! blocks. Between segments the links evolve by the segment duration,
//! `(frames_per_draw + 1) R (2N + N_cp1 + N_cp2)` symbols.
//!
//! Uncoded trials are one segment. Coded trials (repetition > 1) send one
//! interleaver block of `interleaver_depth` information bits, however many
//! segments that takes.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::ops::AddAssign;

#[allow(unused_imports)] // shadowed by inherent float methods whenever std is linked
use num_traits::Float;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::channel::{ChannelRealization, FirChannel, Link, TapProfile};
use crate::codebook::{CodeKind, UnitaryCode};
use crate::coding::{combine_and_decide, deinterleave, interleave, repeat_encode, InterleaverSpec};
use crate::rxchain::{
    build_effective_channel, destination_receive, differential_decode_fast, fast_decisions,
    strip_and_dft, MatchedFilter, MlDecoder, SamplerMode,
};
use crate::txchain::{
    add_cyclic_prefix, cyclic_prefix, differential_encode, reference_frame, relay_configure,
    relay_receive, scale_source, to_time_domain, DelayProfile, Domain, Frame, PowerSplit,
};
use crate::{Complex, Error, Result};

/// Run parameters. Every field has a default matching the flat-fading,
/// two-relay setup.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default, deny_unknown_fields))]
pub struct NetworkConfig {
    pub code: CodeKind,
    pub subcarriers: usize,
    pub n_cp1: usize,
    pub n_cp2: usize,
    /// Channel length `L` of every link.
    pub taps: usize,
    /// Per-tap variances; equal power when absent.
    pub tap_variances: Option<Vec<f64>>,
    pub side_lobes: usize,
    pub beta: f64,
    /// Normalized Doppler `f_D T_s`; zero gives block-static links.
    pub fdts: f64,
    pub n0: f64,
    /// Total power over noise `P / N0`, in dB.
    pub snr_db: Vec<f64>,
    /// `(P0 / P, Pr / P)`; `(1/2, 1/(2R))` when absent.
    pub power_split: Option<(f64, f64)>,
    pub samplers: Vec<SamplerMode>,
    /// Fractional offset shared by relays `2..=R`.
    pub tau: Vec<f64>,
    /// Integer delays of relays `2..=R` drawn uniformly from `1..=d_max`.
    pub d_max: usize,
    /// Fixed integer delays for all `R` relays (first must be 0); overrides
    /// the random draw.
    pub fixed_delays: Option<Vec<usize>>,
    pub frames_per_draw: usize,
    pub repetition: usize,
    pub interleaver_depth: usize,
    pub seed: u64,
    pub min_bit_errors: u64,
    pub max_bits: u64,
    /// Trials between stop-rule checks.
    pub batch_trials: u64,
}

impl Default for NetworkConfig {
    fn default() -> Self {
        Self {
            code: CodeKind::Od2,
            subcarriers: 64,
            n_cp1: 7,
            n_cp2: 7,
            taps: 1,
            tap_variances: None,
            side_lobes: 1,
            beta: 0.9,
            fdts: 1e-4,
            n0: 1.0,
            snr_db: vec![25.0],
            power_split: None,
            samplers: vec![SamplerMode::SymbolRate],
            tau: vec![0.0],
            d_max: 5,
            fixed_delays: None,
            frames_per_draw: 2,
            repetition: 1,
            interleaver_depth: 10_000,
            seed: 1,
            min_bit_errors: 100,
            max_bits: 10_000_000,
            batch_trials: 64,
        }
    }
}

impl NetworkConfig {
    /// Frequency-selective defaults: `L = 6`, both prefixes 12.
    pub fn selective() -> Self {
        Self { taps: 6, n_cp1: 12, n_cp2: 12, ..Self::default() }
    }

    pub fn relays(&self) -> usize {
        self.code.relays()
    }

    pub fn tap_profile(&self) -> Result<TapProfile> {
        match &self.tap_variances {
            Some(v) => {
                if v.len() != self.taps {
                    return Err(Error::DimensionMismatch { expected: self.taps, actual: v.len() });
                }
                TapProfile::new(v.clone())
            }
            None => TapProfile::uniform(self.taps),
        }
    }

    pub fn matched_filter(&self) -> Result<MatchedFilter> {
        MatchedFilter::new(self.beta, self.side_lobes)
    }

    pub fn powers(&self, snr_db: f64) -> Result<PowerSplit> {
        let total = self.n0 * Float::powf(10.0, snr_db / 10.0);
        let (f0, fr) = self.power_split.unwrap_or((0.5, 0.5 / self.relays() as f64));
        PowerSplit::new(f0 * total, fr * total, self.n0)
    }

    /// Largest integer delay any relay can have.
    pub fn max_whole_delay(&self) -> usize {
        match &self.fixed_delays {
            Some(d) => d.iter().copied().max().unwrap_or(0),
            None => self.d_max,
        }
    }

    /// Smallest `N_cp2` that avoids inter-block interference for every
    /// configured offset.
    pub fn required_n_cp2(&self) -> usize {
        let late = self.tau.iter().any(|&t| MatchedFilter::peak_lag(t) > 0);
        self.taps.saturating_sub(1) + self.max_whole_delay() + usize::from(late) + 2 * self.side_lobes
    }

    /// Channel label used in result tables.
    pub fn channel_label(&self) -> String {
        if self.taps == 1 {
            "flat".into()
        } else {
            alloc::format!("L{}", self.taps)
        }
    }

    pub fn is_coded(&self) -> bool {
        self.repetition > 1
    }

    /// Symbols between the starts of consecutive frames.
    pub fn frame_symbols(&self) -> u64 {
        (self.relays() * (2 * self.subcarriers + self.n_cp1 + self.n_cp2)) as u64
    }

    /// Symbols between the starts of consecutive segments.
    pub fn segment_symbols(&self) -> u64 {
        (self.frames_per_draw as u64 + 1) * self.frame_symbols()
    }

    pub fn frame_bits(&self) -> usize {
        self.subcarriers * UnitaryCode::new(self.code).bits_per_codeword()
    }

    pub fn interleaver(&self) -> Result<InterleaverSpec> {
        if self.is_coded() {
            InterleaverSpec::new(self.interleaver_depth, self.repetition)
        } else {
            InterleaverSpec::new(self.frames_per_draw * self.frame_bits(), 1)
        }
    }

    /// Hard checks; returns non-fatal warnings.
    pub fn validate(&self) -> Result<Vec<String>> {
        let bad = |m: &str| Err(Error::InvalidConfig(m.into()));
        let n = self.subcarriers;
        if n < 2 || !n.is_power_of_two() {
            return bad("number of subcarriers must be a power of two");
        }
        if self.taps == 0 || self.taps > n {
            return bad("channel length must be in 1..=N");
        }
        self.tap_profile()?;
        self.matched_filter()?;
        let required1 = self.taps - 1;
        if self.n_cp1 < required1 {
            return Err(Error::CyclicPrefixTooShort { required: required1, actual: self.n_cp1 });
        }
        let required2 = self.required_n_cp2();
        if self.n_cp2 < required2 {
            return Err(Error::CyclicPrefixTooShort { required: required2, actual: self.n_cp2 });
        }
        if self.n_cp1 >= n || self.n_cp2 >= n {
            return bad("cyclic prefixes must be shorter than N");
        }
        if !(self.n0 > 0.0 && self.n0.is_finite()) {
            return Err(Error::NonPositivePower);
        }
        if !(self.fdts >= 0.0 && self.fdts < 0.5) {
            return bad("fDTs must lie in [0, 0.5)");
        }
        if self.snr_db.iter().any(|s| !s.is_finite()) {
            return bad("P/N0 values must be finite");
        }
        if self.tau.iter().any(|t| !(0.0..=1.0).contains(t)) {
            return bad("fractional offsets must lie in [0, 1]");
        }
        if let Some((f0, fr)) = self.power_split {
            if !(f0 > 0.0 && fr > 0.0) {
                return Err(Error::NonPositivePower);
            }
        }
        if let Some(d) = &self.fixed_delays {
            if d.len() != self.relays() {
                return Err(Error::DimensionMismatch { expected: self.relays(), actual: d.len() });
            }
            if d[0] != 0 {
                return bad("the first relay is the timing reference and must have zero delay");
            }
        }
        if self.frames_per_draw == 0 {
            return bad("at least one data frame per channel draw");
        }
        if ![1, 2, 4].contains(&self.repetition) {
            return bad("repetition factor must be 1, 2 or 4");
        }
        if self.is_coded() && self.code != CodeKind::Od2 {
            return bad("repetition coding needs the soft metrics of the 2x2 orthogonal design");
        }
        if self.batch_trials == 0 {
            return bad("batch size must be positive");
        }
        let mut warnings = Vec::new();
        if self.is_coded() {
            warnings.extend(self.interleaver()?.doppler_warning(self.fdts));
        }
        Ok(warnings)
    }

    /// All (sampler, offset, P/N0) combinations in result-table order.
    pub fn points(&self) -> Vec<SweepPoint> {
        let mut out = Vec::new();
        for &mode in &self.samplers {
            for &tau in &self.tau {
                for &snr_db in &self.snr_db {
                    out.push(SweepPoint { mode, tau, snr_db });
                }
            }
        }
        out.sort_by(|a, b| {
            a.mode.cmp(&b.mode).then(a.tau.total_cmp(&b.tau)).then(a.snr_db.total_cmp(&b.snr_db))
        });
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SweepPoint {
    pub mode: SamplerMode,
    pub tau: f64,
    pub snr_db: f64,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct TrialCounts {
    /// Information bits, padding excluded.
    pub bits: u64,
    pub bit_errors: u64,
    /// Codewords (one per subcarrier per data frame).
    pub blocks: u64,
    pub block_errors: u64,
}

impl AddAssign for TrialCounts {
    fn add_assign(&mut self, rhs: Self) {
        self.bits += rhs.bits;
        self.bit_errors += rhs.bit_errors;
        self.blocks += rhs.blocks;
        self.block_errors += rhs.block_errors;
    }
}

/// Links and relay delays of one trial.
#[derive(Debug, Clone)]
pub struct Network {
    pub channels: ChannelRealization,
    pub delays: DelayProfile,
}

/// Everything about a sweep point that does not change between trials.
#[derive(Debug, Clone)]
pub struct LinkContext {
    cfg: NetworkConfig,
    point: SweepPoint,
    code: UnitaryCode,
    ml: MlDecoder,
    mf: MatchedFilter,
    powers: PowerSplit,
    profile: TapProfile,
}

impl LinkContext {
    pub fn new(cfg: &NetworkConfig, point: SweepPoint) -> Result<Self> {
        cfg.validate()?;
        let code = UnitaryCode::new(cfg.code);
        Ok(Self {
            ml: MlDecoder::new(&code),
            code,
            mf: cfg.matched_filter()?,
            powers: cfg.powers(point.snr_db)?,
            profile: cfg.tap_profile()?,
            cfg: cfg.clone(),
            point,
        })
    }

    pub fn config(&self) -> &NetworkConfig {
        &self.cfg
    }

    pub fn point(&self) -> SweepPoint {
        self.point
    }

    pub fn code(&self) -> &UnitaryCode {
        &self.code
    }

    pub fn powers(&self) -> PowerSplit {
        self.powers
    }

    pub fn matched_filter(&self) -> MatchedFilter {
        self.mf
    }

    pub fn trial_rng(&self, trial_index: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.cfg.seed ^ trial_index)
    }

    pub fn draw_network<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<Network> {
        let relays = self.code.relays();
        let channels =
            ChannelRealization::draw(&self.profile, &self.profile, relays, self.cfg.subcarriers, rng)?;
        let whole = match &self.cfg.fixed_delays {
            Some(d) => d.clone(),
            None => (0..relays)
                .map(|i| if i == 0 || self.cfg.d_max == 0 { 0 } else { rng.random_range(1..=self.cfg.d_max) })
                .collect(),
        };
        let fraction = (0..relays).map(|i| if i == 0 { 0.0 } else { self.point.tau }).collect();
        Ok(Network { channels, delays: DelayProfile::new(whole, fraction)? })
    }

    /// Source frame (frequency domain) to destination frame after the DFT.
    pub fn transmit<R: Rng + ?Sized>(&self, net: &Network, source: &Frame, rng: &mut R) -> Result<Frame> {
        let cfg = &self.cfg;
        let relays = self.code.relays();
        let tx = scale_source(&add_cyclic_prefix(&to_time_domain(source)?, cfg.n_cp1)?, self.powers.p0, relays)?;
        let a = self.powers.amplification();
        let mut relay_tx = Vec::with_capacity(relays);
        for (i, sr) in net.channels.source_relay().iter().enumerate() {
            let z = relay_receive(&tx, sr, self.powers.n0, rng)?;
            let x = relay_configure(&z, &self.code, i, a)?;
            relay_tx.push(x.iter().map(|s| cyclic_prefix(s, cfg.n_cp2)).collect::<Vec<_>>());
        }
        let y = destination_receive(
            &relay_tx,
            net.channels.relay_destination(),
            &net.delays,
            &self.mf,
            self.point.mode,
            cfg.n_cp2,
            self.powers.n0,
            rng,
        )?;
        Frame::new(source.block_index(), Domain::Frequency, strip_and_dft(&y))
    }

    pub fn run_trial(&self, trial_index: u64) -> Result<TrialCounts> {
        self.run_trial_with(trial_index, &self.cfg.interleaver()?)
    }

    /// [`run_trial`](Self::run_trial) with an explicit interleaver: the
    /// trial carries `spec.depth()` information bits, each sent
    /// `spec.columns()` times.
    pub fn run_trial_with(&self, trial_index: u64, spec: &InterleaverSpec) -> Result<TrialCounts> {
        let mut rng = self.trial_rng(trial_index);
        let mut net = self.draw_network(&mut rng)?;
        let info: Vec<u8> = (0..spec.depth()).map(|_| u8::from(rng.random::<bool>())).collect();
        self.run_block(&mut net, &info, spec, &mut rng)
    }

    /// Send `info` over `net`, evolving the links between segments.
    pub fn run_block<R: Rng + ?Sized>(
        &self,
        net: &mut Network,
        info: &[u8],
        spec: &InterleaverSpec,
        rng: &mut R,
    ) -> Result<TrialCounts> {
        let cfg = &self.cfg;
        let n = cfg.subcarriers;
        let per_codeword = self.code.bits_per_codeword();
        let frame_bits = n * per_codeword;
        let segment_bits = cfg.frames_per_draw * frame_bits;
        let coded = interleave(&repeat_encode(info, spec.columns())?, spec);
        let frames = coded.data.len().div_ceil(frame_bits);
        let mut stream = coded.data.clone();
        stream.resize(frames * frame_bits, 0);

        let mut counts = TrialCounts::default();
        let mut soft = Vec::with_capacity(stream.len());
        for (s, segment) in stream.chunks(segment_bits).enumerate() {
            if s > 0 {
                net.channels.evolve(cfg.segment_symbols(), cfg.fdts);
            }
            let mut prev_tx = reference_frame(self.code.relays(), n);
            let mut prev_rx = self.transmit(net, &prev_tx, rng)?;
            for bits in segment.chunks(frame_bits) {
                let truth: Vec<usize> = bits.chunks(per_codeword).map(codeword_index).collect();
                let matrices = truth
                    .iter()
                    .map(|&idx| self.code.build_data_matrix(&self.code.codeword_symbols(idx)))
                    .collect::<Result<Vec<_>>>()?;
                let tx = differential_encode(&self.code, &matrices, &prev_tx)?;
                let rx = self.transmit(net, &tx, rng)?;
                let decided = self.decide(&rx, &prev_rx, &mut soft)?;
                counts.blocks += truth.len() as u64;
                counts.block_errors += truth.iter().zip(&decided).filter(|(a, b)| a != b).count() as u64;
                prev_tx = tx;
                prev_rx = rx;
            }
        }

        soft.truncate(coded.data.len());
        let ordered = deinterleave(&soft, spec)?;
        for (bit, copies) in info.iter().zip(ordered.chunks(spec.columns())) {
            counts.bits += 1;
            counts.bit_errors += u64::from(combine_and_decide(copies) != *bit);
        }
        Ok(counts)
    }

    /// Codeword decisions for one frame; per-bit soft values are appended
    /// to `soft` (hard +-1 for codes without symbol-wise metrics).
    fn decide(&self, rx: &Frame, prev_rx: &Frame, soft: &mut Vec<Complex>) -> Result<Vec<usize>> {
        if self.code.kind() == CodeKind::Od2 {
            let metrics = differential_decode_fast(rx, prev_rx, &self.code)?;
            soft.extend(metrics.iter().flatten().copied());
            Ok(fast_decisions(&self.code, &metrics))
        } else {
            let indices = self.ml.decode(rx, prev_rx)?.indices;
            for &idx in &indices {
                let digits = self.code.codeword_indices(idx);
                soft.extend(digits.iter().map(|&d| Complex::new(1.0 - 2.0 * d as f64, 0.0)));
            }
            Ok(indices)
        }
    }
}

/// Codeword index of a group of per-slot bits, first bit most significant.
fn codeword_index(bits: &[u8]) -> usize {
    bits.iter().fold(0, |acc, &b| acc * 2 + usize::from(b & 1))
}

/// Convenience wrapper building the context on every call.
pub fn run_trial(cfg: &NetworkConfig, point: SweepPoint, trial_index: u64) -> Result<TrialCounts> {
    LinkContext::new(cfg, point)?.run_trial(trial_index)
}

/// One row of the received-SNR table.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct GammaRow {
    pub mode: SamplerMode,
    pub tau: f64,
    pub n: usize,
    pub gamma_db: f64,
}

/// Received SNR per subcarrier with every link a unit-gain single tap, for
/// each configured sampler and offset, at the first configured P/N0.
pub fn gamma_table(cfg: &NetworkConfig) -> Result<Vec<GammaRow>> {
    let snr_db = *cfg.snr_db.first().ok_or(Error::InvalidConfig("no P/N0 value given".into()))?;
    let relays = cfg.relays();
    let unit = |link| FirChannel::from_taps(link, vec![Complex::new(1.0, 0.0)]);
    let channels = ChannelRealization::new(
        (0..relays).map(|i| unit(Link::SourceRelay(i))).collect(),
        (0..relays).map(|i| unit(Link::RelayDestination(i))).collect(),
        cfg.subcarriers,
    )?;
    let code = UnitaryCode::new(cfg.code);
    let mf = cfg.matched_filter()?;
    let powers = cfg.powers(snr_db)?;
    let mut rows = Vec::new();
    for point in cfg.points().into_iter().filter(|p| p.snr_db == snr_db) {
        let fraction = (0..relays).map(|i| if i == 0 { 0.0 } else { point.tau }).collect();
        let delays = DelayProfile::new(vec![0; relays], fraction)?;
        let eff = build_effective_channel(&channels, &delays, &mf, point.mode, &code, &powers);
        rows.extend(eff.gamma.iter().enumerate().map(|(n, &g)| GammaRow {
            mode: point.mode,
            tau: point.tau,
            n,
            gamma_db: 10.0 * Float::log10(g),
        }));
    }
    Ok(rows)
}

/// One random network for the equivalence check between the time-domain
/// pipeline and the per-subcarrier model `A sqrt(P0 R) S[n] H[n]`.
#[derive(Debug, Clone, PartialEq)]
pub struct OracleCase {
    pub code: CodeKind,
    pub taps: usize,
    pub delays: DelayProfile,
    pub mode: SamplerMode,
    pub subcarriers: usize,
    pub snr_db: f64,
    pub seed: u64,
}

impl OracleCase {
    /// `R` in {2, 4}, `L` in {1, 6}, `d_i` in `0..=5`, `tau_i` from a fixed
    /// grid, either sampler.
    pub fn random<R: Rng + ?Sized>(rng: &mut R) -> Result<Self> {
        const TAUS: [f64; 5] = [0.0, 0.25, 0.3, 0.5, 0.7];
        let code = if rng.random() { CodeKind::Od2 } else { CodeKind::Qod4 };
        let relays = code.relays();
        let whole = (0..relays).map(|i| if i == 0 { 0 } else { rng.random_range(0..=5) }).collect();
        let fraction = (0..relays).map(|i| if i == 0 { 0.0 } else { TAUS[rng.random_range(0..TAUS.len())] }).collect();
        Ok(Self {
            code,
            taps: if rng.random() { 1 } else { 6 },
            delays: DelayProfile::new(whole, fraction)?,
            mode: if rng.random() { SamplerMode::SymbolRate } else { SamplerMode::Double },
            subcarriers: 64,
            snr_db: rng.random_range(0.0..40.0),
            seed: rng.random(),
        })
    }

    /// Largest deviation of the noiseless pipeline output from the model,
    /// relative to the largest model magnitude.
    pub fn relative_error(&self) -> Result<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        let n = self.subcarriers;
        let code = UnitaryCode::new(self.code);
        let relays = code.relays();
        let mf = MatchedFilter::new(0.9, 1)?;
        let powers = PowerSplit::from_total(Float::powf(10.0, self.snr_db / 10.0), relays, 1.0)?;
        let profile = TapProfile::uniform(self.taps)?;
        let channels = ChannelRealization::draw(&profile, &profile, relays, n, &mut rng)?;
        let n_cp1 = self.taps - 1;
        let n_cp2 = crate::rxchain::required_destination_prefix(self.taps, &self.delays, &mf);

        let matrices = (0..n)
            .map(|_| code.build_data_matrix(&code.codeword_symbols(rng.random_range(0..code.codebook_size()))))
            .collect::<Result<Vec<_>>>()?;
        let source = differential_encode(&code, &matrices, &reference_frame(relays, n))?;

        let tx = scale_source(&add_cyclic_prefix(&to_time_domain(&source)?, n_cp1)?, powers.p0, relays)?;
        let mut relay_tx = Vec::with_capacity(relays);
        for i in 0..relays {
            let z = relay_receive(&tx, &channels.source_relay()[i], 0.0, &mut rng)?;
            let x = relay_configure(&z, &code, i, powers.amplification())?;
            relay_tx.push(x.iter().map(|s| cyclic_prefix(s, n_cp2)).collect::<Vec<_>>());
        }
        let y = destination_receive(
            &relay_tx,
            channels.relay_destination(),
            &self.delays,
            &mf,
            self.mode,
            n_cp2,
            0.0,
            &mut rng,
        )?;
        let pipeline = strip_and_dft(&y);

        let eff = build_effective_channel(&channels, &self.delays, &mf, self.mode, &code, &powers);
        let model = crate::rxchain::equivalent_model_output(&eff, &code, &powers, &source);
        let scale = model.iter().flatten().map(|v| v.norm()).fold(0.0, f64::max);
        let err = pipeline
            .iter()
            .flatten()
            .zip(model.iter().flatten())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        Ok(err / scale)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn point(tau: f64, snr_db: f64) -> SweepPoint {
        SweepPoint { mode: SamplerMode::SymbolRate, tau, snr_db }
    }

    #[test]
    fn defaults_validate() {
        assert!(NetworkConfig::default().validate().is_ok());
        assert!(NetworkConfig::selective().validate().is_ok());
        let qod = NetworkConfig { code: CodeKind::Qod4, ..NetworkConfig::default() };
        assert!(qod.validate().is_ok());
    }

    #[test]
    fn prefix_inequalities_are_enforced() {
        let cfg = NetworkConfig { n_cp2: 6, ..NetworkConfig::default() };
        assert_eq!(cfg.validate(), Err(Error::CyclicPrefixTooShort { required: 7, actual: 6 }));
        let cfg = NetworkConfig { n_cp1: 4, ..NetworkConfig::selective() };
        assert_eq!(cfg.validate(), Err(Error::CyclicPrefixTooShort { required: 5, actual: 4 }));
        let late = NetworkConfig { tau: vec![0.7], ..NetworkConfig::default() };
        assert_eq!(late.validate(), Err(Error::CyclicPrefixTooShort { required: 8, actual: 7 }));
    }

    #[test]
    fn other_validation_failures() {
        let cases = [
            NetworkConfig { subcarriers: 48, ..NetworkConfig::default() },
            NetworkConfig { repetition: 3, ..NetworkConfig::default() },
            NetworkConfig { code: CodeKind::Qod4, repetition: 2, ..NetworkConfig::default() },
            NetworkConfig { tau: vec![1.2], ..NetworkConfig::default() },
            NetworkConfig { fixed_delays: Some(vec![1, 0]), ..NetworkConfig::default() },
            NetworkConfig { tap_variances: Some(vec![0.5, 0.5]), ..NetworkConfig::default() },
        ];
        for cfg in cases {
            assert!(cfg.validate().is_err(), "{cfg:?}");
        }
    }

    #[test]
    fn points_are_sorted() {
        let cfg = NetworkConfig {
            samplers: vec![SamplerMode::Double, SamplerMode::SymbolRate],
            tau: vec![0.5, 0.0],
            snr_db: vec![30.0, 20.0],
            ..NetworkConfig::default()
        };
        let p = cfg.points();
        assert_eq!(p.len(), 8);
        assert_eq!(p[0], point(0.0, 20.0));
        assert_eq!(p[3], point(0.5, 30.0));
        assert_eq!(p[4].mode, SamplerMode::Double);
        let empty = NetworkConfig { snr_db: vec![], ..NetworkConfig::default() };
        assert!(empty.points().is_empty());
    }

    #[test]
    fn trial_is_deterministic() {
        let cfg = NetworkConfig::default();
        let a = run_trial(&cfg, point(0.3, 10.0), 7).unwrap();
        let b = run_trial(&cfg, point(0.3, 10.0), 7).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.bits, 256);
        assert_eq!(a.blocks, 128);
    }

    #[test]
    fn high_snr_is_error_free() {
        let cfg = NetworkConfig::default();
        let ctx = LinkContext::new(&cfg, point(0.0, 60.0)).unwrap();
        let mut total = TrialCounts::default();
        for t in 0..50 {
            total += ctx.run_trial(t).unwrap();
        }
        assert_eq!(total.bit_errors, 0);
        assert_eq!(total.block_errors, 0);
    }

    #[test]
    fn codeword_index_is_msb_first() {
        assert_eq!(codeword_index(&[1, 0]), 2);
        assert_eq!(codeword_index(&[0, 1, 1, 1]), 7);
    }
}
