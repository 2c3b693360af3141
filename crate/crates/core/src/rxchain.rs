//! Destination: matched-filter sampling of the asynchronous relay signals,
//! prefix removal, DFT, the per-subcarrier equivalent model and
//! non-coherent differential decoding.
//!
//! Sampling works directly on the symbol-spaced model: relay `i` arrives
//! `d_i + tau_i` symbols late and contributes `p(l T_s - tau_i)` times its
//! channel-filtered stream at lags `l = -L_mf..=L_mf`. The double-sampling
//! receiver adds the half-symbol sample `p((l + 0.5) T_s - tau_i)` with equal
//! gain, which doubles the destination noise.
//!
//! The DFT window is advanced by `L_mf` samples into the cyclic prefix and the
//! block is rotated back by the same amount. The earliest pulse lobe then
//! never reaches into the next sub-block, which is what makes
//! `N_cp2 >= L - 1 + d_max + 2 L_mf` sufficient.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;
use core::fmt;
use core::str::FromStr;

#[allow(unused_imports)] // shadowed by inherent float methods whenever std is linked
use num_traits::Float;
use rand::Rng;

use crate::channel::{add_awgn_in_place, ChannelRealization, FirChannel};
use crate::codebook::{CodeKind, UnitaryCode};
use crate::numerics::{dft, linear_convolve, ComplexMatrix};
use crate::txchain::{DelayProfile, Domain, Frame, PowerSplit};
use crate::{Complex, Error, Result};

/// Raised-cosine pulse / matched filter with `side_lobes` significant lobes
/// on each side.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct MatchedFilter {
    beta: f64,
    side_lobes: usize,
}

impl MatchedFilter {
    pub fn new(beta: f64, side_lobes: usize) -> Result<Self> {
        if !(beta > 0.0 && beta <= 1.0) {
            return Err(Error::InvalidConfig("roll-off must lie in (0, 1]".into()));
        }
        Ok(Self { beta, side_lobes })
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn side_lobes(&self) -> usize {
        self.side_lobes
    }

    /// `p(t)` with `t` in symbol periods.
    pub fn pulse(&self, t: f64) -> f64 {
        let b = self.beta;
        let denom = 1.0 - 4.0 * b * b * t * t;
        if denom.abs() < 1e-10 {
            return PI / 4.0 * sinc(1.0 / (2.0 * b));
        }
        sinc(t) * (PI * b * t).cos() / denom
    }

    /// Index of the sample nearest the peak of a pulse arriving `tau`
    /// symbols late: 0 for `tau <= 0.5`, 1 above.
    pub fn peak_lag(tau: f64) -> isize {
        if tau > 0.5 {
            1
        } else {
            0
        }
    }

    /// Weights of the `2 L_mf + 1` significant samples around the peak of a
    /// relay that is `tau` symbols late.
    pub fn lag_weights(&self, mode: SamplerMode, tau: f64) -> LagWeights {
        let lobes = self.side_lobes as isize;
        let first = Self::peak_lag(tau) - lobes;
        let weights = (first..=first + 2 * lobes)
            .map(|l| {
                let on_grid = self.pulse(l as f64 - tau);
                match mode {
                    SamplerMode::SymbolRate => on_grid,
                    SamplerMode::Double => on_grid + self.pulse(l as f64 + 0.5 - tau),
                }
            })
            .collect();
        LagWeights { first, weights }
    }
}

/// `weights[j]` applies at lag `first + j` symbols.
#[derive(Debug, Clone, PartialEq)]
pub struct LagWeights {
    pub first: isize,
    pub weights: Vec<f64>,
}

impl LagWeights {
    pub fn lags(&self) -> impl Iterator<Item = (isize, f64)> + '_ {
        self.weights.iter().enumerate().map(move |(j, &w)| (self.first + j as isize, w))
    }
}

pub fn pulse(mf: &MatchedFilter, t_over_ts: f64) -> f64 {
    mf.pulse(t_over_ts)
}

/// `sin(pi x) / (pi x)`.
pub fn sinc(x: f64) -> f64 {
    if x == 0.0 {
        1.0
    } else {
        (PI * x).sin() / (PI * x)
    }
}

/// Symbol-rate sampling (D-OFDM1) or double sampling with equal-gain
/// combining (D-OFDM2).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum SamplerMode {
    #[cfg_attr(feature = "serde", serde(rename = "D-OFDM1"))]
    SymbolRate,
    #[cfg_attr(feature = "serde", serde(rename = "D-OFDM2"))]
    Double,
}

impl SamplerMode {
    /// Independent `N0` noise samples summed per output sample.
    pub fn noise_samples(self) -> usize {
        match self {
            SamplerMode::SymbolRate => 1,
            SamplerMode::Double => 2,
        }
    }
}

impl fmt::Display for SamplerMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SamplerMode::SymbolRate => "D-OFDM1",
            SamplerMode::Double => "D-OFDM2",
        })
    }
}

impl FromStr for SamplerMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "d-ofdm1" | "symbol" | "symbol_rate" => Ok(SamplerMode::SymbolRate),
            "d-ofdm2" | "double" => Ok(SamplerMode::Double),
            other => Err(Error::InvalidConfig(alloc::format!("unknown sampler mode `{other}`"))),
        }
    }
}

/// `L - 1 + d_max + 2 L_mf`, where a relay more than half a symbol late
/// counts one extra whole symbol of delay.
pub fn required_destination_prefix(taps: usize, delays: &DelayProfile, mf: &MatchedFilter) -> usize {
    let reach = delays
        .whole()
        .iter()
        .zip(delays.fraction())
        .map(|(&d, &tau)| d + MatchedFilter::peak_lag(tau) as usize)
        .max()
        .unwrap_or(0);
    taps.saturating_sub(1) + reach + 2 * mf.side_lobes()
}

/// `Y_r[m]` after prefix removal. `relay_tx[i][r]` is relay `i`'s prefixed
/// sub-block `r` (length `N + n_cp2`).
#[allow(clippy::too_many_arguments)]
pub fn destination_receive<R: Rng + ?Sized>(
    relay_tx: &[Vec<Vec<Complex>>],
    rd: &[FirChannel],
    delays: &DelayProfile,
    mf: &MatchedFilter,
    mode: SamplerMode,
    n_cp2: usize,
    n0: f64,
    rng: &mut R,
) -> Result<Vec<Vec<Complex>>> {
    let taps = rd.iter().map(FirChannel::len).max().unwrap_or(1);
    let required = required_destination_prefix(taps, delays, mf);
    if n_cp2 < required {
        return Err(Error::CyclicPrefixTooShort { required, actual: n_cp2 });
    }
    destination_receive_raw(relay_tx, rd, delays, mf, mode, n_cp2, n0, rng)
}

/// [`destination_receive`] without the prefix-length check; a short prefix
/// produces inter-block interference instead of an error.
#[allow(clippy::too_many_arguments)]
pub fn destination_receive_raw<R: Rng + ?Sized>(
    relay_tx: &[Vec<Vec<Complex>>],
    rd: &[FirChannel],
    delays: &DelayProfile,
    mf: &MatchedFilter,
    mode: SamplerMode,
    n_cp2: usize,
    n0: f64,
    rng: &mut R,
) -> Result<Vec<Vec<Complex>>> {
    let relays = relay_tx.len();
    if rd.len() != relays {
        return Err(Error::DimensionMismatch { expected: relays, actual: rd.len() });
    }
    if delays.relays() != relays {
        return Err(Error::DimensionMismatch { expected: relays, actual: delays.relays() });
    }
    let blocks = relay_tx.first().map_or(0, Vec::len);
    let block_len = relay_tx.first().and_then(|b| b.first()).map_or(0, Vec::len);
    if block_len <= n_cp2 {
        return Err(Error::InvalidConfig("sub-blocks must be longer than their prefix".into()));
    }
    let n = block_len - n_cp2;
    for tx in relay_tx {
        if tx.len() != blocks {
            return Err(Error::DimensionMismatch { expected: blocks, actual: tx.len() });
        }
        if let Some(bad) = tx.iter().find(|s| s.len() != block_len) {
            return Err(Error::DimensionMismatch { expected: block_len, actual: bad.len() });
        }
    }

    let lobes = mf.side_lobes() as isize;
    let mut y = vec![vec![Complex::new(0.0, 0.0); n]; blocks];
    for (i, tx) in relay_tx.iter().enumerate() {
        let serial: Vec<Complex> = tx.iter().flatten().copied().collect();
        let filtered = linear_convolve(rd[i].taps(), &serial);
        let weights = mf.lag_weights(mode, delays.fraction()[i]);
        let delay = delays.whole()[i] as isize;
        for (r, out) in y.iter_mut().enumerate() {
            let window = (r * block_len + n_cp2) as isize - lobes;
            for pos in 0..n {
                let t = window + pos as isize - delay;
                let mut acc = Complex::new(0.0, 0.0);
                for (lag, w) in weights.lags() {
                    let idx = t - lag;
                    if idx >= 0 && (idx as usize) < filtered.len() {
                        acc += filtered[idx as usize] * w;
                    }
                }
                out[(pos + n - mf.side_lobes() % n) % n] += acc;
            }
        }
    }
    for out in &mut y {
        for _ in 0..mode.noise_samples() {
            add_awgn_in_place(out, n0, rng);
        }
    }
    Ok(y)
}

/// Per-sequence unitary DFT.
pub fn strip_and_dft(y: &[Vec<Complex>]) -> Vec<Vec<Complex>> {
    y.iter().map(|s| dft(s)).collect()
}

/// Per-subcarrier equivalent channel seen by the decoder.
#[derive(Debug, Clone, PartialEq)]
pub struct EffectiveChannel {
    /// `G~_i[n]`, indexed `[i][n]`.
    pub g_tilde: Vec<Vec<Complex>>,
    /// `H_i[n] = Q^_i[n] G~_i[n]`, indexed `[i][n]`.
    pub h: Vec<Vec<Complex>>,
    /// Equivalent noise variance per subcarrier.
    pub sigma2: Vec<f64>,
    /// Received SNR per subcarrier (linear).
    pub gamma: Vec<f64>,
}

/// `sum_l w_l exp(-j 2 pi n l / N)` for one relay.
pub fn pulse_response(mf: &MatchedFilter, mode: SamplerMode, tau: f64, n: usize) -> Vec<Complex> {
    let weights = mf.lag_weights(mode, tau);
    (0..n)
        .map(|k| {
            weights
                .lags()
                .map(|(l, w)| {
                    Complex::from_polar(w, -2.0 * PI * (k as isize * l).rem_euclid(n as isize) as f64 / n as f64)
                })
                .sum()
        })
        .collect()
}

pub fn build_effective_channel(
    ch: &ChannelRealization,
    delays: &DelayProfile,
    mf: &MatchedFilter,
    mode: SamplerMode,
    code: &UnitaryCode,
    powers: &PowerSplit,
) -> EffectiveChannel {
    let n = ch.subcarriers();
    let a2 = powers.amplification().powi(2);
    let g_tilde: Vec<Vec<Complex>> = (0..ch.relays())
        .map(|i| {
            let lobes = pulse_response(mf, mode, delays.fraction()[i], n);
            let d = delays.whole()[i];
            ch.g(i)
                .iter()
                .zip(&lobes)
                .enumerate()
                .map(|(k, (g, p))| g * p * Complex::from_polar(1.0, -2.0 * PI * ((k * d) % n) as f64 / n as f64))
                .collect()
        })
        .collect();
    let h = g_tilde
        .iter()
        .enumerate()
        .map(|(i, gt)| {
            let conj = code.dispersion()[i].is_conjugate();
            ch.q(i)
                .iter()
                .zip(gt)
                .map(|(q, g)| if conj { q.conj() * g } else { q * g })
                .collect()
        })
        .collect();
    let floor = mode.noise_samples() as f64;
    let mut sigma2 = Vec::with_capacity(n);
    let mut gamma = Vec::with_capacity(n);
    for k in 0..n {
        let gain: f64 = g_tilde.iter().map(|g| g[k].norm_sqr()).sum();
        let s2 = powers.n0 * (floor + a2 * gain);
        sigma2.push(s2);
        gamma.push(a2 * powers.p0 * gain / s2);
    }
    EffectiveChannel { g_tilde, h, sigma2, gamma }
}

/// Noiseless `A sqrt(P0 R) S[n] H[n]` for a frequency-domain source frame;
/// returns `[r][n]`.
pub fn equivalent_model_output(
    eff: &EffectiveChannel,
    code: &UnitaryCode,
    powers: &PowerSplit,
    source: &Frame,
) -> Vec<Vec<Complex>> {
    let r = code.relays();
    let n = source.len();
    let gain = powers.amplification() * (powers.p0 * r as f64).sqrt();
    let mut y = vec![vec![Complex::new(0.0, 0.0); n]; r];
    for k in 0..n {
        let s = source.column(k);
        let s_conj: Vec<Complex> = s.iter().map(|v| v.conj()).collect();
        for (i, disp) in code.dispersion().iter().enumerate() {
            let col = disp.matrix().mul_vec(if disp.is_conjugate() { &s_conj } else { &s });
            for (row, v) in col.into_iter().enumerate() {
                y[row][k] += v * eff.h[i][k] * gain;
            }
        }
    }
    y
}

fn check_pair(yk: &Frame, ykm1: &Frame) -> Result<()> {
    for f in [yk, ykm1] {
        if f.domain() != Domain::Frequency || f.is_prefixed() {
            return Err(Error::DomainMismatch { expected: "frequency" });
        }
    }
    if yk.block_index() != ykm1.block_index() + 1 {
        return Err(Error::BlockDiscontinuity { previous: ykm1.block_index(), next: yk.block_index() });
    }
    if yk.sequences() != ykm1.sequences() || yk.len() != ykm1.len() {
        return Err(Error::DimensionMismatch { expected: ykm1.len(), actual: yk.len() });
    }
    Ok(())
}

/// Exhaustive search result: chosen codeword index and the metric
/// `||y_k - V y_{k-1}||` of every codeword, per subcarrier.
#[derive(Debug, Clone, PartialEq)]
pub struct MlDecisions {
    pub indices: Vec<usize>,
    pub metrics: Vec<Vec<f64>>,
}

/// Exhaustive non-coherent decoder with the codebook enumerated once.
#[derive(Debug, Clone)]
pub struct MlDecoder {
    codewords: Vec<ComplexMatrix>,
    relays: usize,
}

impl MlDecoder {
    pub fn new(code: &UnitaryCode) -> Self {
        Self { codewords: code.enumerate_codewords(), relays: code.relays() }
    }

    pub fn codewords(&self) -> &[ComplexMatrix] {
        &self.codewords
    }

    /// Lowest-index codeword minimizing `||y_k - V y_{k-1}||` on one subcarrier.
    pub fn decide(&self, yk: &[Complex], ykm1: &[Complex], metrics: Option<&mut Vec<f64>>) -> usize {
        let mut best = 0;
        let mut best_metric = f64::INFINITY;
        let mut sink = metrics;
        for (idx, v) in self.codewords.iter().enumerate() {
            let metric = v
                .mul_vec(ykm1)
                .iter()
                .zip(yk)
                .map(|(p, y)| (y - p).norm_sqr())
                .sum::<f64>()
                .sqrt();
            if let Some(m) = sink.as_deref_mut() {
                m.push(metric);
            }
            if metric < best_metric {
                best = idx;
                best_metric = metric;
            }
        }
        best
    }

    pub fn decode(&self, yk: &Frame, ykm1: &Frame) -> Result<MlDecisions> {
        check_pair(yk, ykm1)?;
        if yk.sequences() != self.relays {
            return Err(Error::DimensionMismatch { expected: self.relays, actual: yk.sequences() });
        }
        let mut indices = Vec::with_capacity(yk.len());
        let mut metrics = Vec::with_capacity(yk.len());
        for k in 0..yk.len() {
            let mut m = Vec::with_capacity(self.codewords.len());
            indices.push(self.decide(&yk.column(k), &ykm1.column(k), Some(&mut m)));
            metrics.push(m);
        }
        Ok(MlDecisions { indices, metrics })
    }
}

pub fn differential_decode_ml(yk: &Frame, ykm1: &Frame, code: &UnitaryCode) -> Result<MlDecisions> {
    MlDecoder::new(code).decode(yk, ykm1)
}

/// Symbol-by-symbol soft metrics `(v~_1[n], v~_2[n])` of the 2x2 orthogonal
/// design.
pub fn differential_decode_fast(yk: &Frame, ykm1: &Frame, code: &UnitaryCode) -> Result<Vec<[Complex; 2]>> {
    if code.kind() != CodeKind::Od2 {
        return Err(Error::NotOrthogonalDesign);
    }
    check_pair(yk, ykm1)?;
    if yk.sequences() != 2 {
        return Err(Error::NotOrthogonalDesign);
    }
    let (a, b) = (&yk.data()[0], &yk.data()[1]);
    let (c, d) = (&ykm1.data()[0], &ykm1.data()[1]);
    Ok((0..yk.len())
        .map(|k| {
            let v1 = a[k] * c[k].conj() + b[k].conj() * d[k];
            let v2 = b[k] * c[k].conj() - a[k].conj() * d[k];
            [v1, v2]
        })
        .collect())
}

/// Hard codeword decisions from the fast metrics: nearest point per slot,
/// ties to the lower index.
pub fn fast_decisions(code: &UnitaryCode, metrics: &[[Complex; 2]]) -> Vec<usize> {
    let slots = code.slots();
    metrics
        .iter()
        .map(|[v1, v2]| slots[0].nearest(*v1) * slots[1].points().len() + slots[1].nearest(*v2))
        .collect()
}
