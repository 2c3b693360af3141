//! Frequency-selective Rayleigh links and additive noise.
//!
//! Every tap is a sum of [`SINUSOIDS_PER_TAP`] complex exponentials with
//! independent uniform arrival angles and phases. Its autocorrelation is
//! `sigma_l^2 J0(2 pi fD Ts lag)` exactly in the ensemble, and the marginal is
//! close to `CN(0, sigma_l^2)`. Taps of one link, and distinct links, use
//! independent angle/phase sets.

use alloc::vec::Vec;
use alloc::{format, vec};
use core::f64::consts::PI;

#[allow(unused_imports)] // shadowed by inherent float methods whenever std is linked
use num_traits::Float;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::{Complex, Error, Result};

pub const SINUSOIDS_PER_TAP: usize = 64;

/// Per-tap powers of an `L`-tap FIR link. Sums to one.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct TapProfile {
    variances: Vec<f64>,
}

impl TapProfile {
    pub fn new(variances: Vec<f64>) -> Result<Self> {
        if variances.is_empty() {
            return Err(Error::InvalidConfig("tap profile needs at least one tap".into()));
        }
        if variances.iter().any(|v| !v.is_finite() || *v < 0.0) {
            return Err(Error::InvalidConfig("tap variances must be finite and nonnegative".into()));
        }
        let total: f64 = variances.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidConfig(format!("tap variances sum to {total}, expected 1")));
        }
        Ok(Self { variances })
    }

    pub fn flat() -> Self {
        Self { variances: vec![1.0] }
    }

    /// `taps` equal-power paths.
    pub fn uniform(taps: usize) -> Result<Self> {
        if taps == 0 {
            return Err(Error::InvalidConfig("tap profile needs at least one tap".into()));
        }
        Ok(Self { variances: vec![1.0 / taps as f64; taps] })
    }

    pub fn variances(&self) -> &[f64] {
        &self.variances
    }

    pub fn len(&self) -> usize {
        self.variances.len()
    }

    pub fn is_empty(&self) -> bool {
        self.variances.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Link {
    /// Source to relay `i` (zero-based).
    SourceRelay(usize),
    /// Relay `i` (zero-based) to destination.
    RelayDestination(usize),
}

#[derive(Debug, Clone, PartialEq)]
struct TapFading {
    amplitude: f64,
    doppler: Vec<f64>,
    phases: Vec<f64>,
}

impl TapFading {
    fn value(&self) -> Complex {
        self.phases
            .iter()
            .map(|&p| Complex::from_polar(self.amplitude, p))
            .sum()
    }
}

/// One `L`-tap link, `q_i` or `g_i`, together with its fading state.
#[derive(Debug, Clone, PartialEq)]
pub struct FirChannel {
    link: Link,
    taps: Vec<Complex>,
    fading: Option<Vec<TapFading>>,
}

impl FirChannel {
    /// Static channel with fixed taps; [`FirChannel::evolve`] leaves it unchanged.
    pub fn from_taps(link: Link, taps: Vec<Complex>) -> Self {
        Self { link, taps, fading: None }
    }

    pub fn link(&self) -> Link {
        self.link
    }

    pub fn taps(&self) -> &[Complex] {
        &self.taps
    }

    pub fn len(&self) -> usize {
        self.taps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.taps.is_empty()
    }

    /// Advances the fading process by `elapsed_symbols` symbol periods at
    /// normalized Doppler `fdts`.
    pub fn evolve(&mut self, elapsed_symbols: u64, fdts: f64) {
        let Some(fading) = self.fading.as_mut() else {
            return;
        };
        if fdts == 0.0 || elapsed_symbols == 0 {
            return;
        }
        let omega = 2.0 * PI * fdts * elapsed_symbols as f64;
        for (tap, state) in self.taps.iter_mut().zip(fading.iter_mut()) {
            for (phase, cos_angle) in state.phases.iter_mut().zip(&state.doppler) {
                *phase = (*phase + omega * cos_angle) % (2.0 * PI);
            }
            *tap = state.value();
        }
    }

    /// `Q[n] = sum_l q_l exp(-j 2 pi n l / N)`, no `1/sqrt(N)` factor.
    pub fn to_subcarrier(&self, n: usize) -> Vec<Complex> {
        assert!(self.taps.len() <= n, "channel longer than the DFT size");
        (0..n)
            .map(|k| {
                self.taps
                    .iter()
                    .enumerate()
                    .map(|(l, &q)| q * Complex::from_polar(1.0, -2.0 * PI * ((k * l) % n) as f64 / n as f64))
                    .sum()
            })
            .collect()
    }
}

/// Draws a fresh fading link whose tap `l` has power `profile.variances()[l]`.
pub fn sample_channel<R: Rng + ?Sized>(profile: &TapProfile, link: Link, rng: &mut R) -> FirChannel {
    let fading: Vec<TapFading> = profile
        .variances()
        .iter()
        .map(|&var| {
            let doppler = (0..SINUSOIDS_PER_TAP)
                .map(|_| (2.0 * PI * rng.random::<f64>()).cos())
                .collect();
            let phases = (0..SINUSOIDS_PER_TAP).map(|_| 2.0 * PI * rng.random::<f64>()).collect();
            TapFading { amplitude: (var / SINUSOIDS_PER_TAP as f64).sqrt(), doppler, phases }
        })
        .collect();
    let taps = fading.iter().map(TapFading::value).collect();
    FirChannel { link, taps, fading: Some(fading) }
}

/// Non-mutating form of [`FirChannel::evolve`].
pub fn evolve_jakes(ch: &FirChannel, elapsed_symbols: u64, fdts: f64) -> FirChannel {
    let mut next = ch.clone();
    next.evolve(elapsed_symbols, fdts);
    next
}

pub fn to_subcarrier(ch: &FirChannel, n: usize) -> Vec<Complex> {
    ch.to_subcarrier(n)
}

/// One `CN(0, variance)` draw.
pub fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R, variance: f64) -> Complex {
    let scale = (variance / 2.0).sqrt();
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex::new(re * scale, im * scale)
}

/// Adds `CN(0, n0)` to every sample. The stream is advanced by the same
/// amount whatever `n0` is, so trials stay aligned across SNR points.
pub fn add_awgn<R: Rng + ?Sized>(seq: &[Complex], n0: f64, rng: &mut R) -> Vec<Complex> {
    let mut out = seq.to_vec();
    add_awgn_in_place(&mut out, n0, rng);
    out
}

pub fn add_awgn_in_place<R: Rng + ?Sized>(seq: &mut [Complex], n0: f64, rng: &mut R) {
    for v in seq {
        *v += complex_gaussian(rng, n0);
    }
}

/// All `2R` links of one network plus their per-subcarrier responses.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelRealization {
    sr: Vec<FirChannel>,
    rd: Vec<FirChannel>,
    q: Vec<Vec<Complex>>,
    g: Vec<Vec<Complex>>,
    subcarriers: usize,
}

impl ChannelRealization {
    pub fn new(sr: Vec<FirChannel>, rd: Vec<FirChannel>, subcarriers: usize) -> Result<Self> {
        if sr.len() != rd.len() {
            return Err(Error::DimensionMismatch { expected: sr.len(), actual: rd.len() });
        }
        if sr.iter().chain(&rd).any(|c| c.len() > subcarriers || c.is_empty()) {
            return Err(Error::InvalidConfig("channel length must be in 1..=N".into()));
        }
        let mut out = Self { sr, rd, q: Vec::new(), g: Vec::new(), subcarriers };
        out.refresh();
        Ok(out)
    }

    /// Independent draws for `relays` SR links and `relays` RD links.
    pub fn draw<R: Rng + ?Sized>(
        sr_profile: &TapProfile,
        rd_profile: &TapProfile,
        relays: usize,
        subcarriers: usize,
        rng: &mut R,
    ) -> Result<Self> {
        let sr = (0..relays).map(|i| sample_channel(sr_profile, Link::SourceRelay(i), rng)).collect();
        let rd = (0..relays)
            .map(|i| sample_channel(rd_profile, Link::RelayDestination(i), rng))
            .collect();
        Self::new(sr, rd, subcarriers)
    }

    fn refresh(&mut self) {
        let n = self.subcarriers;
        self.q = self.sr.iter().map(|c| c.to_subcarrier(n)).collect();
        self.g = self.rd.iter().map(|c| c.to_subcarrier(n)).collect();
    }

    pub fn evolve(&mut self, elapsed_symbols: u64, fdts: f64) {
        for c in self.sr.iter_mut().chain(self.rd.iter_mut()) {
            c.evolve(elapsed_symbols, fdts);
        }
        self.refresh();
    }

    pub fn relays(&self) -> usize {
        self.sr.len()
    }

    pub fn subcarriers(&self) -> usize {
        self.subcarriers
    }

    pub fn source_relay(&self) -> &[FirChannel] {
        &self.sr
    }

    pub fn relay_destination(&self) -> &[FirChannel] {
        &self.rd
    }

    /// `Q_i[n]` for relay `i` (zero-based).
    pub fn q(&self, relay: usize) -> &[Complex] {
        &self.q[relay]
    }

    /// `G_i[n]` for relay `i` (zero-based).
    pub fn g(&self, relay: usize) -> &[Complex] {
        &self.g[relay]
    }

    pub fn max_taps(&self) -> usize {
        self.sr.iter().chain(&self.rd).map(FirChannel::len).max().unwrap_or(0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex {
        Complex::new(re, im)
    }

    #[test]
    fn profile_validation() {
        assert!(TapProfile::new(vec![0.5, 0.5]).is_ok());
        assert!(TapProfile::new(vec![0.5, 0.4]).is_err());
        assert!(TapProfile::new(vec![]).is_err());
        assert!(TapProfile::new(vec![1.5, -0.5]).is_err());
        let six = TapProfile::uniform(6).unwrap();
        assert!((six.variances().iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn zero_variance_tap_is_exactly_zero() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let profile = TapProfile::new(vec![1.0, 0.0]).unwrap();
        let mut ch = sample_channel(&profile, Link::SourceRelay(0), &mut rng);
        assert_eq!(ch.taps()[1], c(0.0, 0.0));
        ch.evolve(1000, 1e-3);
        assert_eq!(ch.taps()[1], c(0.0, 0.0));
    }

    #[test]
    fn static_doppler_leaves_taps() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let ch = sample_channel(&TapProfile::uniform(6).unwrap(), Link::RelayDestination(1), &mut rng);
        assert_eq!(evolve_jakes(&ch, 10_000, 0.0), ch);
    }

    #[test]
    fn subcarrier_response_examples() {
        let flat = FirChannel::from_taps(Link::SourceRelay(0), vec![c(0.3, -0.2)]);
        assert!(flat.to_subcarrier(8).iter().all(|v| *v == c(0.3, -0.2)));
        let delay = FirChannel::from_taps(Link::SourceRelay(0), vec![c(0.0, 0.0), c(1.0, 0.0)]);
        let expect = [c(1.0, 0.0), c(0.0, -1.0), c(-1.0, 0.0), c(0.0, 1.0)];
        for (a, b) in delay.to_subcarrier(4).iter().zip(expect) {
            assert!((a - b).norm() < 1e-15);
        }
    }

    #[test]
    fn awgn_zero_noise_is_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let x = vec![c(1.0, 2.0), c(-0.5, 0.25)];
        assert_eq!(add_awgn(&x, 0.0, &mut rng), x);
    }

    #[test]
    fn realization_dimension_checks() {
        let ch = |i| FirChannel::from_taps(Link::SourceRelay(i), vec![c(1.0, 0.0)]);
        assert!(ChannelRealization::new(vec![ch(0)], vec![ch(0), ch(1)], 4).is_err());
        let long = FirChannel::from_taps(Link::SourceRelay(0), vec![c(1.0, 0.0); 5]);
        assert!(ChannelRealization::new(vec![long], vec![ch(0)], 4).is_err());
    }
}
