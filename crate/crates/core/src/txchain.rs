//! Source encoding (differential encoding, IDFT, cyclic prefix, power
//! scaling) and relay processing (prefix removal, dispersion, amplification).

use alloc::vec::Vec;
use alloc::{format, vec};

#[allow(unused_imports)] // shadowed by inherent float methods whenever std is linked
use num_traits::Float;
use rand::Rng;

use crate::channel::{add_awgn_in_place, FirChannel};
use crate::codebook::{Dispersion, UnitaryCode};
use crate::numerics::{circular_time_reverse, dft, idft, linear_convolve, ComplexMatrix};
use crate::{Complex, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Domain {
    Frequency,
    Time,
}

/// Block `k` as `R` parallel sequences.
#[derive(Debug, Clone, PartialEq)]
pub struct Frame {
    block_index: usize,
    domain: Domain,
    data: Vec<Vec<Complex>>,
    prefix: Option<usize>,
}

impl Frame {
    pub fn new(block_index: usize, domain: Domain, data: Vec<Vec<Complex>>) -> Result<Self> {
        let len = data.first().map_or(0, Vec::len);
        if let Some(bad) = data.iter().find(|s| s.len() != len) {
            return Err(Error::DimensionMismatch { expected: len, actual: bad.len() });
        }
        Ok(Self { block_index, domain, data, prefix: None })
    }

    pub fn block_index(&self) -> usize {
        self.block_index
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    /// Sequences indexed `[r][m]`.
    pub fn data(&self) -> &[Vec<Complex>] {
        &self.data
    }

    pub fn into_data(self) -> Vec<Vec<Complex>> {
        self.data
    }

    /// Prefix length when the frame carries one.
    pub fn prefix(&self) -> Option<usize> {
        self.prefix
    }

    pub fn is_prefixed(&self) -> bool {
        self.prefix.is_some()
    }

    pub fn sequences(&self) -> usize {
        self.data.len()
    }

    /// Length of each sequence without its prefix.
    pub fn len(&self) -> usize {
        self.data.first().map_or(0, Vec::len) - self.prefix.unwrap_or(0)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// `[x_1[n], .., x_R[n]]`.
    pub fn column(&self, n: usize) -> Vec<Complex> {
        let offset = self.prefix.unwrap_or(0);
        self.data.iter().map(|s| s[offset + n]).collect()
    }

    fn expect(&self, domain: Domain, prefixed: bool) -> Result<()> {
        if self.domain != domain {
            return Err(Error::DomainMismatch {
                expected: match domain {
                    Domain::Frequency => "frequency",
                    Domain::Time => "time",
                },
            });
        }
        if self.is_prefixed() != prefixed {
            return Err(Error::DomainMismatch { expected: if prefixed { "prefixed" } else { "unprefixed" } });
        }
        Ok(())
    }
}

/// Integer offsets `d_i` and fractional offsets `tau_i` (in symbol periods)
/// of each relay relative to relay 1, which the destination is synced to.
#[derive(Debug, Clone, PartialEq)]
pub struct DelayProfile {
    whole: Vec<usize>,
    fraction: Vec<f64>,
}

impl DelayProfile {
    /// `tau = 1` is accepted; it is the far end of the symmetric range and
    /// is not folded into `d`.
    pub fn new(whole: Vec<usize>, fraction: Vec<f64>) -> Result<Self> {
        if whole.len() != fraction.len() || whole.is_empty() {
            return Err(Error::InvalidConfig("delay profile needs one (d, tau) pair per relay".into()));
        }
        if whole[0] != 0 || fraction[0] != 0.0 {
            return Err(Error::InvalidConfig("relay 1 is the timing reference: d_1 = tau_1 = 0".into()));
        }
        if fraction.iter().any(|t| !(0.0..=1.0).contains(t)) {
            return Err(Error::InvalidConfig("fractional delays must lie in [0, 1]".into()));
        }
        Ok(Self { whole, fraction })
    }

    pub fn synchronized(relays: usize) -> Self {
        Self { whole: vec![0; relays], fraction: vec![0.0; relays] }
    }

    pub fn whole(&self) -> &[usize] {
        &self.whole
    }

    pub fn fraction(&self) -> &[f64] {
        &self.fraction
    }

    pub fn relays(&self) -> usize {
        self.whole.len()
    }

    pub fn d_max(&self) -> usize {
        self.whole.iter().copied().max().unwrap_or(0)
    }
}

/// Source power `P0`, per-relay power `Pr` and noise power `N0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerSplit {
    pub p0: f64,
    pub pr: f64,
    pub n0: f64,
}

impl PowerSplit {
    pub fn new(p0: f64, pr: f64, n0: f64) -> Result<Self> {
        if !(p0 > 0.0 && pr > 0.0 && n0 > 0.0) {
            return Err(Error::NonPositivePower);
        }
        Ok(Self { p0, pr, n0 })
    }

    /// `P0 = P/2`, `Pr = P/(2R)`.
    pub fn from_total(total: f64, relays: usize, n0: f64) -> Result<Self> {
        Self::new(total / 2.0, total / (2.0 * relays as f64), n0)
    }

    pub fn amplification(&self) -> f64 {
        (self.pr / (self.p0 + self.n0)).sqrt()
    }
}

/// `A = sqrt(Pr / (P0 + N0))`.
pub fn amplification_factor(p0: f64, pr: f64, n0: f64) -> Result<f64> {
    PowerSplit::new(p0, pr, n0).map(|p| p.amplification())
}

/// Block 0: `s[n] = e_1` on every subcarrier.
pub fn reference_frame(relays: usize, subcarriers: usize) -> Frame {
    let mut data = vec![vec![Complex::new(0.0, 0.0); subcarriers]; relays];
    data[0].iter_mut().for_each(|v| *v = Complex::new(1.0, 0.0));
    Frame { block_index: 0, domain: Domain::Frequency, data, prefix: None }
}

/// `s[n]^(k) = V[n] s[n]^(k-1)` on every subcarrier.
pub fn differential_encode(code: &UnitaryCode, matrices: &[ComplexMatrix], prev: &Frame) -> Result<Frame> {
    prev.expect(Domain::Frequency, false)?;
    let (r, n) = (prev.sequences(), prev.len());
    if r != code.relays() {
        return Err(Error::DimensionMismatch { expected: code.relays(), actual: r });
    }
    if matrices.len() != n {
        return Err(Error::DimensionMismatch { expected: n, actual: matrices.len() });
    }
    let mut data = vec![vec![Complex::new(0.0, 0.0); n]; r];
    for (sub, v) in matrices.iter().enumerate() {
        if v.dim() != r {
            return Err(Error::DimensionMismatch { expected: r, actual: v.dim() });
        }
        for (row, value) in v.mul_vec(&prev.column(sub)).into_iter().enumerate() {
            data[row][sub] = value;
        }
    }
    Ok(Frame { block_index: prev.block_index + 1, domain: Domain::Frequency, data, prefix: None })
}

pub fn to_time_domain(frame: &Frame) -> Result<Frame> {
    frame.expect(Domain::Frequency, false)?;
    Ok(Frame { domain: Domain::Time, data: frame.data.iter().map(|s| idft(s)).collect(), ..frame.clone() })
}

pub fn to_frequency_domain(frame: &Frame) -> Result<Frame> {
    frame.expect(Domain::Time, false)?;
    Ok(Frame { domain: Domain::Frequency, data: frame.data.iter().map(|s| dft(s)).collect(), ..frame.clone() })
}

/// `[S[N-n_cp..N], S[0..N]]`.
pub fn cyclic_prefix(seq: &[Complex], n_cp: usize) -> Vec<Complex> {
    let n = seq.len();
    seq[n - n_cp..].iter().chain(seq).copied().collect()
}

pub fn add_cyclic_prefix(frame: &Frame, n_cp: usize) -> Result<Frame> {
    frame.expect(Domain::Time, false)?;
    if n_cp >= frame.len() {
        return Err(Error::InvalidConfig(format!("cyclic prefix {n_cp} must be shorter than N = {}", frame.len())));
    }
    Ok(Frame {
        data: frame.data.iter().map(|s| cyclic_prefix(s, n_cp)).collect(),
        prefix: Some(n_cp),
        ..frame.clone()
    })
}

pub fn strip_cyclic_prefix(frame: &Frame) -> Result<Frame> {
    frame.expect(Domain::Time, true)?;
    let cp = frame.prefix.unwrap_or(0);
    Ok(Frame { data: frame.data.iter().map(|s| s[cp..].to_vec()).collect(), prefix: None, ..frame.clone() })
}

/// Multiplies every sample by `sqrt(P0 R)`.
pub fn scale_source(frame: &Frame, p0: f64, relays: usize) -> Result<Frame> {
    if !(p0 > 0.0) {
        return Err(Error::NonPositivePower);
    }
    let g = (p0 * relays as f64).sqrt();
    Ok(Frame { data: frame.data.iter().map(|s| s.iter().map(|v| v * g).collect()).collect(), ..frame.clone() })
}

/// `Z_{i,r}[m]` at relay `i`: the serial prefixed stream goes through the
/// FIR link by linear convolution, each sub-block's prefix is dropped, and
/// `CN(0, n0)` is added.
pub fn relay_receive<R: Rng + ?Sized>(
    tx: &Frame,
    ch: &FirChannel,
    n0: f64,
    rng: &mut R,
) -> Result<Vec<Vec<Complex>>> {
    let cp = tx.prefix.unwrap_or(0);
    let required = ch.len().saturating_sub(1);
    if cp < required {
        return Err(Error::CyclicPrefixTooShort { required, actual: cp });
    }
    relay_receive_raw(tx, ch, n0, rng)
}

/// [`relay_receive`] without the prefix-length check. A prefix shorter than
/// the channel leaves inter-block interference from the preceding sub-block.
pub fn relay_receive_raw<R: Rng + ?Sized>(
    tx: &Frame,
    ch: &FirChannel,
    n0: f64,
    rng: &mut R,
) -> Result<Vec<Vec<Complex>>> {
    tx.expect(Domain::Time, true)?;
    let cp = tx.prefix.unwrap_or(0);
    let n = tx.len();
    let serial: Vec<Complex> = tx.data.iter().flatten().copied().collect();
    let received = linear_convolve(ch.taps(), &serial);
    Ok((0..tx.sequences())
        .map(|r| {
            let start = r * (n + cp) + cp;
            let mut z = received[start..start + n].to_vec();
            add_awgn_in_place(&mut z, n0, rng);
            z
        })
        .collect())
}

/// `X_i[m] = A (B_i Z_i[m] + C_i Z_i*[<-m>])` for one relay.
pub fn configure_with(z: &[Vec<Complex>], dispersion: &Dispersion, amplification: f64) -> Result<Vec<Vec<Complex>>> {
    let matrix = dispersion.matrix();
    let r = matrix.dim();
    if z.len() != r {
        return Err(Error::DimensionMismatch { expected: r, actual: z.len() });
    }
    let n = z[0].len();
    if let Some(bad) = z.iter().find(|s| s.len() != n) {
        return Err(Error::DimensionMismatch { expected: n, actual: bad.len() });
    }
    let source: Vec<Vec<Complex>> = match dispersion {
        Dispersion::Direct(_) => z.to_vec(),
        Dispersion::Conjugate(_) => z
            .iter()
            .map(|s| circular_time_reverse(s).into_iter().map(|v| v.conj()).collect())
            .collect(),
    };
    let mut out = vec![vec![Complex::new(0.0, 0.0); n]; r];
    for row in 0..r {
        for (col, coeff) in matrix.row(row).iter().enumerate() {
            if *coeff == Complex::new(0.0, 0.0) {
                continue;
            }
            let c = coeff * amplification;
            for (o, s) in out[row].iter_mut().zip(&source[col]) {
                *o += c * s;
            }
        }
    }
    Ok(out)
}

/// Relay `relay` (zero-based) of `code`.
pub fn relay_configure(
    z: &[Vec<Complex>],
    code: &UnitaryCode,
    relay: usize,
    amplification: f64,
) -> Result<Vec<Vec<Complex>>> {
    let dispersion = code
        .dispersion()
        .get(relay)
        .ok_or(Error::DimensionMismatch { expected: code.relays(), actual: relay + 1 })?;
    configure_with(z, dispersion, amplification)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::Link;
    use crate::codebook::CodeKind;
    use crate::numerics::circular_convolve;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex {
        Complex::new(re, im)
    }

    fn seq(rng: &mut ChaCha8Rng, n: usize) -> Vec<Complex> {
        (0..n).map(|_| c(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)).collect()
    }

    #[test]
    fn reference_frames() {
        for r in [2, 4] {
            let f = reference_frame(r, 8);
            for n in 0..8 {
                let mut e1 = vec![c(0.0, 0.0); r];
                e1[0] = c(1.0, 0.0);
                assert_eq!(f.column(n), e1);
            }
        }
    }

    #[test]
    fn identity_codeword_keeps_frame() {
        let code = UnitaryCode::new(CodeKind::Od2);
        let prev = reference_frame(2, 4);
        let eye = vec![ComplexMatrix::identity(2, crate::numerics::MatrixRole::DataMatrix); 4];
        let next = differential_encode(&code, &eye, &prev).unwrap();
        assert_eq!(next.data(), prev.data());
        assert_eq!(next.block_index(), 1);
    }

    #[test]
    fn first_block_is_first_column() {
        let code = UnitaryCode::new(CodeKind::Od2);
        let v = code.build_data_matrix(&[c(1.0, 0.0), c(1.0, 0.0)]).unwrap();
        let next = differential_encode(&code, &vec![v; 4], &reference_frame(2, 4)).unwrap();
        let s = 1.0 / 2f64.sqrt();
        for n in 0..4 {
            let col = next.column(n);
            assert!((col[0] - c(s, 0.0)).norm() < 1e-15 && (col[1] - c(s, 0.0)).norm() < 1e-15);
        }
    }

    #[test]
    fn encode_rejects_wrong_domain() {
        let code = UnitaryCode::new(CodeKind::Od2);
        let t = to_time_domain(&reference_frame(2, 4)).unwrap();
        let v = vec![ComplexMatrix::identity(2, crate::numerics::MatrixRole::DataMatrix); 4];
        assert!(matches!(differential_encode(&code, &v, &t), Err(Error::DomainMismatch { .. })));
    }

    #[test]
    fn constant_spectrum_is_impulse() {
        let f = Frame::new(0, Domain::Frequency, vec![vec![c(0.5, 0.5); 16]]).unwrap();
        let t = to_time_domain(&f).unwrap();
        assert!((t.data()[0][0] - c(0.5, 0.5) * 4.0).norm() < 1e-14);
        assert!(t.data()[0][1..].iter().all(|v| v.norm() < 1e-14));
        let back = to_frequency_domain(&t).unwrap();
        for (a, b) in back.data()[0].iter().zip(&f.data()[0]) {
            assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn prefix_examples() {
        let (a, b, cc, d) = (c(1.0, 0.0), c(2.0, 0.0), c(3.0, 0.0), c(4.0, 0.0));
        let t = to_time_domain(&Frame::new(0, Domain::Frequency, vec![vec![c(0.0, 0.0); 4]]).unwrap()).unwrap();
        let t = Frame { data: vec![vec![a, b, cc, d]], ..t };
        let p = add_cyclic_prefix(&t, 2).unwrap();
        assert_eq!(p.data()[0], vec![cc, d, a, b, cc, d]);
        assert_eq!(strip_cyclic_prefix(&p).unwrap(), t);
        let p0 = add_cyclic_prefix(&t, 0).unwrap();
        assert!(p0.is_prefixed());
        assert_eq!(p0.data()[0], t.data()[0]);
        assert!(add_cyclic_prefix(&t, 4).is_err());
    }

    #[test]
    fn source_scaling() {
        let t = Frame::new(0, Domain::Time, vec![vec![c(1.0, -1.0); 4]; 2]).unwrap();
        assert_eq!(scale_source(&t, 1.0, 1).unwrap(), t);
        let s = scale_source(&t, 2.0, 2).unwrap();
        assert!(s.data()[1].iter().all(|v| (v - c(2.0, -2.0)).norm() < 1e-15));
        assert_eq!(scale_source(&t, 0.0, 2), Err(Error::NonPositivePower));
    }

    #[test]
    fn amplification_examples() {
        assert!((amplification_factor(1.0, 1.0, 1.0).unwrap() - 0.5f64.sqrt()).abs() < 1e-15);
        let split = PowerSplit::from_total(10.0, 2, 1.0).unwrap();
        assert_eq!((split.p0, split.pr), (5.0, 2.5));
        assert!((split.amplification() - (2.5f64 / 6.0).sqrt()).abs() < 1e-15);
        assert!(amplification_factor(1.0, 2.0, 1.0).unwrap() > amplification_factor(1.0, 1.0, 1.0).unwrap());
        assert!(amplification_factor(-1.0, 1.0, 1.0).is_err());
    }

    fn prefixed_source(rng: &mut ChaCha8Rng, r: usize, n: usize, cp: usize) -> (Frame, Frame) {
        let f = Frame::new(3, Domain::Frequency, (0..r).map(|_| seq(rng, n)).collect()).unwrap();
        let t = to_time_domain(&f).unwrap();
        (add_cyclic_prefix(&t, cp).unwrap(), t)
    }

    #[test]
    fn transparent_relay_link() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let (tx, t) = prefixed_source(&mut rng, 2, 8, 0);
        let tx = scale_source(&tx, 3.0, 2).unwrap();
        let ch = FirChannel::from_taps(Link::SourceRelay(0), vec![c(1.0, 0.0)]);
        let z = relay_receive(&tx, &ch, 0.0, &mut rng).unwrap();
        for (zr, sr) in z.iter().zip(t.data()) {
            for (a, b) in zr.iter().zip(sr) {
                assert!((a - b * 6f64.sqrt()).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn prefix_makes_linear_channel_circular() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for taps in [2, 6] {
            let (tx, t) = prefixed_source(&mut rng, 2, 16, taps - 1);
            let q = seq(&mut rng, taps);
            let ch = FirChannel::from_taps(Link::SourceRelay(0), q.clone());
            let z = relay_receive(&tx, &ch, 0.0, &mut rng).unwrap();
            for (zr, sr) in z.iter().zip(t.data()) {
                let expect = circular_convolve(&q, sr);
                assert!(zr.iter().zip(&expect).all(|(a, b)| (a - b).norm() < 1e-10));
            }
        }
    }

    #[test]
    fn short_prefix_is_rejected_or_interferes() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let (tx, t) = prefixed_source(&mut rng, 2, 16, 1);
        let q = seq(&mut rng, 4);
        let ch = FirChannel::from_taps(Link::SourceRelay(0), q.clone());
        assert_eq!(
            relay_receive(&tx, &ch, 0.0, &mut rng),
            Err(Error::CyclicPrefixTooShort { required: 3, actual: 1 })
        );
        let z = relay_receive_raw(&tx, &ch, 0.0, &mut rng).unwrap();
        let expect = circular_convolve(&q, &t.data()[1]);
        assert!(z[1].iter().zip(&expect).any(|(a, b)| (a - b).norm() > 1e-6));
    }

    #[test]
    fn relay_noise_only() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let tx = add_cyclic_prefix(&Frame::new(0, Domain::Time, vec![vec![c(0.0, 0.0); 64]; 2]).unwrap(), 0).unwrap();
        let ch = FirChannel::from_taps(Link::SourceRelay(0), vec![c(1.0, 0.0)]);
        let mut total = 0.0;
        let trials = 2000;
        for _ in 0..trials {
            let z = relay_receive(&tx, &ch, 2.0, &mut rng).unwrap();
            total += z.iter().flatten().map(|v| v.norm_sqr()).sum::<f64>();
        }
        let var = total / (trials * 128) as f64;
        assert!((var - 2.0).abs() < 0.05, "variance {var}");
    }

    #[test]
    fn relay_configuration_od2() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let code = UnitaryCode::new(CodeKind::Od2);
        let z = vec![seq(&mut rng, 8), seq(&mut rng, 8)];
        let a = 0.7;
        let x1 = relay_configure(&z, &code, 0, a).unwrap();
        for r in 0..2 {
            assert!(x1[r].iter().zip(&z[r]).all(|(x, zz)| (x - zz * a).norm() < 1e-15));
        }
        let x2 = relay_configure(&z, &code, 1, a).unwrap();
        for m in 0..8 {
            let rev = (8 - m) % 8;
            assert!((x2[0][m] + z[1][rev].conj() * a).norm() < 1e-15);
            assert!((x2[1][m] - z[0][rev].conj() * a).norm() < 1e-15);
        }
        let eye = Dispersion::Direct(ComplexMatrix::identity(2, crate::numerics::MatrixRole::Dispersion));
        assert_eq!(configure_with(&z, &eye, 1.0).unwrap(), z);
        assert!(configure_with(&z[..1], &eye, 1.0).is_err());
    }

    #[test]
    fn delay_profile_rules() {
        assert!(DelayProfile::new(vec![0, 3], vec![0.0, 0.3]).is_ok());
        assert!(DelayProfile::new(vec![1, 3], vec![0.0, 0.3]).is_err());
        assert!(DelayProfile::new(vec![0, 3], vec![0.1, 0.3]).is_err());
        assert!(DelayProfile::new(vec![0, 3], vec![0.0, 1.3]).is_err());
        assert_eq!(DelayProfile::new(vec![0, 3, 5, 1], vec![0.0; 4]).unwrap().d_max(), 5);
    }
}
