//! Constellations, unitary data matrices and relay dispersion matrices.
//!
//! Two codes ship: the 2x2 orthogonal design over BPSK (`od2`) and the 4x4
//! quasi-orthogonal design (`qod4`) with BPSK in slots 1-2 and pi/2-rotated
//! BPSK in slots 3-4.
//!
//! The commonly printed relay-4 matrix for `qod4` has a last row
//! `[1 0 1 0]`. That matrix does not commute with the data matrices, so block
//! `k` would no longer equal `V` times block `k-1` at the destination. It
//! also has a row of norm `sqrt(2)`, which inflates relay-4 noise. The
//! default code uses the permutation-consistent row `[1 0 0 0]`;
//! [`qod4_printed_dispersion`] keeps the printed form available for
//! comparison.

use alloc::vec::Vec;
use alloc::{format, vec};
use core::fmt;
use core::str::FromStr;

#[allow(unused_imports)] // shadowed by inherent float methods whenever std is linked
use num_traits::Float;

use crate::numerics::{ComplexMatrix, MatrixRole};
use crate::{Complex, Error, Result};

const POINT_TOL: f64 = 1e-9;

/// Unit-modulus point set.
#[derive(Debug, Clone, PartialEq)]
pub struct Constellation {
    points: Vec<Complex>,
    bits_per_symbol: u32,
    rotation: f64,
}

impl Constellation {
    /// bit 0 -> +1, bit 1 -> -1.
    pub fn bpsk() -> Self {
        Self { points: vec![Complex::new(1.0, 0.0), Complex::new(-1.0, 0.0)], bits_per_symbol: 1, rotation: 0.0 }
    }

    /// bit 0 -> +j, bit 1 -> -j.
    pub fn rotated_bpsk() -> Self {
        Self {
            points: vec![Complex::new(0.0, 1.0), Complex::new(0.0, -1.0)],
            bits_per_symbol: 1,
            rotation: core::f64::consts::FRAC_PI_2,
        }
    }

    pub fn points(&self) -> &[Complex] {
        &self.points
    }

    pub fn bits_per_symbol(&self) -> u32 {
        self.bits_per_symbol
    }

    pub fn rotation(&self) -> f64 {
        self.rotation
    }

    pub fn index_of(&self, symbol: Complex) -> Option<usize> {
        self.points.iter().position(|p| (p - symbol).norm() < POINT_TOL)
    }

    /// Nearest point to `soft`; ties go to the lower index.
    pub fn nearest(&self, soft: Complex) -> usize {
        let mut best = 0;
        let mut best_dist = f64::INFINITY;
        for (i, p) in self.points.iter().enumerate() {
            let d = (soft - p).norm_sqr();
            if d < best_dist {
                best = i;
                best_dist = d;
            }
        }
        best
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum CodeKind {
    /// 2x2 orthogonal design, two relays.
    Od2,
    /// 4x4 quasi-orthogonal design, four relays.
    Qod4,
}

impl CodeKind {
    pub fn relays(self) -> usize {
        match self {
            CodeKind::Od2 => 2,
            CodeKind::Qod4 => 4,
        }
    }
}

impl fmt::Display for CodeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CodeKind::Od2 => "od2",
            CodeKind::Qod4 => "qod4",
        })
    }
}

impl FromStr for CodeKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "od2" => Ok(CodeKind::Od2),
            "qod4" => Ok(CodeKind::Qod4),
            other => Err(Error::InvalidConfig(format!("unknown code kind `{other}`"))),
        }
    }
}

/// Relay `i` forwards either `B_i Z` or `C_i conj(Z[<-m>])`, never both.
#[derive(Debug, Clone, PartialEq)]
pub enum Dispersion {
    /// `C_i = 0`.
    Direct(ComplexMatrix),
    /// `B_i = 0`; the relay applies `C_i` to the conjugated circular
    /// time-reversal of what it received.
    Conjugate(ComplexMatrix),
}

impl Dispersion {
    pub fn matrix(&self) -> &ComplexMatrix {
        match self {
            Dispersion::Direct(m) | Dispersion::Conjugate(m) => m,
        }
    }

    pub fn is_conjugate(&self) -> bool {
        matches!(self, Dispersion::Conjugate(_))
    }

    /// `B_i`.
    pub fn b(&self) -> ComplexMatrix {
        match self {
            Dispersion::Direct(m) => m.clone(),
            Dispersion::Conjugate(m) => ComplexMatrix::zeros(m.dim(), MatrixRole::Dispersion),
        }
    }

    /// `C_i`.
    pub fn c(&self) -> ComplexMatrix {
        match self {
            Dispersion::Direct(m) => ComplexMatrix::zeros(m.dim(), MatrixRole::Dispersion),
            Dispersion::Conjugate(m) => m.clone(),
        }
    }
}

fn od2_dispersion() -> Vec<Dispersion> {
    vec![
        Dispersion::Direct(ComplexMatrix::identity(2, MatrixRole::Dispersion)),
        Dispersion::Conjugate(ComplexMatrix::from_real_rows([[0.0, -1.0], [1.0, 0.0]], MatrixRole::Dispersion)),
    ]
}

fn qod4_dispersion(last_row: [f64; 4]) -> Vec<Dispersion> {
    vec![
        Dispersion::Direct(ComplexMatrix::identity(4, MatrixRole::Dispersion)),
        Dispersion::Conjugate(ComplexMatrix::from_real_rows(
            [[0.0, -1.0, 0.0, 0.0], [1.0, 0.0, 0.0, 0.0], [0.0, 0.0, 0.0, -1.0], [0.0, 0.0, 1.0, 0.0]],
            MatrixRole::Dispersion,
        )),
        Dispersion::Conjugate(ComplexMatrix::from_real_rows(
            [[0.0, 0.0, -1.0, 0.0], [0.0, 0.0, 0.0, -1.0], [1.0, 0.0, 0.0, 0.0], [0.0, 1.0, 0.0, 0.0]],
            MatrixRole::Dispersion,
        )),
        Dispersion::Direct(ComplexMatrix::from_real_rows(
            [[0.0, 0.0, 0.0, 1.0], [0.0, 0.0, -1.0, 0.0], [0.0, -1.0, 0.0, 0.0], last_row],
            MatrixRole::Dispersion,
        )),
    ]
}

/// The `qod4` relay set with `B_4`'s last row exactly as commonly printed,
/// `[1 0 1 0]`. Not a valid differential code; see the module docs.
pub fn qod4_printed_dispersion() -> Vec<Dispersion> {
    qod4_dispersion([1.0, 0.0, 1.0, 0.0])
}

/// `(B_i, C_i)` pairs of the default relay set for `kind`.
pub fn dispersion_matrices(kind: CodeKind) -> Vec<(ComplexMatrix, ComplexMatrix)> {
    UnitaryCode::new(kind).dispersion_pairs()
}

/// A unitary space-time code together with the relay configuration that
/// synthesizes it at the destination.
#[derive(Debug, Clone, PartialEq)]
pub struct UnitaryCode {
    kind: CodeKind,
    slots: Vec<Constellation>,
    dispersion: Vec<Dispersion>,
}

impl UnitaryCode {
    pub fn new(kind: CodeKind) -> Self {
        match kind {
            CodeKind::Od2 => Self {
                kind,
                slots: vec![Constellation::bpsk(), Constellation::bpsk()],
                dispersion: od2_dispersion(),
            },
            CodeKind::Qod4 => Self {
                kind,
                slots: vec![
                    Constellation::bpsk(),
                    Constellation::bpsk(),
                    Constellation::rotated_bpsk(),
                    Constellation::rotated_bpsk(),
                ],
                dispersion: qod4_dispersion([1.0, 0.0, 0.0, 0.0]),
            },
        }
    }

    /// Same data matrices, custom relay configuration.
    pub fn with_dispersion(kind: CodeKind, dispersion: Vec<Dispersion>) -> Result<Self> {
        let r = kind.relays();
        if dispersion.len() != r {
            return Err(Error::DimensionMismatch { expected: r, actual: dispersion.len() });
        }
        if let Some(bad) = dispersion.iter().find(|d| d.matrix().dim() != r) {
            return Err(Error::DimensionMismatch { expected: r, actual: bad.matrix().dim() });
        }
        Ok(Self { dispersion, ..Self::new(kind) })
    }

    pub fn kind(&self) -> CodeKind {
        self.kind
    }

    pub fn relays(&self) -> usize {
        self.slots.len()
    }

    pub fn slots(&self) -> &[Constellation] {
        &self.slots
    }

    pub fn dispersion(&self) -> &[Dispersion] {
        &self.dispersion
    }

    pub fn dispersion_pairs(&self) -> Vec<(ComplexMatrix, ComplexMatrix)> {
        self.dispersion.iter().map(|d| (d.b(), d.c())).collect()
    }

    pub fn bits_per_codeword(&self) -> usize {
        self.slots.iter().map(|s| s.bits_per_symbol() as usize).sum()
    }

    pub fn codebook_size(&self) -> usize {
        self.slots.iter().map(|s| s.points().len()).product()
    }

    /// Normalized data matrix for one symbol per slot.
    pub fn build_data_matrix(&self, symbols: &[Complex]) -> Result<ComplexMatrix> {
        if symbols.len() != self.relays() {
            return Err(Error::DimensionMismatch { expected: self.relays(), actual: symbols.len() });
        }
        for (i, (sym, slot)) in symbols.iter().zip(&self.slots).enumerate() {
            if slot.index_of(*sym).is_none() {
                return Err(Error::SymbolNotInConstellation { index: i });
            }
        }
        let norm = symbols.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
        let rows = match self.kind {
            CodeKind::Od2 => {
                let (v1, v2) = (symbols[0], symbols[1]);
                vec![vec![v1, -v2.conj()], vec![v2, v1.conj()]]
            }
            CodeKind::Qod4 => {
                let (v1, v2, v3, v4) = (symbols[0], symbols[1], symbols[2], symbols[3]);
                vec![
                    vec![v1, -v2.conj(), -v3.conj(), v4],
                    vec![v2, v1.conj(), -v4.conj(), -v3],
                    vec![v3, -v4.conj(), v1.conj(), -v2],
                    vec![v4, v3.conj(), v2.conj(), v1],
                ]
            }
        };
        let scaled: Vec<Vec<Complex>> =
            rows.into_iter().map(|r| r.into_iter().map(|v| v / norm).collect()).collect();
        Ok(ComplexMatrix::from_rows(&scaled, MatrixRole::DataMatrix))
    }

    /// Per-slot point indices of codeword `index`; slot 0 is the most
    /// significant digit.
    pub fn codeword_indices(&self, index: usize) -> Vec<usize> {
        let mut rest = index;
        let mut out = vec![0; self.slots.len()];
        for (slot, digit) in self.slots.iter().zip(out.iter_mut()).rev() {
            let m = slot.points().len();
            *digit = rest % m;
            rest /= m;
        }
        out
    }

    pub fn codeword_symbols(&self, index: usize) -> Vec<Complex> {
        self.codeword_indices(index)
            .iter()
            .zip(&self.slots)
            .map(|(&i, s)| s.points()[i])
            .collect()
    }

    /// All data matrices, in lexicographic order of slot indices.
    pub fn enumerate_codewords(&self) -> Vec<ComplexMatrix> {
        (0..self.codebook_size())
            .map(|i| {
                self.build_data_matrix(&self.codeword_symbols(i))
                    .expect("codebook symbols are valid by construction")
            })
            .collect()
    }

    pub fn bits_to_symbols(&self, bits: &[u8]) -> Result<Vec<Complex>> {
        bits_to_symbols(bits, &self.slots)
    }

    pub fn symbols_to_bits(&self, symbols: &[Complex]) -> Result<Vec<u8>> {
        symbols_to_bits(symbols, &self.slots)
    }
}

/// Direct (non-Gray) map, one bit per symbol, slots used cyclically.
pub fn bits_to_symbols(bits: &[u8], slots: &[Constellation]) -> Result<Vec<Complex>> {
    let per_codeword: usize = slots.iter().map(|s| s.bits_per_symbol() as usize).sum();
    if per_codeword == 0 || bits.len() % per_codeword != 0 {
        return Err(Error::DimensionMismatch {
            expected: bits.len().div_ceil(per_codeword.max(1)) * per_codeword,
            actual: bits.len(),
        });
    }
    Ok(bits
        .iter()
        .enumerate()
        .map(|(i, &b)| slots[i % slots.len()].points()[usize::from(b & 1)])
        .collect())
}

pub fn symbols_to_bits(symbols: &[Complex], slots: &[Constellation]) -> Result<Vec<u8>> {
    if symbols.len() % slots.len() != 0 {
        return Err(Error::DimensionMismatch {
            expected: symbols.len().div_ceil(slots.len()) * slots.len(),
            actual: symbols.len(),
        });
    }
    symbols
        .iter()
        .enumerate()
        .map(|(i, &s)| {
            slots[i % slots.len()]
                .index_of(s)
                .map(|idx| idx as u8)
                .ok_or(Error::SymbolNotInConstellation { index: i })
        })
        .collect()
}
