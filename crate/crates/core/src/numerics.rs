//! Complex-sequence primitives: unitary DFT/IDFT, circular and linear
//! convolution, circular time-reversal and small dense complex matrices.
//!
//! Transforms use the symmetric `1/sqrt(N)` normalization in both directions.
//! Power-of-two lengths run through an in-place radix-2 FFT; any other length
//! falls back to the direct sum so the transforms stay total.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

#[allow(unused_imports)] // shadowed by inherent float methods whenever std is linked
use num_traits::Float;

use crate::Complex;

/// `<index>_N` for a possibly negative index.
#[inline]
pub fn mod_n(index: isize, n: usize) -> usize {
    index.rem_euclid(n as isize) as usize
}

/// Unitary forward DFT: `y[n] = N^{-1/2} sum_m x[m] exp(-j 2 pi m n / N)`.
pub fn dft(x: &[Complex]) -> Vec<Complex> {
    transform(x, -1.0)
}

/// Unitary inverse DFT: `x[m] = N^{-1/2} sum_n y[n] exp(+j 2 pi m n / N)`.
pub fn idft(y: &[Complex]) -> Vec<Complex> {
    transform(y, 1.0)
}

fn transform(x: &[Complex], sign: f64) -> Vec<Complex> {
    let n = x.len();
    if n == 0 {
        return Vec::new();
    }
    let mut out = if n.is_power_of_two() {
        let mut buf = x.to_vec();
        fft_in_place(&mut buf, sign);
        buf
    } else {
        direct_dft(x, sign)
    };
    let scale = 1.0 / (n as f64).sqrt();
    for v in &mut out {
        *v *= scale;
    }
    out
}

fn direct_dft(x: &[Complex], sign: f64) -> Vec<Complex> {
    let n = x.len();
    (0..n)
        .map(|k| {
            x.iter()
                .enumerate()
                .map(|(m, &v)| v * Complex::from_polar(1.0, sign * 2.0 * PI * ((m * k) % n) as f64 / n as f64))
                .sum()
        })
        .collect()
}

/// Unnormalized iterative radix-2 Cooley-Tukey transform.
fn fft_in_place(buf: &mut [Complex], sign: f64) {
    let n = buf.len();
    let bits = n.trailing_zeros();
    if bits == 0 {
        return;
    }
    for i in 0..n {
        let j = i.reverse_bits() >> (usize::BITS - bits);
        if j > i {
            buf.swap(i, j);
        }
    }
    let mut len = 2;
    while len <= n {
        let half = len / 2;
        // twiddles evaluated directly rather than by recurrence to keep ~1e-15 error
        let twiddles: Vec<Complex> = (0..half)
            .map(|k| Complex::from_polar(1.0, sign * 2.0 * PI * k as f64 / len as f64))
            .collect();
        for start in (0..n).step_by(len) {
            for k in 0..half {
                let a = buf[start + k];
                let b = buf[start + k + half] * twiddles[k];
                buf[start + k] = a + b;
                buf[start + k + half] = a - b;
            }
        }
        len <<= 1;
    }
}

/// `y[n] = sum_l h[l] x[<n - l>_N]`. `h` may be shorter than `x`; missing taps
/// are zero.
pub fn circular_convolve(h: &[Complex], x: &[Complex]) -> Vec<Complex> {
    let n = x.len();
    let mut y = vec![Complex::new(0.0, 0.0); n];
    for (l, &tap) in h.iter().enumerate().filter(|(_, t)| **t != Complex::new(0.0, 0.0)) {
        for (m, out) in y.iter_mut().enumerate() {
            *out += tap * x[mod_n(m as isize - l as isize, n)];
        }
    }
    y
}

/// Full linear convolution, length `x.len() + h.len() - 1`.
pub fn linear_convolve(h: &[Complex], x: &[Complex]) -> Vec<Complex> {
    if h.is_empty() || x.is_empty() {
        return Vec::new();
    }
    let mut y = vec![Complex::new(0.0, 0.0); x.len() + h.len() - 1];
    for (l, &tap) in h.iter().enumerate() {
        for (m, &v) in x.iter().enumerate() {
            y[m + l] += tap * v;
        }
    }
    y
}

/// `out[0] = z[0]`, `out[m] = z[N - m]` otherwise.
pub fn circular_time_reverse(z: &[Complex]) -> Vec<Complex> {
    let n = z.len();
    (0..n).map(|m| z[(n - m) % n]).collect()
}

pub fn energy(x: &[Complex]) -> f64 {
    x.iter().map(|v| v.norm_sqr()).sum()
}

/// What a square matrix is used for; only informational.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum MatrixRole {
    DataMatrix,
    Dispersion,
}

/// Dense square complex matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    dim: usize,
    entries: Vec<Complex>,
    role: MatrixRole,
}

impl ComplexMatrix {
    pub fn zeros(dim: usize, role: MatrixRole) -> Self {
        Self { dim, entries: vec![Complex::new(0.0, 0.0); dim * dim], role }
    }

    pub fn identity(dim: usize, role: MatrixRole) -> Self {
        let mut m = Self::zeros(dim, role);
        for i in 0..dim {
            m.entries[i * dim + i] = Complex::new(1.0, 0.0);
        }
        m
    }

    /// Panics if `rows` is not square.
    pub fn from_rows(rows: &[Vec<Complex>], role: MatrixRole) -> Self {
        let dim = rows.len();
        assert!(rows.iter().all(|r| r.len() == dim), "matrix must be square");
        Self { dim, entries: rows.iter().flatten().copied().collect(), role }
    }

    /// Convenience for the integer-valued dispersion matrices.
    pub fn from_real_rows<const D: usize>(rows: [[f64; D]; D], role: MatrixRole) -> Self {
        Self {
            dim: D,
            entries: rows.iter().flatten().map(|&v| Complex::new(v, 0.0)).collect(),
            role,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn role(&self) -> MatrixRole {
        self.role
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> Complex {
        self.entries[row * self.dim + col]
    }

    pub fn row(&self, row: usize) -> &[Complex] {
        &self.entries[row * self.dim..(row + 1) * self.dim]
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|v| *v == Complex::new(0.0, 0.0))
    }

    pub fn adjoint(&self) -> Self {
        let d = self.dim;
        let mut out = Self::zeros(d, self.role);
        for r in 0..d {
            for c in 0..d {
                out.entries[c * d + r] = self.get(r, c).conj();
            }
        }
        out
    }

    pub fn conj(&self) -> Self {
        Self {
            dim: self.dim,
            entries: self.entries.iter().map(|v| v.conj()).collect(),
            role: self.role,
        }
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        assert_eq!(self.dim, rhs.dim);
        let d = self.dim;
        let mut out = Self::zeros(d, self.role);
        for r in 0..d {
            for c in 0..d {
                out.entries[r * d + c] = (0..d).map(|k| self.get(r, k) * rhs.get(k, c)).sum();
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[Complex]) -> Vec<Complex> {
        assert_eq!(self.dim, v.len());
        (0..self.dim)
            .map(|r| self.row(r).iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }

    pub fn frobenius_distance(&self, rhs: &Self) -> f64 {
        self.entries
            .iter()
            .zip(&rhs.entries)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    /// `||M^H M - I||_F < tol`.
    pub fn is_unitary(&self, tol: f64) -> bool {
        let gram = self.adjoint().mul(self);
        gram.frobenius_distance(&Self::identity(self.dim, self.role)) < tol
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex {
        Complex::new(re, im)
    }

    fn pseudo_random(n: usize, seed: u64) -> Vec<Complex> {
        // small LCG so the unit tests need no RNG crate
        let mut s = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        let mut next = || {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((s >> 11) as f64 / (1u64 << 53) as f64) * 2.0 - 1.0
        };
        (0..n).map(|_| c(next(), next())).collect()
    }

    fn max_err(a: &[Complex], b: &[Complex]) -> f64 {
        a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
    }

    /// Independent O(N^2) evaluation written straight from the definition.
    fn brute_dft(x: &[Complex]) -> Vec<Complex> {
        let n = x.len() as f64;
        (0..x.len())
            .map(|k| {
                let mut acc = c(0.0, 0.0);
                for (m, v) in x.iter().enumerate() {
                    let ang = -2.0 * PI * (m as f64) * (k as f64) / n;
                    acc += v * c(ang.cos(), ang.sin());
                }
                acc / n.sqrt()
            })
            .collect()
    }

    #[test]
    fn dft_of_constant_and_impulse() {
        let y = dft(&[c(1.0, 0.0); 4]);
        assert!(max_err(&y, &[c(2.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]) < 1e-15);
        let y = dft(&[c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]);
        assert!(max_err(&y, &[c(0.5, 0.0); 4]) < 1e-15);
        let x = idft(&[c(2.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]);
        assert!(max_err(&x, &[c(1.0, 0.0); 4]) < 1e-15);
    }

    #[test]
    fn dft_matches_direct_sum() {
        for (n, seed) in [(8, 1), (64, 2), (128, 3), (6, 4), (1, 5)] {
            let x = pseudo_random(n, seed);
            assert!(max_err(&dft(&x), &brute_dft(&x)) < 1e-12, "n = {n}");
        }
    }

    #[test]
    fn round_trip_and_parseval() {
        for n in [4, 64, 128] {
            let x = pseudo_random(n, n as u64);
            assert!(max_err(&idft(&dft(&x)), &x) < 1e-12);
            assert!(max_err(&dft(&idft(&x)), &x) < 1e-12);
            assert!((energy(&idft(&x)).sqrt() - energy(&x).sqrt()).abs() < 1e-12);
        }
    }

    #[test]
    fn circular_convolution_examples() {
        let x = pseudo_random(4, 9);
        let id = [c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)];
        assert_eq!(circular_convolve(&id, &x), x);
        let shift = [c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)];
        assert_eq!(circular_convolve(&shift, &x), vec![x[3], x[0], x[1], x[2]]);
    }

    #[test]
    fn circular_convolution_theorem() {
        let h = pseudo_random(16, 10);
        let x = pseudo_random(16, 11);
        let (hf, xf) = (dft(&h), dft(&x));
        let prod: Vec<Complex> = hf.iter().zip(&xf).map(|(a, b)| a * b * 4.0).collect();
        assert!(max_err(&circular_convolve(&h, &x), &idft(&prod)) < 1e-10);
    }

    #[test]
    fn time_reversal() {
        let z = [c(0.0, 1.0), c(1.0, 0.0), c(2.0, 0.0), c(3.0, 0.0)];
        assert_eq!(circular_time_reverse(&z), vec![z[0], z[3], z[2], z[1]]);
        let z = pseudo_random(32, 12);
        assert_eq!(circular_time_reverse(&circular_time_reverse(&z)), z);
        let lhs = dft(&circular_time_reverse(&z).iter().map(|v| v.conj()).collect::<Vec<_>>());
        let rhs: Vec<Complex> = dft(&z).iter().map(|v| v.conj()).collect();
        assert!(max_err(&lhs, &rhs) < 1e-12);
    }

    #[test]
    fn linear_convolution_length_and_values() {
        let y = linear_convolve(&[c(1.0, 0.0), c(2.0, 0.0)], &[c(1.0, 0.0), c(1.0, 0.0), c(1.0, 0.0)]);
        assert_eq!(y, vec![c(1.0, 0.0), c(3.0, 0.0), c(3.0, 0.0), c(2.0, 0.0)]);
    }

    #[test]
    fn unitarity_checks() {
        let s = 1.0 / 2f64.sqrt();
        assert!(ComplexMatrix::identity(3, MatrixRole::DataMatrix).is_unitary(1e-12));
        assert!(ComplexMatrix::from_real_rows([[s, -s], [s, s]], MatrixRole::DataMatrix).is_unitary(1e-12));
        assert!(!ComplexMatrix::from_real_rows([[1.0, 0.0], [0.0, 2.0]], MatrixRole::DataMatrix).is_unitary(1e-12));
    }
}
