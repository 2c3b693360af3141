//! `(r, 1)` repetition coding over a `D x r` block interleaver, with soft
//! combining of the fast decoder's metrics.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::{Complex, Error, Result};

/// Each bit repeated `r` times in place.
pub fn repeat_encode(bits: &[u8], r: usize) -> Result<Vec<u8>> {
    if r == 0 {
        return Err(Error::InvalidConfig("repetition factor must be at least 1".into()));
    }
    Ok(bits.iter().flat_map(|&b| core::iter::repeat_n(b, r)).collect())
}

/// `depth` rows by `columns` (the repetition factor) columns.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct InterleaverSpec {
    depth: usize,
    columns: usize,
}

impl InterleaverSpec {
    pub fn new(depth: usize, columns: usize) -> Result<Self> {
        if depth == 0 || columns == 0 {
            return Err(Error::InvalidConfig("interleaver dimensions must be positive".into()));
        }
        Ok(Self { depth, columns })
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn columns(&self) -> usize {
        self.columns
    }

    pub fn block_len(&self) -> usize {
        self.depth * self.columns
    }

    /// A note when copies of a bit are unlikely to fade independently, i.e.
    /// `depth <= 1 / fDTs`.
    pub fn doppler_warning(&self, fdts: f64) -> Option<String> {
        if fdts > 0.0 && (self.depth as f64) <= 1.0 / fdts {
            Some(format!(
                "interleaver depth {} does not exceed 1/fDTs = {:.0}; repeated bits may see correlated fading",
                self.depth,
                1.0 / fdts
            ))
        } else {
            None
        }
    }

    /// Output position of input position `i` within one block.
    fn permute(&self, i: usize) -> usize {
        let (row, col) = (i / self.columns, i % self.columns);
        col * self.depth + row
    }
}

/// Interleaver output plus the number of leading entries that carry payload.
#[derive(Debug, Clone, PartialEq)]
pub struct Interleaved<T> {
    pub data: Vec<T>,
    /// Entries of the input before zero padding.
    pub payload: usize,
}

impl<T> Interleaved<T> {
    /// `true` where the interleaved entry is padding.
    pub fn pad_mask(&self, spec: &InterleaverSpec) -> Vec<bool> {
        let mut mask = alloc::vec![false; self.data.len()];
        let block = spec.block_len();
        for i in self.payload..self.data.len() {
            let b = i / block;
            mask[b * block + spec.permute(i % block)] = true;
        }
        mask
    }
}

/// Row-major write, column-major read, block by block. A partial final block
/// is padded with `T::default()`.
pub fn interleave<T: Copy + Default>(data: &[T], spec: &InterleaverSpec) -> Interleaved<T> {
    let block = spec.block_len();
    let blocks = data.len().div_ceil(block);
    let mut out = alloc::vec![T::default(); blocks * block];
    for (i, &v) in data.iter().enumerate() {
        let b = i / block;
        out[b * block + spec.permute(i % block)] = v;
    }
    Interleaved { data: out, payload: data.len() }
}

/// Inverse of [`interleave`]; the input must be whole blocks.
pub fn deinterleave<T: Copy + Default>(data: &[T], spec: &InterleaverSpec) -> Result<Vec<T>> {
    let block = spec.block_len();
    if data.len() % block != 0 {
        return Err(Error::DimensionMismatch { expected: data.len().div_ceil(block) * block, actual: data.len() });
    }
    let mut out = alloc::vec![T::default(); data.len()];
    for (b, chunk) in data.chunks(block).enumerate() {
        for i in 0..block {
            out[b * block + i] = chunk[spec.permute(i)];
        }
    }
    Ok(out)
}

/// Sum of the real parts of the copies' metrics; non-negative decides bit 0.
pub fn combine_and_decide(soft: &[Complex]) -> u8 {
    let total: f64 = soft.iter().map(|v| v.re).sum();
    u8::from(total < 0.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn repetition_examples() {
        assert_eq!(repeat_encode(&[0, 1], 2).unwrap(), [0, 0, 1, 1]);
        assert_eq!(repeat_encode(&[1, 0, 1], 1).unwrap(), [1, 0, 1]);
        assert_eq!(repeat_encode(&[1, 0, 1], 4).unwrap().len(), 12);
        assert!(repeat_encode(&[1], 0).is_err());
    }

    #[test]
    fn two_by_two_is_a_transpose() {
        let spec = InterleaverSpec::new(2, 2).unwrap();
        let out = interleave(&[10, 10, 11, 11], &spec);
        assert_eq!(out.data, [10, 11, 10, 11]);
        assert_eq!(deinterleave(&out.data, &spec).unwrap(), [10, 10, 11, 11]);
    }

    #[test]
    fn single_row_is_identity() {
        let spec = InterleaverSpec::new(1, 4).unwrap();
        assert_eq!(interleave(&[1, 2, 3, 4], &spec).data, [1, 2, 3, 4]);
    }

    #[test]
    fn partial_block_is_padded_and_tracked() {
        let spec = InterleaverSpec::new(3, 2).unwrap();
        let out = interleave(&[1u8, 1, 1, 1], &spec);
        assert_eq!(out.data.len(), 6);
        let mask = out.pad_mask(&spec);
        assert_eq!(mask.iter().filter(|&&m| m).count(), 2);
        for (v, m) in out.data.iter().zip(&mask) {
            assert_eq!(*v == 0, *m);
        }
        assert!(deinterleave(&out.data[..5], &spec).is_err());
    }

    #[test]
    fn combining_examples() {
        let c = |re: f64| Complex::new(re, 0.3);
        assert_eq!(combine_and_decide(&[c(2.0), c(0.1)]), 0);
        assert_eq!(combine_and_decide(&[c(1.0), c(-2.0)]), 1);
        assert_eq!(combine_and_decide(&[c(1.0), c(-1.0)]), 0);
    }

    #[test]
    fn doppler_warning_threshold() {
        let spec = InterleaverSpec::new(10_000, 2).unwrap();
        assert!(spec.doppler_warning(1e-4).is_some());
        assert!(spec.doppler_warning(1e-3).is_none());
        assert!(spec.doppler_warning(0.0).is_none());
    }
}
