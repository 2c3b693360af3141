//! Differential OFDM distributed space-time coding (D-OFDM DSTC) for
//! amplify-and-forward relay networks over frequency-selective fading with
//! integer and fractional relay timing offsets.
//!
//! The crate is `no_std` (with `alloc`). Everything here is a pure function of
//! its inputs plus an explicit random stream, so Monte Carlo trials can be run
//! from any number of workers. File formats, the CLI and the parallel sweep
//! engine live in the `dofdm-sim` companion crate.
//!
//! Signal flow for one block index `k`:
//!
//! ```text
//! bits -> codebook -> differential encode -> IDFT -> +CP1 -> sqrt(P0 R)
//!      -> SR_i FIR + noise -> -CP1 -> dispersion (B_i / C_i) * A -> +CP2
//!      -> R_iD FIR, delay d_i + tau_i, matched filter -> -CP2 -> DFT
//!      -> non-coherent decode against block k-1
//! ```
#![no_std]

extern crate alloc;

pub mod channel;
pub mod codebook;
pub mod coding;
mod error;
pub mod link;
pub mod numerics;
pub mod rxchain;
pub mod txchain;

pub use error::{Error, Result};
pub use num_complex::Complex64 as Complex;
