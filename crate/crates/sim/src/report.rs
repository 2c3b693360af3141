//! CSV tables.

use std::io::Write;

use dofdm_core::link::{GammaRow, NetworkConfig};
use serde::Serialize;

use crate::sweep::PointResult;

#[derive(Serialize)]
struct ResultRecord<'a> {
    scheme: String,
    code: String,
    channel: &'a str,
    tau: f64,
    snr_db: f64,
    trials: u64,
    bits: u64,
    bit_errors: u64,
    ber: f64,
    block_errors: u64,
    bler: f64,
    seed: u64,
}

/// One row per point with columns `scheme, code, channel, tau, snr_db,
/// trials, bits, bit_errors, ber, block_errors, bler, seed`, sorted by
/// scheme, offset and P/N0. Wall time is left out so that output is
/// reproducible byte for byte.
pub fn write_results<W: Write>(cfg: &NetworkConfig, results: &[PointResult], out: W) -> csv::Result<()> {
    let mut rows: Vec<&PointResult> = results.iter().collect();
    rows.sort_by(|a, b| {
        a.point
            .mode
            .cmp(&b.point.mode)
            .then(a.point.tau.total_cmp(&b.point.tau))
            .then(a.point.snr_db.total_cmp(&b.point.snr_db))
    });
    let channel = cfg.channel_label();
    let mut w = csv::Writer::from_writer(out);
    if rows.is_empty() {
        w.write_record([
            "scheme", "code", "channel", "tau", "snr_db", "trials", "bits", "bit_errors", "ber", "block_errors",
            "bler", "seed",
        ])?;
    }
    for r in rows {
        w.serialize(ResultRecord {
            scheme: r.point.mode.to_string(),
            code: cfg.code.to_string(),
            channel: &channel,
            tau: r.point.tau,
            snr_db: r.point.snr_db,
            trials: r.trials,
            bits: r.counts.bits,
            bit_errors: r.counts.bit_errors,
            ber: r.ber(),
            block_errors: r.counts.block_errors,
            bler: r.bler(),
            seed: r.seed,
        })?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Serialize)]
struct GammaRecord {
    scheme: String,
    tau: f64,
    n: usize,
    gamma_db: f64,
}

/// Columns `scheme, tau, n, gamma_db`.
pub fn write_gamma<W: Write>(rows: &[GammaRow], out: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(GammaRecord { scheme: r.mode.to_string(), tau: r.tau, n: r.n, gamma_db: r.gamma_db })?;
    }
    w.flush()?;
    Ok(())
}
