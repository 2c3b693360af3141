//! Batch-wise Monte Carlo over sweep points with a fixed worker pool.

use std::time::{Duration, Instant};

use dofdm_core::link::{LinkContext, NetworkConfig, SweepPoint, TrialCounts};

#[derive(Debug, thiserror::Error)]
pub enum SweepError {
    #[error(transparent)]
    Config(#[from] dofdm_core::Error),
    #[error("trial {trial} (stream seed {seed}) failed: {source}")]
    Trial { trial: u64, seed: u64, source: dofdm_core::Error },
}

#[derive(Debug, Clone, PartialEq)]
pub struct PointResult {
    pub point: SweepPoint,
    pub trials: u64,
    pub counts: TrialCounts,
    pub wall_time: Duration,
    pub seed: u64,
}

impl PointResult {
    pub fn ber(&self) -> f64 {
        ratio(self.counts.bit_errors, self.counts.bits)
    }

    pub fn bler(&self) -> f64 {
        ratio(self.counts.block_errors, self.counts.blocks)
    }
}

fn ratio(num: u64, den: u64) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

/// Runs `ctx`'s trials `first..first + count` on `workers` threads, each
/// taking every `workers`-th index.
fn run_batch(ctx: &LinkContext, first: u64, count: u64, workers: usize) -> Result<TrialCounts, SweepError> {
    let workers = workers.clamp(1, count.max(1) as usize);
    let seed = ctx.config().seed;
    let run = |w: usize| -> Result<TrialCounts, SweepError> {
        let mut acc = TrialCounts::default();
        for t in (first + w as u64..first + count).step_by(workers) {
            acc += ctx.run_trial(t).map_err(|source| SweepError::Trial { trial: t, seed: seed ^ t, source })?;
        }
        Ok(acc)
    };
    if workers == 1 {
        return run(0);
    }
    std::thread::scope(|s| {
        let handles: Vec<_> = (0..workers).map(|w| s.spawn(move || run(w))).collect();
        let mut total = TrialCounts::default();
        for h in handles {
            total += h.join().expect("worker panicked")?;
        }
        Ok(total)
    })
}

/// Runs one point until `min_bit_errors` errors or `max_bits` bits, checked
/// after every batch of `batch_trials` trials.
pub fn run_point(cfg: &NetworkConfig, point: SweepPoint, workers: usize) -> Result<PointResult, SweepError> {
    let ctx = LinkContext::new(cfg, point)?;
    let start = Instant::now();
    let mut counts = TrialCounts::default();
    let mut trials = 0;
    while counts.bit_errors < cfg.min_bit_errors && counts.bits < cfg.max_bits {
        counts += run_batch(&ctx, trials, cfg.batch_trials, workers)?;
        trials += cfg.batch_trials;
    }
    Ok(PointResult { point, trials, counts, wall_time: start.elapsed(), seed: cfg.seed })
}

/// Every point of `cfg`, in table order.
pub fn sweep(cfg: &NetworkConfig, workers: usize) -> Result<Vec<PointResult>, SweepError> {
    cfg.validate()?;
    cfg.points().into_iter().map(|p| run_point(cfg, p, workers)).collect()
}
