//! File formats, the parallel sweep engine and the `dofdm` command line for
//! `dofdm-core`.
//!
//! Sweeps are deterministic: trial `t` of every point draws from the stream
//! seeded with `seed ^ t`, trials run in fixed-size batches, and the stop
//! rule is only evaluated between batches. The worker count therefore
//! changes wall time and nothing else.

pub mod config;
pub mod report;
pub mod sweep;

pub use config::{load_config, parse_config, ConfigError};
pub use sweep::{run_point, sweep, PointResult, SweepError};
