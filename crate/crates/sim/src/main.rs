use std::fs::File;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand};
use dofdm_core::link::{gamma_table, NetworkConfig, OracleCase};
use dofdm_sim::{load_config, report, sweep};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Differential OFDM distributed space-time coding link simulator.
#[derive(Parser)]
#[command(version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check a configuration, including the cyclic-prefix inequalities.
    Validate(Common),
    /// Run the BER/BLER sweep and write the result table.
    Sweep(Common),
    /// Write the received SNR per subcarrier for unit-gain links.
    Gamma(Common),
    /// Compare the time-domain pipeline with the per-subcarrier model on
    /// random networks.
    Oracle {
        #[command(flatten)]
        common: Common,
        /// Number of random networks.
        #[arg(long, default_value_t = 256)]
        cases: u64,
    },
}

#[derive(Args)]
struct Common {
    /// TOML configuration; built-in defaults when omitted.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Master seed, overriding the configuration.
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads.
    #[arg(long, env = "DOFDM_WORKERS")]
    workers: Option<usize>,
    /// Output file; standard output when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

impl Common {
    fn config(&self) -> anyhow::Result<NetworkConfig> {
        let mut cfg = load_config(self.config.as_deref())?;
        if let Some(seed) = self.seed {
            cfg.seed = seed;
        }
        for w in cfg.validate().context("invalid configuration")? {
            eprintln!("warning: {w}");
        }
        Ok(cfg)
    }

    fn workers(&self) -> usize {
        self.workers
            .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()))
            .max(1)
    }

    fn output(&self) -> anyhow::Result<Box<dyn Write>> {
        Ok(match &self.out {
            Some(p) => Box::new(File::create(p).with_context(|| format!("cannot create {}", p.display()))?),
            None => Box::new(io::stdout().lock()),
        })
    }
}

fn run(cli: Cli) -> anyhow::Result<()> {
    match cli.command {
        Command::Validate(c) => {
            let cfg = c.config()?;
            let mut out = c.output()?;
            writeln!(
                out,
                "ok: R={} N={} N_cp1={} (needs {}) N_cp2={} (needs {}) points={}",
                cfg.relays(),
                cfg.subcarriers,
                cfg.n_cp1,
                cfg.taps - 1,
                cfg.n_cp2,
                cfg.required_n_cp2(),
                cfg.points().len()
            )?;
        }
        Command::Sweep(c) => {
            let cfg = c.config()?;
            let results = sweep(&cfg, c.workers())?;
            for r in &results {
                eprintln!(
                    "{} tau={} snr={}dB: {} trials, ber={:.3e} ({:.1?})",
                    r.point.mode,
                    r.point.tau,
                    r.point.snr_db,
                    r.trials,
                    r.ber(),
                    r.wall_time
                );
            }
            report::write_results(&cfg, &results, c.output()?)?;
        }
        Command::Gamma(c) => {
            let cfg = c.config()?;
            report::write_gamma(&gamma_table(&cfg)?, c.output()?)?;
        }
        Command::Oracle { common, cases } => {
            let seed = common.config()?.seed;
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut worst = 0.0f64;
            for _ in 0..cases {
                let case = OracleCase::random(&mut rng)?;
                worst = worst.max(case.relative_error()?);
            }
            writeln!(common.output()?, "cases={cases} max_relative_error={worst:e}")?;
            if !(worst < 1e-9) {
                bail!("pipeline deviates from the per-subcarrier model");
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
