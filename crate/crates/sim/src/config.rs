//! TOML run configuration. Every key is optional and falls back to the
//! flat-fading two-relay defaults; unknown keys are rejected.
//!
//! ```toml
//! code = "od2"            # or "qod4"
//! subcarriers = 64
//! n_cp1 = 7
//! n_cp2 = 7
//! taps = 1
//! snr_db = [15.0, 20.0, 25.0]
//! samplers = ["D-OFDM1", "D-OFDM2"]
//! tau = [0.0, 0.3, 0.5]
//! seed = 7
//! ```

use std::path::Path;

use dofdm_core::link::NetworkConfig;

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("malformed configuration: {0}")]
    Parse(#[from] toml::de::Error),
    #[error("invalid configuration: {0}")]
    Invalid(#[from] dofdm_core::Error),
}

/// Parses without validating.
pub fn parse_config(text: &str) -> Result<NetworkConfig, ConfigError> {
    Ok(toml::from_str(text)?)
}

/// Reads and parses `path`; defaults when `path` is `None`.
pub fn load_config(path: Option<&Path>) -> Result<NetworkConfig, ConfigError> {
    match path {
        None => Ok(NetworkConfig::default()),
        Some(p) => {
            let text = std::fs::read_to_string(p)
                .map_err(|source| ConfigError::Io { path: p.display().to_string(), source })?;
            parse_config(&text)
        }
    }
}
