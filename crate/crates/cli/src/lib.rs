//! Experiment driver for network creation games: config parsing, sweeps
//! over the link price, and CSV/JSON result files.

pub mod config;
pub mod experiment;

use std::path::Path;

pub use config::{ConfigPairs, ExperimentConfig};
pub use experiment::{run_experiment, sweep_alpha, ExperimentResult};

/// Process exit status for an invalid config.
pub const EXIT_CONFIG: u8 = 2;
/// Process exit status when some run exhausted its budget.
pub const EXIT_NOT_CONVERGED: u8 = 3;
/// Process exit status for I/O and other runtime failures.
pub const EXIT_RUNTIME: u8 = 4;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("config error: {field}: {reason}")]
    Config { field: String, reason: String },
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Core(#[from] ncg_core::Error),
}

impl CliError {
    pub fn io(path: &Path, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.display().to_string(),
            source,
        }
    }

    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config { .. } => EXIT_CONFIG,
            _ => EXIT_RUNTIME,
        }
    }
}
