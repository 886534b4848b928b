//! Experiment runner for `fracinv`: config parsing, the synthetic-data
//! reconstruction pipeline, CSV artifacts and self-check suites.

pub mod checks;
pub mod config;
mod error;
pub mod experiment;

pub use config::ExperimentConfig;
pub use error::CliError;
pub use experiment::{execute, run_experiment, sweep, RunOutput, RunSummary};

/// Environment variable naming the default output root.
pub const OUTPUT_ROOT_ENV: &str = "FRACINV_OUTPUT_ROOT";
