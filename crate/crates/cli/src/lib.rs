//! Experiment driver for the `rlmc` binary: configuration files, presets,
//! subcommands and CSV output.

pub mod args;
pub mod commands;
pub mod config;
pub mod error;
pub mod presets;

pub use config::{ExperimentConfig, RawConfig};
pub use error::{CliError, Result};
