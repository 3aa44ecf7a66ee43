use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}:{line}: {msg}")]
    Config { path: String, line: usize, msg: String },

    #[error("invalid value for `{key}`: {msg}")]
    Value { key: String, msg: String },

    #[error("{0}")]
    Usage(String),

    #[error("unknown preset `{0}` (available: table-1, table-2, table-3, table-4, gpu-extrapolation)")]
    UnknownPreset(String),

    #[error("cannot read {path}: {source}")]
    Read {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Core(#[from] rlmc_core::Error),
}

pub type Result<T, E = CliError> = std::result::Result<T, E>;
