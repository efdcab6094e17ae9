//! Experiment driver behind the `nagaolab` binary: configuration, the
//! on-disk trace cache, sweeps and report writing.

pub mod cache;
pub mod config;
pub mod report;
pub mod run;

use std::io;
use std::path::Path;

use nagaolab::Error;

pub use config::{Args, Command, ExperimentConfig, Format, GridSpec, TwistSource};
pub use report::Report;
pub use run::{run, Interrupt};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),

    #[error(transparent)]
    Core(#[from] Error),

    #[error("corrupt cache file {path}: {message}; moved to {quarantined}")]
    CacheCorrupt {
        path: String,
        message: String,
        quarantined: String,
    },

    #[error("{path}: {source}")]
    Io { path: String, source: io::Error },

    #[error("interrupted")]
    Interrupted,
}

impl CliError {
    pub(crate) fn io(path: &Path, source: io::Error) -> Self {
        CliError::Io {
            path: path.display().to_string(),
            source,
        }
    }

    /// 1 parse/config, 2 bad curve, 3 cap exceeded, 4 cache corruption,
    /// 130 interrupted.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::Io { .. } => 1,
            CliError::Core(e) => match e {
                Error::RepeatedRoot { .. }
                | Error::ZeroPolynomial
                | Error::DegreeOutOfRange { .. }
                | Error::BadPrime { .. }
                | Error::WrongGenus { .. } => 2,
                Error::CapExceeded { .. } | Error::TableTooLarge { .. } => 3,
                _ => 1,
            },
            CliError::CacheCorrupt { .. } => 4,
            CliError::Interrupted => 130,
        }
    }
}
