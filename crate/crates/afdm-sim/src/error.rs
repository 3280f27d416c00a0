//! Harness-level failures, partitioned by exit code: configuration
//! problems (bad file, bad field, unreachable request) exit 2, runtime
//! problems (I/O after validation) exit 3.

use std::path::Path;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum SimError {
    #[error("config error in `{field}`: {reason}")]
    Config { field: String, reason: String },

    #[error("cannot read config file {path}: {reason}")]
    ConfigFile { path: String, reason: String },

    #[error("config parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Core(#[from] afdm_core::Error),

    #[error("I/O error on {path}: {reason}")]
    Io { path: String, reason: String },

    #[error("malformed CSV {path}: {reason}")]
    Csv { path: String, reason: String },

    #[error("self-check failed: {0}")]
    Check(String),
}

impl SimError {
    pub fn config(field: impl Into<String>, reason: impl Into<String>) -> Self {
        SimError::Config { field: field.into(), reason: reason.into() }
    }

    pub fn io(path: &Path, err: &std::io::Error) -> Self {
        SimError::Io { path: path.display().to_string(), reason: err.to_string() }
    }

    /// CLI exit code: 2 for anything the user can fix in the config, 3
    /// for failures of the run itself.
    pub fn exit_code(&self) -> i32 {
        match self {
            SimError::Config { .. } | SimError::ConfigFile { .. } | SimError::Parse(_) => 2,
            // A config that demands exhaustive ML past the guard rail is a
            // configuration problem, not a runtime one.
            SimError::Core(afdm_core::Error::Config { .. })
            | SimError::Core(afdm_core::Error::MlTooLarge { .. })
            | SimError::Core(afdm_core::Error::BitLength { .. }) => 2,
            _ => 3,
        }
    }
}

pub type Result<T> = std::result::Result<T, SimError>;
