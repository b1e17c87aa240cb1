use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid `{field}`: {message}")]
    Config { field: String, message: String },

    #[error("`{field}`: {source}")]
    Core {
        field: String,
        #[source]
        source: crowdrate::Error,
    },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("manifest {path}: {message}")]
    Manifest { path: PathBuf, message: String },
}

impl CliError {
    pub fn config(field: impl Into<String>, message: impl Into<String>) -> Self {
        CliError::Config {
            field: field.into(),
            message: message.into(),
        }
    }

    /// Wraps a library error, naming `fallback` when the library error does
    /// not point at a single parameter. Library field names are turned into
    /// flag spelling (`n_items` becomes `n-items`).
    pub fn from_core(fallback: &str, err: crowdrate::Error) -> Self {
        let field = err.field().unwrap_or(fallback).replace('_', "-");
        CliError::Core { field, source: err }
    }

    /// Same as [`Self::from_core`] but under an explicit flag name.
    pub fn renamed(field: &str, err: crowdrate::Error) -> Self {
        CliError::Core {
            field: field.to_string(),
            source: err,
        }
    }

    /// Flag the error is about, if any.
    pub fn field(&self) -> Option<&str> {
        match self {
            CliError::Config { field, .. } | CliError::Core { field, .. } => Some(field),
            _ => None,
        }
    }

    pub fn exit_code(&self) -> u8 {
        2
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
