//! Error type for configuration, file formats, and experiment IO.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    /// A config key set on a specific line failed to parse or validate.
    #[error("config line {line}: key `{key}`: {msg}")]
    ConfigAt {
        line: usize,
        key: String,
        msg: String,
    },
    /// A config problem not tied to a line (flag overrides, key
    /// interactions).
    #[error("config: key `{key}`: {msg}")]
    ConfigKey { key: String, msg: String },
    /// A malformed line in a data or model file.
    #[error("{path}:{line}: {msg}")]
    Parse {
        path: String,
        line: usize,
        msg: String,
    },
    #[error("{context}: {source}")]
    Io {
        context: String,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Core(#[from] layerwise_core::Error),
}

impl CliError {
    pub fn io(context: impl Into<String>, source: std::io::Error) -> Self {
        CliError::Io {
            context: context.into(),
            source,
        }
    }

    pub fn parse(path: &std::path::Path, line: usize, msg: impl Into<String>) -> Self {
        CliError::Parse {
            path: path.display().to_string(),
            line,
            msg: msg.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
