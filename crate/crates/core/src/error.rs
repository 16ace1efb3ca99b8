//! Crate-wide error type.

use std::io;

/// Errors produced by parsing, validation, configuration and mutation.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// A file could not be opened or read.
    #[error("cannot read {path}: {source}")]
    File {
        path: String,
        #[source]
        source: io::Error,
    },

    /// A document is malformed or violates a model invariant. The message
    /// carries the location (line or offending id) when known.
    #[error("{source_name}: {message}")]
    Format { source_name: String, message: String },

    /// The heuristic pipeline or priority table is invalid.
    #[error("invalid configuration: {0}")]
    Config(String),

    /// An oracle or result does not fit the models it is evaluated against.
    #[error("consistency error: {0}")]
    Consistency(String),

    /// A mutation plan cannot be applied to the given model.
    #[error("mutation plan error: {0}")]
    Plan(String),
}

impl Error {
    pub(crate) fn format(source_name: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Format {
            source_name: source_name.into(),
            message: message.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
