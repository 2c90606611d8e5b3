//! Error types shared across the crate.

use thiserror::Error;

/// Crate-wide error type. Every numeric failure names the operation that
/// produced it so CLI diagnostics can surface it verbatim.
#[derive(Debug, Error)]
pub enum Error {
    /// A constructor was given parameters outside its admissible range.
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    /// An argument is outside the operation's domain.
    #[error("domain error in `{op}`: {msg}")]
    Domain { op: &'static str, msg: String },

    /// A mathematical precondition of the operation does not hold.
    #[error("precondition violated in `{op}`: {msg}")]
    Precondition { op: &'static str, msg: String },

    /// A numerical routine failed to converge or produced a non-finite value.
    #[error("numeric failure in `{op}`: {msg}")]
    Numeric { op: &'static str, msg: String },

    /// A name was not found in a registry.
    #[error("unknown {kind} `{name}` (known: {known})")]
    Unknown {
        kind: &'static str,
        name: String,
        known: String,
    },

    /// Malformed configuration input.
    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub fn domain(op: &'static str, msg: impl Into<String>) -> Self {
        Error::Domain { op, msg: msg.into() }
    }

    pub fn precondition(op: &'static str, msg: impl Into<String>) -> Self {
        Error::Precondition { op, msg: msg.into() }
    }

    pub fn numeric(op: &'static str, msg: impl Into<String>) -> Self {
        Error::Numeric { op, msg: msg.into() }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
