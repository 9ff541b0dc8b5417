//! Error taxonomy shared by every module.
//!
//! The variants map onto the failure classes the CLI translates into exit
//! codes: configuration problems, data/integrity problems, and training
//! divergence are distinguished from plain programming errors like shape
//! mismatches.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("range error: {0}")]
    Range(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("data error: {0}")]
    Data(String),
    #[error("integrity error: {0}")]
    Integrity(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("content error: {0}")]
    Content(String),
    #[error("transport error: {0}")]
    Transport(String),
    #[error("numeric error: {0}")]
    Numeric(String),
    #[error("training diverged: {0}")]
    Training(String),
    #[error("provenance mismatch: {0}")]
    Provenance(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Stable machine-readable class, used by the CLI for exit codes.
    pub fn class(&self) -> ErrorClass {
        match self {
            Error::Config(_) | Error::Range(_) => ErrorClass::Config,
            Error::Data(_)
            | Error::Integrity(_)
            | Error::Parse(_)
            | Error::Content(_)
            | Error::Transport(_)
            | Error::Provenance(_) => ErrorClass::Data,
            Error::Training(_) => ErrorClass::Training,
            _ => ErrorClass::Other,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorClass {
    Config,
    Data,
    Training,
    Other,
}
