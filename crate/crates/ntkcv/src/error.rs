//! Error types shared across the crate.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("configuration error: {0}")]
    Config(String),

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("numeric error: {0}")]
    Numeric(String),

    #[error("non-finite value at index {index}: {context}")]
    NonFinite { index: usize, context: String },

    #[error("degenerate spectrum: {0}")]
    DegenerateSpectrum(String),

    #[error("eigensolver did not converge: off-diagonal residual {residual:.3e} after {sweeps} sweeps")]
    NoConvergence { residual: f64, sweeps: usize },

    #[error("format error at offset {offset}: {message}")]
    Format { offset: usize, message: String },

    #[error("parse error at line {line}, key `{key}`: {message}")]
    Parse {
        line: usize,
        key: String,
        message: String,
    },

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Process exit code per the CLI contract: 1 for configuration
    /// problems, 2 for numeric failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) | Error::Dimension(_) | Error::Parse { .. } | Error::Format { .. } => 1,
            Error::Numeric(_)
            | Error::NonFinite { .. }
            | Error::DegenerateSpectrum(_)
            | Error::NoConvergence { .. } => 2,
            Error::Io(_) => 1,
        }
    }
}
