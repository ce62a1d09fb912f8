//! Error taxonomy shared by every module in the crate.
//!
//! The variants mirror the failure classes the algorithms can actually hit:
//! shape mismatches, bad caller arguments, numerically singular blocks,
//! estimation tables with unsampled entries, and malformed input files.
//! The CLI maps `Argument` to exit code 2 and everything else to 3.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// Matrix shapes or index sets do not conform.
    #[error("dimension error: {0}")]
    Dimension(String),

    /// A caller-supplied parameter is outside its documented domain.
    #[error("argument error: {0}")]
    Argument(String),

    /// A matrix that must be invertible is singular to working precision.
    #[error("singular matrix: {0}")]
    Singular(String),

    /// An estimator was asked for a value before every entry had a sample.
    #[error("insufficient samples: {0}")]
    InsufficientSamples(String),

    /// Input data is malformed or violates a validated invariant.
    #[error("data error: {0}")]
    Data(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
