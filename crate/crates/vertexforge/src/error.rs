//! Error type shared across the library.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum VfError {
    /// A computation would need a series coefficient beyond its tracked
    /// precision cap. The message names the missing exponent.
    #[error("precision exhausted: {0}")]
    Precision(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    /// Elements of different algebras or modules were mixed.
    #[error("context mismatch: {0}")]
    Context(String),

    /// No locality order up to the search cap could be certified.
    #[error("locality not certified: {0}")]
    Locality(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type VfResult<T> = Result<T, VfError>;
