use thiserror::Error;

/// Errors raised by the relative-entropy toolkit.
#[derive(Debug, Error)]
pub enum Error {
    /// A requested dimension exceeds [`crate::linalg::MAX_DIM`].
    #[error("size error: {0}")]
    Size(String),

    /// Operand shapes do not agree.
    #[error("shape error: {0}")]
    Shape(String),

    /// An argument lies outside the mathematical domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("overflow error: {0}")]
    Overflow(String),

    /// An invalid search or run configuration.
    #[error("config error: {0}")]
    Config(String),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

macro_rules! shape_err {
    ($($arg:tt)*) => { $crate::error::Error::Shape(format!($($arg)*)) };
}

macro_rules! domain_err {
    ($($arg:tt)*) => { $crate::error::Error::Domain(format!($($arg)*)) };
}

pub(crate) use domain_err;
pub(crate) use shape_err;
