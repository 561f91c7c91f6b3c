use thiserror::Error;

/// Errors shared across the crate.
#[derive(Error, Debug, Clone, PartialEq)]
pub enum Error {
    #[error("invalid curve: {0}")]
    InvalidCurve(String),

    #[error("degenerate configuration: {0}")]
    Degenerate(String),

    #[error("point is off the curve (residual {residual:.3e})")]
    OffCurve { residual: f64 },

    #[error("tangency: {0}")]
    Tangency(String),

    #[error("series error: {0}")]
    Series(String),

    #[error("numeric failure: {0}")]
    Numeric(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("domain error: {0}")]
    Domain(String),
}

pub type Result<T> = std::result::Result<T, Error>;
