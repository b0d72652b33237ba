use thiserror::Error;

/// Errors raised across the library.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// A formal-series operation was called outside its domain.
    #[error("malformed series: {0}")]
    MalformedSeries(String),

    /// Evaluation at (or expansion through) a pole.
    #[error("pole: {0}")]
    Pole(String),

    /// The geometry or a residue configuration is degenerate.
    #[error("degenerate geometry: {0}")]
    Degenerate(String),

    /// Numerical precision was insufficient for a requested guarantee.
    #[error("precision loss: {0}")]
    Precision(String),

    /// A configured computation budget would be exceeded.
    #[error("budget exceeded: {0}")]
    Budget(String),

    /// The request lies outside what the library computes.
    #[error("unsupported: {0}")]
    Unsupported(String),

    /// The geometry failed validation.
    #[error("invalid geometry: {0}")]
    Invalid(String),

    /// Two inputs normalize to the same key.
    #[error("ambiguous: {0}")]
    Ambiguous(String),

    /// Text could not be parsed.
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
