use thiserror::Error;

/// Errors produced by the image containers, codecs, metrics and parameter checks.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("ppm parse error at byte {offset}: {message}")]
    Parse { offset: usize, message: String },

    #[error("csv parse error at line {line}: {message}")]
    Csv { line: usize, message: String },

    #[error("invalid dimensions {width}x{height}: {reason}")]
    Dimensions {
        width: usize,
        height: usize,
        reason: &'static str,
    },

    #[error("dimension mismatch: {0}x{1} vs {2}x{3}")]
    DimensionMismatch(usize, usize, usize, usize),

    #[error("expected a {expected} image, got {actual}")]
    ColorModel {
        expected: &'static str,
        actual: &'static str,
    },

    #[error("invalid parameter `{name}`: {reason}")]
    Parameter { name: &'static str, reason: String },

    #[error("non-finite sample at index {0}")]
    NonFinite(usize),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Error {
    Error::Parameter {
        name,
        reason: reason.into(),
    }
}
