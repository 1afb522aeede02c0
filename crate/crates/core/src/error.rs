// SPDX-License-Identifier: MIT OR Apache-2.0

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("hurst must lie in {range}, got {value}")]
    InvalidHurst { value: f64, range: &'static str },

    #[error("series length must be at least {min}, got {got}")]
    TooShort { min: usize, got: usize },

    #[error("non-finite observation at index {index}")]
    NonFinite { index: usize },

    #[error(
        "circulant embedding failed: eigenvalue {min_eigenvalue:e} below tolerance \
         at embedding size {embedding_size}"
    )]
    Embedding {
        min_eigenvalue: f64,
        embedding_size: usize,
    },

    #[error("invalid test window: need 0 < tau1 < tau2 < 1, got tau1 = {tau1}, tau2 = {tau2}")]
    InvalidWindow { tau1: f64, tau2: f64 },

    #[error("window [{tau1}, {tau2}] admits no change-point index for n = {n}")]
    WindowTooNarrow { n: usize, tau1: f64, tau2: f64 },

    #[error("invalid {name}: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("critical value table has no entry for level {level}")]
    MissingCriticalValue { level: f64 },

    #[error("critical value table does not match experiment: {0}")]
    TableMismatch(String),
}

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }

    /// Name of the user-facing parameter this error is about, if any.
    pub fn parameter(&self) -> Option<&'static str> {
        match self {
            Error::InvalidHurst { .. } => Some("hurst"),
            Error::InvalidWindow { .. } | Error::WindowTooNarrow { .. } => Some("tau"),
            Error::InvalidParameter { name, .. } => Some(name),
            Error::MissingCriticalValue { .. } => Some("level"),
            _ => None,
        }
    }
}
