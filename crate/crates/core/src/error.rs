use std::path::PathBuf;

use thiserror::Error;

/// Coarse failure classes, used by front-ends to pick exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorClass {
    Io,
    Validation,
    Algorithm,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("bad magic: expected {expected:?}, found {found:?}")]
    BadMagic { expected: String, found: String },

    #[error("truncated payload: expected {expected} bytes, found {found}")]
    Truncated { expected: usize, found: usize },

    #[error("wavelengths must be strictly increasing (index {index})")]
    NonIncreasingWavelengths { index: usize },

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("malformed file: {0}")]
    Format(String),

    #[error("primitive {index} invalid: {message}")]
    InvalidPrimitive { index: usize, message: String },

    #[error("{what} out of range: {message}")]
    Range { what: &'static str, message: String },

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("empty scan plan: {0}")]
    EmptyPlan(String),

    #[error("no stripe found (contrast {contrast:.4} below threshold {threshold})")]
    NoStripe { contrast: f64, threshold: f64 },

    #[error("no registration signal: masked overlap is constant for every shift")]
    NoSignal,

    #[error("all {frames} frames failed to register")]
    AllFramesFailed { frames: usize },

    #[error("empty reconstruction: no covered columns")]
    EmptyReconstruction,

    #[error("region {label} too small for a {block}x{block} block")]
    RegionTooSmall { label: u32, block: usize },

    #[error("degenerate reference: {0}")]
    DegenerateReference(String),

    #[error("degenerate signal: {0}")]
    Degenerate(String),
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn range(what: &'static str, message: impl Into<String>) -> Self {
        Error::Range {
            what,
            message: message.into(),
        }
    }

    pub fn class(&self) -> ErrorClass {
        match self {
            Error::Io { .. } => ErrorClass::Io,
            Error::NoStripe { .. }
            | Error::NoSignal
            | Error::AllFramesFailed { .. }
            | Error::EmptyReconstruction
            | Error::RegionTooSmall { .. }
            | Error::DegenerateReference(_)
            | Error::Degenerate(_) => ErrorClass::Algorithm,
            _ => ErrorClass::Validation,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
