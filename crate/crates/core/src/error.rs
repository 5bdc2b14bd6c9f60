use thiserror::Error;

use crate::matrix::{Label, Violation};

/// Errors produced by the library operations.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("invalid intersection matrix: {0}")]
    Validation(Violation),

    #[error("unknown label {0}")]
    UnknownLabel(Label),

    #[error("not a bijection on the label set: {0}")]
    NotABijection(String),

    #[error("operation needs at least {needed} curves, matrix has {actual}")]
    TooFewCurves { needed: usize, actual: usize },

    #[error("parameter out of range: {0}")]
    OutOfRange(String),

    #[error("size mismatch: {left} curves vs {right} curves")]
    SizeMismatch { left: usize, right: usize },

    #[error("unsupported: {0}")]
    Capability(String),

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error(transparent)]
    Geometry(#[from] crate::geom::GeomError),
}

pub type Result<T> = std::result::Result<T, Error>;
