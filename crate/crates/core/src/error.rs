use std::io;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("frequency table is empty")]
    EmptyTable,

    #[error("invalid count {count} for contributor {id:?}{}", row_suffix(*.row))]
    InvalidCount {
        id: String,
        count: i128,
        row: Option<usize>,
    },

    #[error("duplicate contributor id {id:?}{}", row_suffix(*.row))]
    DuplicateId { id: String, row: Option<usize> },

    #[error("invalid subsample fraction {0:?}: must be a decimal in (0, 1]")]
    InvalidFraction(String),

    #[error("fraction {0} requested more than once")]
    DuplicateFraction(String),

    #[error("{metric} is undefined for a single contributor")]
    UndefinedForSingleton { metric: &'static str },

    #[error("series lengths differ ({left} vs {right})")]
    LengthMismatch { left: usize, right: usize },

    #[error("series has zero variance")]
    DegenerateSeries,

    #[error("correlation |r| = 1; interval and p-value are undefined")]
    DegenerateCorrelation,

    #[error("confidence level {0} outside (0, 1)")]
    InvalidLevel(f64),

    #[error("need at least {needed} observations, got {got}")]
    InsufficientN { needed: usize, got: usize },

    #[error("invalid population spec: {0}")]
    InvalidSpec(String),

    #[error("malformed record at line {line}: {reason}")]
    MalformedRecord { line: u64, reason: String },

    #[error("invalid id path {0:?}")]
    InvalidIdPath(String),

    #[error("parse error at row {row}: {message}")]
    Parse { row: usize, message: String },

    #[error(transparent)]
    Io(#[from] io::Error),
}

fn row_suffix(row: Option<usize>) -> String {
    match row {
        Some(r) => format!(" at row {r}"),
        None => String::new(),
    }
}
