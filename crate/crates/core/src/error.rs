use thiserror::Error;

use crate::network::Violation;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch in {op}: {left:?} vs {right:?}")]
    DimensionMismatch {
        op: &'static str,
        left: (usize, usize),
        right: (usize, usize),
    },

    #[error("block {block:?} has shape {found:?}, expected {expected:?}")]
    BlockMismatch {
        block: (usize, usize),
        found: (usize, usize),
        expected: (usize, usize),
    },

    #[error("pattern graph needs rows <= cols, got {rows}x{cols}")]
    BadShape { rows: usize, cols: usize },

    #[error("invalid token {token:?} at row {row}, column {col} (expected \"0\", \"*\" or \"?\")")]
    BadToken {
        row: usize,
        col: usize,
        token: String,
    },

    #[error("ragged grid: row {row} has {found} entries, expected {expected}")]
    Ragged {
        row: usize,
        found: usize,
        expected: usize,
    },

    #[error("network violates the input/output assumption ({} violation(s))", .0.len())]
    AssumptionViolated(Vec<Violation>),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
