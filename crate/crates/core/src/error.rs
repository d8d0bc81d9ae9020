//! Error type shared by every inference routine.
//!
//! Indices carried by variants are 0-based; `Display` renders them 1-based
//! so messages line up with `s_1 .. s_N` style numbering.

use thiserror::Error;

pub type Result<T, E = ModelError> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("label space must contain at least one label")]
    EmptyLabelSpace,

    #[error("label {} is empty", index + 1)]
    EmptyLabel { index: usize },

    #[error("label `{label}` appears more than once")]
    DuplicateLabel { label: String },

    #[error("unknown label `{label}`")]
    UnknownLabel { label: String },

    #[error("index {} out of range for a space of size {size}", index + 1)]
    IndexOutOfRange { index: usize, size: usize },

    #[error("entry {} is not a finite number ({value})", index + 1)]
    NonFiniteEntry { index: usize, value: f64 },

    #[error("entry {} is negative ({value})", index + 1)]
    NegativeEntry { index: usize, value: f64 },

    #[error("entries sum to {actual_sum}, expected 1")]
    SumNotOne { actual_sum: f64 },

    #[error("expected {expected} entries, found {actual}")]
    LengthMismatch { expected: usize, actual: usize },

    #[error("entry ({}, {}) is not a finite number ({value})", row + 1, col + 1)]
    NonFiniteMatrixEntry { row: usize, col: usize, value: f64 },

    #[error("entry ({}, {}) is negative ({value})", row + 1, col + 1)]
    NegativeMatrixEntry { row: usize, col: usize, value: f64 },

    #[error("row {} sums to {actual_sum}, expected 1", row + 1)]
    RowSumNotOne { row: usize, actual_sum: f64 },

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("label spaces do not match: {0}")]
    SpaceMismatch(&'static str),

    #[error("sequence must contain at least one element")]
    EmptySequence,

    #[error("observation sequence is empty")]
    EmptyObservationSequence,

    #[error("time index must be at least 1, got {0}")]
    InvalidTime(usize),

    #[error("split point {split} must satisfy 1 < split < {len}")]
    SplitOutOfRange { split: usize, len: usize },

    #[error("enumeration requires {required} sequences, cap is {cap}")]
    EnumerationTooLarge { required: u128, cap: u64 },

    #[error("evidence has probability zero")]
    ZeroEvidence,
}
