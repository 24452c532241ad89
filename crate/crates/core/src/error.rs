//! Crate-wide error type.

use crate::context::AlgebraContext;

/// The error type for fallible operations in this crate.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[non_exhaustive]
pub enum Error {
    /// A row or column index lies outside `1..=m+n`.
    #[error("index {index} out of range 1..={size}")]
    IndexOutOfRange { index: usize, size: usize },

    /// A generator level lies outside `1..=cap`.
    #[error("generator level {level} out of range 1..={cap}")]
    LevelOutOfRange { level: u32, cap: u32 },

    /// Two operands belong to different algebra contexts.
    #[error("context mismatch: {left} vs {right}")]
    ContextMismatch {
        left: AlgebraContext,
        right: AlgebraContext,
    },

    /// The degree of the zero element is undefined.
    #[error("the zero element has no degree")]
    ZeroDegree,

    /// Malformed text passed to a parser.
    #[error("parse error at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },

    /// Exact division by a power of h failed.
    #[error("element is not divisible by h^{power}")]
    NotDivisibleByH { power: u32 },

    /// Rewriting (or a rule derivation) would need a generator level above
    /// the context's cap; the computation cannot proceed soundly because
    /// dropping the term would corrupt exact coefficients.
    #[error("rewriting needs generator level {level}, above the level cap {cap}; raise the cap")]
    LevelCapExceeded { level: u32, cap: u32 },

    /// A series or matrix has no inverse within the truncation.
    #[error("not invertible: {reason}")]
    NotInvertible { reason: String },

    /// Two series with different variable directions were combined.
    #[error("series direction mismatch")]
    DirectionMismatch,

    /// Two matrices (or series) of incompatible sizes were combined.
    #[error("size mismatch: {left} vs {right}")]
    SizeMismatch { left: usize, right: usize },

    /// A stored cache file does not match the requested configuration.
    #[error("stale cache: {0}")]
    StaleCache(String),

    /// A rewrite rule was requested for a pair that is already in normal
    /// order, so no rule exists for it.
    #[error("generator pair is already in normal order; no rewrite rule applies")]
    AlreadyOrdered,
}

pub type Result<T> = std::result::Result<T, Error>;
