use thiserror::Error;

/// Errors surfaced by the exact-arithmetic kernel.
///
/// Every arithmetic path uses checked 128-bit operations; a wrapped result is
/// never produced. Overflow is an abort condition for callers, not a value.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CoreError {
    #[error("integer overflow during {0}")]
    Overflow(&'static str),
    #[error("variable pair count mismatch: {left} vs {right}")]
    PairMismatch { left: usize, right: usize },
    #[error("variable supports overlap (shared mask {0:#x})")]
    OverlappingSupport(u64),
    #[error("sign sequence has {actual} entries, expected {expected}")]
    SigmaLength { expected: usize, actual: usize },
    #[error("evaluation point has {actual} entries, expected {expected}")]
    PointLength { expected: usize, actual: usize },
    #[error("variable index {index} out of range for {pairs} pairs")]
    VarOutOfRange { index: usize, pairs: usize },
    #[error("pair index {index} out of range 1..={pairs}")]
    PairOutOfRange { index: usize, pairs: usize },
    #[error("too many variable pairs: {0} (limit 31)")]
    TooManyPairs(usize),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, CoreError>;

#[inline]
pub(crate) fn add_checked(a: i128, b: i128, ctx: &'static str) -> Result<i128> {
    a.checked_add(b).ok_or(CoreError::Overflow(ctx))
}

#[inline]
pub(crate) fn mul_checked(a: i128, b: i128, ctx: &'static str) -> Result<i128> {
    a.checked_mul(b).ok_or(CoreError::Overflow(ctx))
}

#[inline]
pub(crate) fn neg_checked(a: i128, ctx: &'static str) -> Result<i128> {
    a.checked_neg().ok_or(CoreError::Overflow(ctx))
}
