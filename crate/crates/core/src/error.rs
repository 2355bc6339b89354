use thiserror::Error;

/// Errors raised by the set algebra, structure search and theorem checks.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("rank mismatch: left operand has rank {left}, right operand has rank {right}")]
    ContextMismatch { left: u32, right: u32 },

    #[error("operation requires a non-empty set")]
    EmptySet,

    #[error("rank {rank} exceeds the supported maximum {cap}")]
    RankTooLarge { rank: u32, cap: u32 },

    #[error("element {element} is outside F_2^{rank}")]
    ElementOutOfRange { element: u64, rank: u32 },

    #[error("invalid subgroup: {0}")]
    InvalidSubgroup(String),

    #[error("parse error at offset {offset}: {message}")]
    Parse { offset: usize, message: String },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("invalid construction: {0}")]
    Construction(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn ensure_same_rank(left: u32, right: u32) -> Result<()> {
    if left == right {
        Ok(())
    } else {
        Err(Error::ContextMismatch { left, right })
    }
}
