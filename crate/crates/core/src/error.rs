use thiserror::Error;

/// Errors raised while building or analysing a mechanism.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// A label or index does not belong to the relevant finite set.
    #[error("unknown {kind} `{label}`")]
    UnknownLabel { kind: &'static str, label: String },

    #[error("{kind} index {index} out of range (len {len})")]
    IndexOutOfRange {
        kind: &'static str,
        index: usize,
        len: usize,
    },

    /// Two components disagree on agent counts, type counts, action counts, ...
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    /// A model invariant was violated at construction time.
    #[error("invalid model: {0}")]
    InvalidModel(String),

    /// Brute-force enumeration would exceed the configured cap.
    #[error("search space too large: {size} exceeds cap {cap}")]
    SearchSpaceTooLarge { size: String, cap: u64 },

    #[error("invalid rational `{input}`: {reason}")]
    InvalidRational { input: String, reason: String },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn check_index(kind: &'static str, index: usize, len: usize) -> Result<()> {
    if index < len {
        Ok(())
    } else {
        Err(Error::IndexOutOfRange { kind, index, len })
    }
}
