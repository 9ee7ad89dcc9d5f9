//! Crate-wide error type.

/// Convenience alias used throughout the crate.
pub type Result<T> = core::result::Result<T, Error>;

/// Contract violations and runtime failures.
///
/// Construction-time checks (dimension chaining, finiteness, valid
/// hyperparameters) surface here so that the numeric kernels can assume
/// well-formed inputs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Error {
    /// Two shapes that must agree do not. `what` names the mismatched value.
    DimensionMismatch {
        what: &'static str,
        expected: usize,
        got: usize,
    },
    /// A scalar argument violates its documented precondition.
    InvalidArgument(&'static str),
    /// A value that must be finite is NaN or infinite.
    NonFinite(&'static str),
    /// A dataset that must hold at least one sample is empty.
    EmptyDataset(&'static str),
    /// Stage index outside `1..=L` for an `L`-layer architecture.
    StageOutOfRange { stage: usize, stages: usize },
    /// Depth outside `1..=L` in an activation query.
    DepthOutOfRange { depth: usize, layers: usize },
    /// Training produced a non-finite loss. `stage` is 1 for full training.
    Diverged { stage: usize, epoch: usize },
}

impl core::fmt::Display for Error {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            Error::DimensionMismatch {
                what,
                expected,
                got,
            } => write!(f, "dimension mismatch for {what}: expected {expected}, got {got}"),
            Error::InvalidArgument(what) => write!(f, "invalid argument: {what}"),
            Error::NonFinite(what) => write!(f, "non-finite value in {what}"),
            Error::EmptyDataset(what) => write!(f, "empty dataset: {what}"),
            Error::StageOutOfRange { stage, stages } => {
                write!(f, "stage {stage} out of range 1..={stages}")
            }
            Error::DepthOutOfRange { depth, layers } => {
                write!(f, "depth {depth} out of range 1..={layers}")
            }
            Error::Diverged { stage, epoch } => {
                write!(f, "training diverged (non-finite loss) at stage {stage}, epoch {epoch}")
            }
        }
    }
}

impl core::error::Error for Error {}
