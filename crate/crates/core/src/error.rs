use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("matrix is singular")]
    SingularMatrix,
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("unknown group `{0}`")]
    UnknownGroup(String),
    #[error("malformed group: {0}")]
    MalformedGroup(String),
    #[error("no group element maps the point into the fundamental domain")]
    ProjectionNotFound,
    #[error("1 is an eigenvalue of A")]
    OneInSpectrum,
    #[error("lattice of {needed} points exceeds the budget of {budget}")]
    BudgetExceeded { needed: u128, budget: u128 },
    #[error("modulus {p} is not coprime to det A = {det}")]
    NotCoprime { p: u64, det: i128 },
    #[error("an eigenvalue has modulus 1")]
    ModulusOne,
    #[error("probe vector is zero")]
    ZeroProbe,
    #[error("output row C is zero")]
    ZeroC,
    #[error("matrix is not unimodular (det = {0})")]
    NotUnimodular(i128),
    #[error("pair is not in companion form: {0}")]
    NotCompanion(String),
    #[error("internal inconsistency: {0}")]
    InternalInconsistency(String),
    #[error("characteristic polynomial has a root on the unit circle")]
    RootOnUnitCircle,
    #[error("characteristic polynomial has the root 0")]
    ZeroEigenvalue,
    #[error("A is incompatible with the group: {0}")]
    GroupIncompatible(String),
    #[error("step {k} precedes synchronization (requires k >= {first})")]
    NotYetSynchronized { k: usize, first: usize },
    #[error("frame stream has a gap at step {k}")]
    FrameGap { k: usize },
    #[error("parse error: {0}")]
    Parse(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}
