use thiserror::Error;

/// Errors produced by the geometry and search routines.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{0} is not a prime power")]
    NotPrimePower(u32),
    #[error("field size q={q} exceeds the configured cap {cap}")]
    ExceedsCap { q: u32, cap: u32 },
    #[error("ambient dimension {0} is outside the supported range 0..={max}", max = crate::linalg::MAX_COORDS - 1)]
    DimensionTooLarge(usize),
    #[error("{what} requires {needed} evaluations, budget is {budget}")]
    BudgetExceeded { what: &'static str, needed: u128, budget: u64 },
    #[error("value out of range: {0}")]
    OutOfRange(String),
    #[error("expected a subspace of dimension {expected}, got {actual}")]
    WrongDimension { expected: isize, actual: isize },
    #[error("point is not on the Hermitian variety")]
    NotOnVariety,
    #[error("Hermitian form is degenerate (rank {rank} < {full})")]
    Degenerate { rank: usize, full: usize },
    #[error("matrix is not Hermitian: {0}")]
    NotHermitian(&'static str),
    #[error("arrangement contains duplicate hyperplanes")]
    DuplicateHyperplanes,
    #[error("no pencil over a non-degenerate codimension-2 section has 3 {wanted} members (best pencil had {best})")]
    InsufficientPencilMembers { wanted: &'static str, best: usize },
    #[error("precondition violated: {0}")]
    PreconditionViolated(String),
    #[error("dimension mismatch: expected {expected} coordinates, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },
    #[error("unknown suite `{0}`")]
    UnknownSuite(String),
    #[error("unknown mode `{0}`")]
    UnknownMode(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
