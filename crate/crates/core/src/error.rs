use thiserror::Error;

use crate::scalar::ScalarError;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error(transparent)]
    Scalar(#[from] ScalarError),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid signature: {0}")]
    InvalidSignature(String),

    #[error("point at index {index} is not on the quadric: form value {value}, expected {expected}")]
    OffQuadric {
        index: usize,
        value: String,
        expected: i8,
    },

    #[error("point at index {index} is invalid: {reason}")]
    InvalidPoint { index: usize, reason: String },

    #[error("direction vector is not a unit vector (norm {0})")]
    NonUnitDirection(f64),

    #[error("rotation block {start}..={end} straddles the positive/negative split at {p}")]
    BlockStraddlesSignature { start: usize, end: usize, p: usize },

    #[error("matrix is not a special orthogonal 2x2 rotation")]
    NotARotation,

    #[error("basis function undefined at point: {0}")]
    NodeUndefined(String),

    #[error("prefactor is irrational at this point; use float mode")]
    IrrationalPrefactor,

    #[error("singular system: {0}")]
    SingularSystem(Singularity),

    #[error("points are not in general position: {0}")]
    NotInGeneralPosition(String),

    #[error("data values are constant; a nonconstant function is required")]
    NonConstantViolation,

    #[error("dataset is malformed: {0}")]
    InvalidDataset(String),

    #[error("residual {best:e} could not be brought below the target {target:e} after {attempts} attempts")]
    ToleranceUnreachable {
        best: f64,
        target: f64,
        attempts: usize,
    },

    #[error("no scanned rotation produced all nonzero coefficients")]
    MaximalityUnreachable,

    #[error("extension carries no perturbation record")]
    MissingPerturbationRecord,

    #[error("family {0} is not rotation-equivariant; exact correction unavailable")]
    NotEquivariant(String),

    #[error("index {index} out of range 0..={max}")]
    IndexOutOfRange { index: usize, max: usize },

    #[error("target tolerance must be positive")]
    NonPositiveTolerance,

    #[error("group element violates its defining relations: {0}")]
    NotInGroup(String),

    #[error("exceptional group element: det D = 0")]
    ExceptionalElement,

    #[error("point lies outside the bounded domain (operator norm >= 1)")]
    OutsideDomain,

    #[error("coincident D-blocks need perturbation, which is unavailable for this group")]
    NeedsPerturbation,
}

/// Where a Vandermonde system degenerates.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Singularity {
    /// Two rows share the same node value.
    CoincidentNodes(usize, usize),
    /// A node is zero while negative or positive powers are required.
    ZeroNode(usize),
    /// A prefactor vanishes.
    ZeroPrefactor(usize),
    /// Elimination found no pivot in this column.
    NoPivot(usize),
}

impl std::fmt::Display for Singularity {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Singularity::CoincidentNodes(i, j) => write!(f, "points {i} and {j} share a node value"),
            Singularity::ZeroNode(i) => write!(f, "point {i} has a zero node"),
            Singularity::ZeroPrefactor(i) => write!(f, "point {i} has a zero prefactor"),
            Singularity::NoPivot(c) => write!(f, "no pivot in column {c}"),
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
