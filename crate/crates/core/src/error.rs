use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is empty")]
    EmptyMatrix,
    #[error("input list is empty")]
    EmptyInput,
    #[error("matrix is not Hermitian (max |m - m*| = {deviation:e})")]
    NonHermitian { deviation: f64 },
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },
    #[error("operator is singular or not positive definite (min eig {min_eig:e}, max eig {max_eig:e})")]
    SingularOperator { min_eig: f64, max_eig: f64 },
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("non-finite entry at position {index}")]
    NonFinite { index: usize },
    #[error("invalid atom {index}: {field} {reason}")]
    InvalidAtom {
        index: usize,
        field: &'static str,
        reason: String,
    },
    #[error("operator model has no atoms")]
    NoAtoms,
    #[error("vector is zero")]
    ZeroVector,
    #[error("vector lies in the kernel of the operator")]
    KernelVector,
    #[error("seed {seed} lies in the kernel of the operator")]
    KernelSeed { seed: usize },
    #[error("seed {seed}: offset {offset} at n = {n} violates |offset| <= {eta} or n + offset >= 0")]
    OffsetOutOfRange {
        seed: usize,
        n: usize,
        offset: i64,
        eta: usize,
    },
    #[error("length mismatch: {what} (expected {expected}, found {found})")]
    LengthMismatch {
        what: &'static str,
        expected: usize,
        found: usize,
    },
    #[error("invalid index set for seed {seed}: {reason}")]
    InvalidIndexSet { seed: usize, reason: String },
    #[error("invalid scaling rule: {0}")]
    InvalidScaling(String),
    #[error("family is empty")]
    EmptyFamily,
    #[error("family is not a frame (lower bound {lower:e} <= tolerance)")]
    NotAFrame { lower: f64 },
    #[error("point {index} lies outside the open unit disk (|z| = {modulus})")]
    PointOutsideDisk { index: usize, modulus: f64 },
    #[error("indices are not strictly increasing at position {position}")]
    NotSorted { position: usize },
    #[error("delta must be positive and finite, got {0}")]
    InvalidDelta(f64),
    #[error("invalid radii: r_min = {r_min}, r_max = {r_max}")]
    InvalidRadii { r_min: f64, r_max: f64 },
    #[error("invalid parameter {name}: {reason}")]
    InvalidParameter { name: &'static str, reason: String },
}
