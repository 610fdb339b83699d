use thiserror::Error;

use crate::theory::Backend;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("system mismatch: expected {expected}, found {found}")]
    SystemMismatch { expected: String, found: String },
    #[error("mixed backends: {0} and {1}")]
    MixedBackends(Backend, Backend),
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("not physical: {0}")]
    NotPhysical(String),
    #[error("operator is neither entrywise real nor entrywise imaginary")]
    NotRealClass,
    #[error("invalid partition: {0}")]
    InvalidPartition(String),
    #[error("length mismatch: {tests} tests but {probs} probabilities")]
    LengthMismatch { tests: usize, probs: usize },
    #[error("invalid probability vector: {0}")]
    InvalidProbabilities(String),
    #[error("invalid scalar {0}: scalars are nonnegative reals")]
    InvalidScalar(f64),
    #[error("not a test: {0}")]
    NotATest(String),
    #[error("{what} is not supported by the {backend} backend")]
    Unsupported { backend: Backend, what: &'static str },
    #[error("no solution: {0}")]
    NoSolution(String),
}
