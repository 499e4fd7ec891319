//! Crate-wide error type.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// A matrix dimension does not match the tensor mode it is applied to.
    #[error("mode {mode}: matrix has {matrix_cols} columns but tensor dimension is {tensor_dim}")]
    ModeDimensionMismatch {
        mode: usize,
        matrix_cols: usize,
        tensor_dim: usize,
    },

    /// Two tensors that must share a shape do not.
    #[error("tensor shapes differ: {left:?} vs {right:?}")]
    ShapeMismatch { left: Vec<usize>, right: Vec<usize> },

    /// A mode index outside `1..=rank`.
    #[error("mode {mode} out of range for rank-{rank} tensor")]
    ModeOutOfRange { mode: usize, rank: usize },

    /// A slice or element index outside the mode's extent.
    #[error("index {index} out of range for dimension of size {len}")]
    IndexOutOfRange { index: usize, len: usize },

    /// Tensor data length inconsistent with the declared dimensions.
    #[error("data length {len} does not match product of dims {dims:?}")]
    DataLength { len: usize, dims: Vec<usize> },

    /// Cholesky factorization hit a nonpositive pivot: the matrix is not
    /// positive definite (beyond any jitter rescue).
    #[error("matrix is not positive definite: nonpositive pivot at index {pivot}")]
    NotPositiveDefinite { pivot: usize },

    /// A parameter violated its domain (nonpositive scale, |rho| >= 1, ...).
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// A precondition on an operation's inputs failed.
    #[error("precondition failed: {0}")]
    Precondition(String),

    /// A numeric evaluation produced a non-finite value.
    #[error("non-finite value in {context}")]
    NonFinite { context: String },

    /// The sampler could not start or continue.
    #[error("sampler error: {0}")]
    Sampler(String),

    /// A text file failed to parse.
    #[error("{path}:{line}: {message}")]
    Parse {
        path: String,
        line: usize,
        message: String,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
