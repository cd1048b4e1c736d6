use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("malformed rational {0:?}: expected \"p/q\" or an integer")]
    InvalidRational(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("coefficient matrix is not symmetric")]
    NotSymmetric,

    #[error("form has a nonzero constant term; expected a homogeneous form")]
    NotHomogeneous,

    /// The quadratic part has a negative direction, so the expression is
    /// unbounded below.
    #[error("matrix is indefinite; the quadratic expression is unbounded below")]
    Indefinite,

    /// The quadratic part is positive semidefinite but singular and the
    /// linear term has a component outside its range.
    #[error("matrix is singular and the linear term leaves its range; unbounded below")]
    SingularUnbounded,

    #[error("empty range: {0}")]
    EmptyRange(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),
}
