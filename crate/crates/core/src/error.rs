use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid bisection tag {tag} for a {dim}-simplex (expected 0..={dim})")]
    InvalidTag { tag: usize, dim: usize },
    #[error("degenerate simplex (volume {volume:e})")]
    Degenerate { volume: f64 },
    #[error("partition has no elements")]
    EmptyPartition,
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("affine map is singular")]
    SingularMap,
    #[error("unsupported quadrature order {order} in dimension {dim}")]
    UnsupportedOrder { order: usize, dim: usize },
    #[error("field returned a non-finite value {value} at t={t}, x={x:?}")]
    NonFiniteValue { value: f64, t: f64, x: Vec<f64> },
    #[error("unknown field `{0}`")]
    UnknownName(String),
    #[error("shifted point leaves the domain")]
    OutOfDomain,
    #[error("singular Gram matrix on element (degenerate element or rule)")]
    SingularGram,
    #[error("local fit did not converge after {iterations} iterations")]
    NoConvergence { iterations: usize },
    #[error("precondition violated: {0}")]
    PreconditionViolated(String),
    #[error("Jackson right-hand side vanishes ({rhs:e}) while the error is {lhs:e}")]
    DegenerateRhs { lhs: f64, rhs: f64 },
    #[error("greedy loop stopped after {rounds} rounds without terminating")]
    MaxRoundsExceeded { rounds: usize },
    #[error("refusing to grow partition beyond {cap} elements")]
    ElementCap { cap: usize },
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },
}

impl Error {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}
