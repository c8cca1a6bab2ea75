use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("index {index} out of range for {len} variables")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("degree mismatch: {0}")]
    DegreeMismatch(String),

    #[error("arity mismatch: expected {expected} functions, got {found}")]
    Arity { expected: usize, found: usize },

    #[error("polynomial is not univariate")]
    NotUnivariate,

    #[error("volume density vanishes at the origin")]
    DegenerateVolume,

    #[error("structure does not vanish at the origin")]
    NonvanishingAtOrigin,

    #[error("dual form is not closed")]
    NotClosed,

    #[error("singular Hessian: rank {rank} < {dim}")]
    SingularHessian { rank: usize, dim: usize },

    #[error("structure constants violate the Jacobi identity")]
    JacobiFailure,

    #[error("invalid Type 1 parameters: {0}")]
    InvalidType1(String),

    #[error("invalid Type 2 matrix shape: expected {expected}x{expected}")]
    InvalidType2 { expected: usize },

    #[error("duality criterion does not apply to q = 2 with coorder {coorder}; use the Jacobi residual")]
    UnsupportedDegree { coorder: usize },

    #[error("Moser spec invalid: {0}")]
    InvalidMoserSpec(String),

    #[error("Moser residual is not proportional to the linear structure")]
    NotProportional,

    #[error("denominator of the Moser coefficient changes sign at f = {f}, t = {t}")]
    BlowUp { f: f64, t: f64 },

    #[error("integration failed: {0}")]
    Integration(String),

    #[error("singular Jacobian")]
    SingularJacobian,

    #[error("vector field is singular on the axis x1 = x2 = 0")]
    SingularAxis,

    #[error("{line}:{col}: {msg}")]
    Parse { line: usize, col: usize, msg: String },

    #[error("division by zero")]
    DivisionByZero,
}
