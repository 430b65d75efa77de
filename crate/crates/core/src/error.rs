use thiserror::Error;

/// Errors raised anywhere in the laboratory.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("variable index {index} out of range for dimension {dim}")]
    IndexOutOfRange { index: usize, dim: usize },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("unsupported dimension {dim}: {reason}")]
    UnsupportedDimension { dim: usize, reason: String },

    #[error("{op} is undefined at leading value {value}")]
    Domain { op: &'static str, value: f64 },

    #[error("point {point:?} lies outside the admissible domain: {reason}")]
    OutsideDomain { point: Vec<f64>, reason: String },

    #[error("finite-difference stencil leaves the domain at {point:?}")]
    StencilOutsideDomain { point: Vec<f64> },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("{0}")]
    ThetaOutOfRange(String),

    #[error("degenerate Hessian (determinant {det:e}) at {point:?}")]
    DegenerateHessian { point: Vec<f64>, det: f64 },

    #[error("domain is unbounded: {0}")]
    Unbounded(String),

    #[error("quadrature failed: {0}")]
    Quadrature(String),

    #[error("non-integrable singularity: {0}")]
    NonIntegrable(String),

    #[error("root bracket failure: {0}")]
    Bracket(String),

    #[error("ODE integration failed: {0}")]
    Ode(String),

    #[error("convexity violated: {0}")]
    ConvexityViolation(String),

    #[error("boundary condition violated: {0}")]
    BoundaryCondition(String),

    #[error("degenerate geometry: {0}")]
    DegenerateGeometry(String),

    #[error("empty sample: {0}")]
    EmptySample(String),

    #[error("construction check failed: {0}")]
    Construction(String),
}

pub type Result<T> = std::result::Result<T, Error>;
