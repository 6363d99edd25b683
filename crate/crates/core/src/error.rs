use thiserror::Error;

/// Errors raised by the library. Every variant is a domain error: the input
/// was understood but violates a precondition of the requested operation.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("the halfspace intersection is empty")]
    EmptyPolyhedron,
    #[error("operation requires a bounded polyhedron")]
    UnboundedInput,
    #[error("body has empty interior (affine dimension {affine_dim} < {dim})")]
    DegenerateBody { dim: usize, affine_dim: usize },
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("dimension {0} is not supported here")]
    UnsupportedDimension(usize),
    #[error("level {level} lies below the infimum {inf}")]
    EmptyLevelSet { level: f64, inf: f64 },
    #[error("pointwise minimum is not convex")]
    NonConvexMin,
    #[error("improper function: {0}")]
    ImproperInput(String),
    #[error("function is not geometric (nonnegative, closed, vanishing at 0)")]
    NotGeometric,
    #[error("function is not even")]
    NotEven,
    #[error("function is not integrable with finite positive mass")]
    NotIntegrable,
    #[error("centroid {norm:e} away from the origin")]
    NotCentered { norm: f64 },
    #[error("ill-positioned input: {0}")]
    IllPositioned(String),
    #[error("parameter count {count} exceeds the oracle limit {limit}")]
    TooManyParameters { count: usize, limit: usize },
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
}

impl Error {
    /// Stable machine-readable name of the variant.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::EmptyPolyhedron => "EmptyPolyhedron",
            Error::UnboundedInput => "UnboundedInput",
            Error::DegenerateBody { .. } => "DegenerateBody",
            Error::DimensionMismatch { .. } => "DimensionMismatch",
            Error::UnsupportedDimension(_) => "UnsupportedDimension",
            Error::EmptyLevelSet { .. } => "EmptyLevelSet",
            Error::NonConvexMin => "NonConvexMin",
            Error::ImproperInput(_) => "ImproperInput",
            Error::NotGeometric => "NotGeometric",
            Error::NotEven => "NotEven",
            Error::NotIntegrable => "NotIntegrable",
            Error::NotCentered { .. } => "NotCentered",
            Error::IllPositioned(_) => "IllPositioned",
            Error::TooManyParameters { .. } => "TooManyParameters",
            Error::InvalidInput(_) => "InvalidInput",
            Error::Numerical(_) => "Numerical",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
