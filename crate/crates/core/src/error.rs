use thiserror::Error;

pub type Result<T> = std::result::Result<T, LabError>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LabError {
    #[error("dilation factor must be positive, got {0}")]
    NonPositiveDilation(f64),
    #[error("the fundamental solution has a pole at the origin")]
    Pole,
    #[error("frequency parameter λ must be nonzero")]
    ZeroFrequency,
    #[error("truncation must be at least {min}, got {got}")]
    Truncation { min: usize, got: usize },
    #[error("invalid spectral grid: {0}")]
    InvalidGrid(String),
    #[error("degenerate quadrature domain: {0}")]
    DegenerateDomain(String),
    #[error("multi-index order {order} exceeds the cap {cap}")]
    OrderTooLarge { order: usize, cap: usize },
    #[error("deficiency candidate has no nonzero coefficient")]
    ZeroCandidate,
    #[error("invalid geodesic coordinates: {0}")]
    InvalidCoordinates(String),
    #[error("coefficient undefined at r = 0")]
    SingularAtZero,
    #[error("exponent α = {0} outside [-3, -2)")]
    AlphaOutOfRange(f64),
    #[error("test function support must stay away from the origin: {0}")]
    SupportTouchesOrigin(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}
