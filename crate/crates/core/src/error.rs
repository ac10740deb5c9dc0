use thiserror::Error;

/// Reasons a vertex ring is rejected as a simple polygon.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PolygonError {
    #[error("polygon needs at least 3 vertices, got {0}")]
    TooFewVertices(usize),
    #[error("vertex {0} has a non-finite coordinate")]
    NonFinite(usize),
    #[error("vertices {0} and {1} coincide")]
    DuplicateVertex(usize, usize),
    #[error("vertex {0} is collinear with its neighbours")]
    Collinear(usize),
    #[error("polygon has zero area")]
    ZeroArea,
    #[error("edges {0} and {1} intersect")]
    NotSimple(usize, usize),
}

impl PolygonError {
    pub fn tag(&self) -> &'static str {
        match self {
            PolygonError::TooFewVertices(_) => "too-few-vertices",
            PolygonError::NonFinite(_) => "non-finite",
            PolygonError::DuplicateVertex(..) => "duplicate-vertex",
            PolygonError::Collinear(_) => "collinear",
            PolygonError::ZeroArea => "zero-area",
            PolygonError::NotSimple(..) => "not-simple",
        }
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid polygon: {0}")]
    Polygon(#[from] PolygonError),
    #[error("degenerate input: {0}")]
    DegenerateInput(String),
    #[error("polygon has {0} vertices, at least 10 are needed")]
    TooSmall(usize),
    #[error("expected a 9-gon, got {0} edges")]
    NotANonagon(usize),
    #[error("vertex {0} is not reflex")]
    NotReflex(usize),
    #[error("unsupported configuration: {0}")]
    Unsupported(String),
    #[error("guard speed {given} is below the required {required}")]
    SpeedTooLow { given: f64, required: f64 },
    #[error("speed constraints are infeasible: {0}")]
    Infeasible(String),
    #[error("polygon is not orthogonal: {0}")]
    NotOrthogonal(String),
    #[error("quadrilateralization failed: {0}")]
    QuadrilateralizationFailed(String),
    #[error("no single-guard strategy: {0}")]
    StrategyUnavailable(String),
    #[error("partitioning failed: {0}")]
    PartitionFailed(String),
    #[error("invalid simulation config: {0}")]
    ConfigInvalid(String),
    #[error("invalid file: {0}")]
    Format(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Short machine-readable tag used by the CLI's `E:` diagnostics.
    pub fn tag(&self) -> &'static str {
        match self {
            Error::Polygon(e) => e.tag(),
            Error::DegenerateInput(_) => "degenerate-input",
            Error::TooSmall(_) => "too-small",
            Error::NotANonagon(_) => "not-a-nonagon",
            Error::NotReflex(_) => "not-reflex",
            Error::Unsupported(_) => "unsupported",
            Error::SpeedTooLow { .. } => "speed-too-low",
            Error::Infeasible(_) => "infeasible",
            Error::NotOrthogonal(_) => "not-orthogonal",
            Error::QuadrilateralizationFailed(_) => "quadrilateralization-failed",
            Error::StrategyUnavailable(_) => "strategy-unavailable",
            Error::PartitionFailed(_) => "partition-failed",
            Error::ConfigInvalid(_) => "config-invalid",
            Error::Format(_) => "format",
            Error::Io(_) => "io",
            Error::Json(_) => "json",
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
