use thiserror::Error;

/// Errors raised by grid construction and the core field operations.
#[derive(Debug, Error)]
pub enum CoreError {
    #[error("grid too small: axis {axis} has {nodes} nodes, need at least {min}")]
    GridTooSmall { axis: String, nodes: usize, min: usize },

    #[error("invalid grid parameter: {0}")]
    InvalidGrid(String),

    #[error("rank mismatch: expected {expected} components, field has {actual}")]
    RankMismatch { expected: usize, actual: usize },

    #[error("fields live on incompatible grids ({0})")]
    GridMismatch(String),

    #[error("direction is not a unit vector: |omega| = {0}")]
    NotUnit(f64),

    #[error("epsilon out of range (0, 2]: {0}")]
    BadEpsilon(f64),

    #[error("frequency not orthogonal to (1,-omega): xi.(1,-omega) = {0:e}")]
    NotCharacteristic(f64),

    #[error("semiclassical parameter must be positive, got h = {0}")]
    NonPositiveH(f64),

    #[error("empty integration region: {0}")]
    EmptyRegion(String),

    #[error("exponent overflow: |phi|/h = {exponent:.1} exceeds {limit:.1}; rescale the domain or increase h (hint: h >= {hint:.3e})")]
    ExponentOverflow { exponent: f64, limit: f64, hint: f64 },

    #[error("field support touches the boundary of Q (node {0:?})")]
    SupportTouchesBoundary(Vec<usize>),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("bad BWLAB1 file: {0}")]
    BadFormat(String),
}

pub type Result<T> = std::result::Result<T, CoreError>;
