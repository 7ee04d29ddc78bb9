use thiserror::Error;

/// Errors raised by grid construction, operators and the verification harness.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("field values must be finite (first offending cell {index})")]
    NonFiniteValue { index: usize },

    #[error("fields live on different grids")]
    GridMismatch,

    #[error("bump of radius {radius} at {center:?} leaves the box [-{half_width}, {half_width}]^n by {excess}")]
    BumpOutsideDomain { center: Vec<f64>, radius: f64, half_width: f64, excess: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("region contains no cell center")]
    EmptyRegion,

    #[error("region is not contained in the domain box")]
    RegionOutsideDomain,

    #[error("weight must be strictly positive (cell {index} has value {value})")]
    NonPositiveWeight { index: usize, value: f64 },

    #[error("Young function is not convex: {0}")]
    NonConvexYoung(String),

    #[error("unsupported Young family: {0}")]
    UnsupportedYoung(String),

    #[error("B-class membership of {function} in {class} is {verdict}; the bump condition does not apply")]
    BClassNotVerified { function: String, class: String, verdict: String },

    #[error("evaluation point {point:?} coincides with a mass point; offset the grid or the measure by a fraction of a cell")]
    CoincidentPoint { point: Vec<f64> },

    #[error("empty measure")]
    EmptyMeasure,

    #[error("every point was masked out (no right-hand side above the threshold)")]
    EmptyMask,

    #[error("unknown case id `{0}`")]
    UnknownCase(String),

    #[error("degenerate series: {0}")]
    DegenerateSeries(String),

    #[error("dimension {0} is not supported by this operator")]
    UnsupportedDimension(usize),

    #[error("grid file: {0}")]
    GridFormat(String),

    #[error("configuration: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
