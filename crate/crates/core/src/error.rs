use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("coordinate out of domain: {0}")]
    OutOfDomain(String),

    #[error("degenerate geometry: {0}")]
    DegenerateGeometry(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("parse error at line {line}: {message}")]
    ParseLine { line: usize, message: String },

    #[error("parse error: {0}")]
    Parse(String),

    #[error("unsupported feature: {0}")]
    Unsupported(String),

    #[error("raster is empty: {0}")]
    EmptyRaster(String),

    #[error("mesh is empty: {0}")]
    EmptyMesh(String),

    #[error("no valid elevation under footprint")]
    NoElevation,

    #[error("triangulation failed: {0}")]
    Triangulation(String),

    #[error("scene has no terrain")]
    EmptyScene,

    #[error("non-finite coordinate in trace `{0}`")]
    NonFinite(String),

    #[error("raster of {pixels} pixels exceeds the budget of {budget}")]
    TooLarge { pixels: u64, budget: u64 },
}
