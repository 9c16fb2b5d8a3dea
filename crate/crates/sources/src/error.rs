use thiserror::Error;

#[derive(Debug, Error)]
pub enum SourceError {
    #[error("no geocoding result for `{0}`")]
    PlaceNotFound(String),
    #[error("the DEM provider rejected the API key")]
    InvalidKey,
    #[error("{service} returned HTTP {status}")]
    Status { service: &'static str, status: u16 },
    #[error("{service} request failed: {message}")]
    Transport { service: &'static str, message: String },
    #[error("{service} response could not be parsed: {source}")]
    Parse {
        service: &'static str,
        #[source]
        source: urbanscene_core::Error,
    },
    #[error("cannot read {path}: {message}")]
    Io { path: String, message: String },
    #[error("invalid request: {0}")]
    InvalidInput(String),
}

impl SourceError {
    /// HTTP status reported by the upstream, when there was one.
    pub fn upstream_status(&self) -> Option<u16> {
        match self {
            SourceError::Status { status, .. } => Some(*status),
            SourceError::InvalidKey => Some(401),
            _ => None,
        }
    }
}
