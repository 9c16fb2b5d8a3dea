use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::Json;
use urbanscene_sources::SourceError;

/// Every failure the HTTP front end can report.
#[derive(Debug, thiserror::Error)]
pub enum ServiceError {
    #[error("{0}")]
    BadRequest(String),
    #[error("{0}")]
    NotFound(String),
    #[error("{0}")]
    InvalidKey(String),
    #[error("{0}")]
    Upstream(String),
    #[error("{0}")]
    TooLarge(String),
}

impl ServiceError {
    pub fn status(&self) -> StatusCode {
        match self {
            ServiceError::BadRequest(_) => StatusCode::BAD_REQUEST,
            ServiceError::NotFound(_) => StatusCode::NOT_FOUND,
            ServiceError::InvalidKey(_) => StatusCode::UNAUTHORIZED,
            ServiceError::Upstream(_) => StatusCode::BAD_GATEWAY,
            ServiceError::TooLarge(_) => StatusCode::UNPROCESSABLE_ENTITY,
        }
    }
}

impl From<SourceError> for ServiceError {
    fn from(e: SourceError) -> Self {
        match e {
            SourceError::PlaceNotFound(_) => ServiceError::NotFound(e.to_string()),
            SourceError::InvalidKey => ServiceError::InvalidKey(e.to_string()),
            SourceError::InvalidInput(_) => ServiceError::BadRequest(e.to_string()),
            SourceError::Status { .. } | SourceError::Transport { .. } | SourceError::Parse { .. } | SourceError::Io { .. } => {
                ServiceError::Upstream(e.to_string())
            }
        }
    }
}

impl From<urbanscene_core::Error> for ServiceError {
    fn from(e: urbanscene_core::Error) -> Self {
        match e {
            urbanscene_core::Error::TooLarge { .. } => ServiceError::TooLarge(e.to_string()),
            // Anything else here stems from the data the upstreams returned.
            other => ServiceError::Upstream(format!("upstream data could not be processed: {other}")),
        }
    }
}

impl IntoResponse for ServiceError {
    fn into_response(self) -> Response {
        (self.status(), Json(serde_json::json!({ "error": self.to_string() }))).into_response()
    }
}
