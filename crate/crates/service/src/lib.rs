//! HTTP front end (`GET /{api_key}/{place_slug}`) and offline CLI support
//! for the urban scene pipeline.

pub mod app;
pub mod cache;
pub mod config;
pub mod error;
pub mod inputs;
pub mod slug;

pub use app::{generate_scene, router, serve, AppState, Upstreams};
pub use config::Config;
pub use error::ServiceError;
pub use slug::parse_place_slug;
