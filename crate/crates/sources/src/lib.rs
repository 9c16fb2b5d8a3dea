//! Async clients for the upstream open-data providers.
//!
//! Every client shares a [`RateLimiters`] registry so that requests to the
//! same host are spaced and bounded no matter which client issues them.
//! Response parsing lives in `urbanscene_core::sources`; this crate only
//! moves bytes.

mod dem;
mod error;
mod geocoder;
mod heights;
mod limiter;
mod overpass;
mod upstream;

pub use dem::DemClient;
pub use error::SourceError;
pub use geocoder::GeocoderClient;
pub use heights::{FileHeights, HeightProvider, HttpHeights, NoHeights};
pub use limiter::{HostLimiter, HostPolicy, RateLimiters, RetryPolicy};
pub use overpass::OverpassClient;
pub use upstream::{ClientSettings, DEFAULT_USER_AGENT};
