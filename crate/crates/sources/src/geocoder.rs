use urbanscene_core::sources::{parse_geocode_response, GeocodedArea, DEFAULT_POINT_HALF_WIDTH_M};

use crate::error::SourceError;
use crate::limiter::HostPolicy;
use crate::upstream::{ClientSettings, Upstream};

/// Nominatim-style geocoder.
#[derive(Debug, Clone)]
pub struct GeocoderClient {
    upstream: Upstream,
    point_half_width_m: f64,
}

impl GeocoderClient {
    pub fn new(base_url: &str, policy: HostPolicy, settings: &ClientSettings) -> Result<Self, SourceError> {
        Ok(GeocoderClient {
            upstream: Upstream::new("geocoder", base_url, policy, settings)?,
            point_half_width_m: DEFAULT_POINT_HALF_WIDTH_M,
        })
    }

    /// Half-width of the square used when the geocoder only returns a point.
    pub fn with_point_half_width(mut self, meters: f64) -> Self {
        self.point_half_width_m = meters;
        self
    }

    pub async fn geocode_place(&self, name: &str) -> Result<GeocodedArea, SourceError> {
        let name = name.trim();
        if name.is_empty() {
            return Err(SourceError::InvalidInput("empty place name".into()));
        }
        let url = self.upstream.endpoint("search");
        let params = [("q", name), ("format", "geojson"), ("polygon_geojson", "1"), ("limit", "1")];
        let resp = self.upstream.send(|c| c.get(url.clone()).query(&params)).await?;
        let body = self.upstream.text(resp).await?;
        parse_geocode_response(&body, self.point_half_width_m)
            .map_err(|e| self.upstream.parse_error(e))?
            .ok_or_else(|| SourceError::PlaceNotFound(name.to_string()))
    }
}
