use urbanscene_core::geomath::BBox;

use crate::error::SourceError;
use crate::limiter::HostPolicy;
use crate::upstream::{ClientSettings, Upstream};

/// OpenTopography-style global DEM endpoint, Copernicus 30 m.
#[derive(Debug, Clone)]
pub struct DemClient {
    upstream: Upstream,
}

impl DemClient {
    pub const DEM_TYPE: &'static str = "COP30";

    pub fn new(base_url: &str, policy: HostPolicy, settings: &ClientSettings) -> Result<Self, SourceError> {
        Ok(DemClient { upstream: Upstream::new("DEM provider", base_url, policy, settings)? })
    }

    /// Raw GeoTIFF bytes covering `bbox` (EPSG:4326).
    pub async fn fetch_dem(&self, bbox: &BBox, api_key: &str) -> Result<Vec<u8>, SourceError> {
        if api_key.is_empty() {
            return Err(SourceError::InvalidInput("empty API key".into()));
        }
        let url = self.upstream.endpoint("API/globaldem");
        let params = [
            ("demtype", Self::DEM_TYPE.to_string()),
            ("south", bbox.south.to_string()),
            ("north", bbox.north.to_string()),
            ("west", bbox.west.to_string()),
            ("east", bbox.east.to_string()),
            ("outputFormat", "GTiff".to_string()),
            ("API_Key", api_key.to_string()),
        ];
        match self.upstream.send(|c| c.get(url.clone()).query(&params)).await {
            Ok(resp) => self.upstream.bytes(resp).await,
            Err(SourceError::Status { status: 401, .. }) => Err(SourceError::InvalidKey),
            Err(e) => Err(e),
        }
    }
}
