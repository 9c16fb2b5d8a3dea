use urbanscene_core::geomath::BBox;
use urbanscene_core::sources::{build_overpass_query, parse_overpass_json, OsmLayer, OsmWay};

use crate::error::SourceError;
use crate::limiter::HostPolicy;
use crate::upstream::{ClientSettings, Upstream};

/// Overpass API interpreter endpoint; the base URL is the full interpreter URL.
#[derive(Debug, Clone)]
pub struct OverpassClient {
    upstream: Upstream,
}

impl OverpassClient {
    pub fn new(base_url: &str, policy: HostPolicy, settings: &ClientSettings) -> Result<Self, SourceError> {
        Ok(OverpassClient { upstream: Upstream::new("Overpass", base_url, policy, settings)? })
    }

    pub async fn fetch_osm_layer(&self, bbox: &BBox, layer: OsmLayer) -> Result<Vec<OsmWay>, SourceError> {
        let query = build_overpass_query(bbox, layer);
        let url = self.upstream.base.clone();
        let resp = self.upstream.send(|c| c.post(url.clone()).form(&[("data", query.as_str())])).await?;
        let body = self.upstream.text(resp).await?;
        parse_overpass_json(&body, layer).map_err(|e| self.upstream.parse_error(e))
    }
}
