//! Upstream data shapes and the pure half of data ingestion: query
//! builders, response parsers and footprint height matching. The HTTP
//! clients live in the `urbanscene-sources` crate.

mod geojson;
mod heights;
mod overpass;

use std::collections::BTreeMap;

pub use geojson::{
    parse_geocode_response, parse_height_features, parse_vector_geojson, DEFAULT_POINT_HALF_WIDTH_M,
};
pub use heights::{assign_heights, HeightFeature};
pub use overpass::{build_overpass_query, parse_overpass_json, DRIVABLE_HIGHWAYS, POWER_LINE_TAGS};

use crate::geomath::{BBox, Coord, Ring};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum OsmLayer {
    Road,
    Power,
    Building,
}

impl OsmLayer {
    pub fn as_str(self) -> &'static str {
        match self {
            OsmLayer::Road => "road",
            OsmLayer::Power => "power",
            OsmLayer::Building => "building",
        }
    }
}

/// A way with its node coordinates resolved (lon/lat degrees).
#[derive(Debug, Clone, PartialEq)]
pub struct OsmWay {
    pub id: i64,
    /// Empty when the way did not come from OSM node references.
    pub node_ids: Vec<i64>,
    pub coords: Vec<Coord>,
    pub tags: BTreeMap<String, String>,
}

impl OsmWay {
    pub fn is_closed(&self) -> bool {
        match (self.node_ids.first(), self.node_ids.last()) {
            (Some(a), Some(b)) => self.node_ids.len() > 2 && a == b,
            _ => self.coords.len() > 2 && self.coords.first() == self.coords.last(),
        }
    }

    pub fn tag(&self, key: &str) -> Option<&str> {
        self.tags.get(key).map(String::as_str)
    }
}

/// A geocoded place: its outer boundary (EPSG:4326) and envelope.
#[derive(Debug, Clone, PartialEq)]
pub struct GeocodedArea {
    pub display_name: String,
    pub boundary: Ring,
    pub bbox: BBox,
}
