//! Reading pipeline inputs from local files for offline runs.

use std::path::Path;

use urbanscene_core::geomath::Crs;
use urbanscene_core::raster::{parse_ascii_grid, parse_geotiff, DemGrid};
use urbanscene_core::sources::{parse_height_features, parse_overpass_json, parse_vector_geojson, HeightFeature, OsmLayer, OsmWay};

#[derive(Debug, thiserror::Error)]
#[error("{stage} {path}: {message}")]
pub struct LoadError {
    pub stage: &'static str,
    pub path: String,
    pub message: String,
}

fn fail(stage: &'static str, path: &Path, message: impl ToString) -> LoadError {
    LoadError { stage, path: path.display().to_string(), message: message.to_string() }
}

fn read_text(path: &Path) -> Result<String, LoadError> {
    std::fs::read_to_string(path).map_err(|e| fail("cannot read", path, e))
}

fn is_tiff(bytes: &[u8]) -> bool {
    bytes.starts_with(b"II*\0") || bytes.starts_with(b"MM\0*") || bytes.starts_with(b"II+\0") || bytes.starts_with(b"MM\0+")
}

/// GeoTIFF (detected by its magic bytes) or ESRI ASCII grid in `ascii_crs`.
pub fn load_dem(path: &Path, ascii_crs: Crs) -> Result<DemGrid, LoadError> {
    let bytes = std::fs::read(path).map_err(|e| fail("cannot read", path, e))?;
    let grid = if is_tiff(&bytes) {
        parse_geotiff(&bytes)
    } else {
        let text = String::from_utf8(bytes).map_err(|_| fail("cannot parse DEM", path, "neither a TIFF nor UTF-8 text"))?;
        parse_ascii_grid(&text, ascii_crs)
    };
    grid.map_err(|e| fail("cannot parse DEM", path, e))
}

/// Overpass JSON (`{"elements": [...]}`) or a GeoJSON FeatureCollection.
pub fn load_ways(path: &Path, layer: OsmLayer) -> Result<Vec<OsmWay>, LoadError> {
    let text = read_text(path)?;
    let stage = match layer {
        OsmLayer::Road => "cannot parse roads",
        OsmLayer::Power => "cannot parse power lines",
        OsmLayer::Building => "cannot parse buildings",
    };
    let overpass = text.trim_start().starts_with('{') && text.contains("\"elements\"");
    let ways = if overpass { parse_overpass_json(&text, layer) } else { parse_vector_geojson(&text) };
    let mut ways = ways.map_err(|e| fail(stage, path, e))?;
    if layer == OsmLayer::Building {
        ways.retain(|w| w.coords.first() == w.coords.last());
    }
    Ok(ways)
}

pub fn load_heights(path: &Path) -> Result<Vec<HeightFeature>, LoadError> {
    let text = read_text(path)?;
    parse_height_features(&text, Crs::Wgs84).map_err(|e| fail("cannot parse heights", path, e))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn missing_file_names_path() {
        let err = load_dem(Path::new("/nonexistent/dem.tif"), Crs::Wgs84).unwrap_err();
        assert!(err.to_string().contains("/nonexistent/dem.tif"), "{err}");
    }

    #[test]
    fn geojson_lines_are_accepted() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("roads.geojson");
        std::fs::write(
            &p,
            r#"{"type":"FeatureCollection","features":[{"type":"Feature","id":3,"properties":{"highway":"primary"},
                "geometry":{"type":"LineString","coordinates":[[10.8,59.9],[10.81,59.91]]}}]}"#,
        )
        .unwrap();
        let ways = load_ways(&p, OsmLayer::Road).unwrap();
        assert_eq!(ways.len(), 1);
        assert_eq!(ways[0].tag("highway"), Some("primary"));
        assert!(load_ways(&p, OsmLayer::Building).unwrap().is_empty());
    }
}
