//! The GeoJSON shapes this crate reads: geocoder results, height
//! polygons and plain vector layers for offline runs.

use std::collections::BTreeMap;

use serde_json::Value;

use super::{GeocodedArea, HeightFeature, OsmWay};
use crate::error::{Error, Result};
use crate::geomath::{ring_metrics, BBox, Coord, Crs, Ring, EARTH_RADIUS};

/// Half-width of the square used when the geocoder returns only a point.
pub const DEFAULT_POINT_HALF_WIDTH_M: f64 = 1000.0;

fn features(doc: &Value) -> Result<&Vec<Value>> {
    match doc["type"].as_str() {
        Some("FeatureCollection") => doc["features"]
            .as_array()
            .ok_or_else(|| Error::Parse("FeatureCollection without `features`".into())),
        Some(other) => Err(Error::Parse(format!("expected a FeatureCollection, got `{other}`"))),
        None => Err(Error::Parse("GeoJSON object has no `type`".into())),
    }
}

fn position(v: &Value) -> Result<Coord> {
    match v.as_array().map(Vec::as_slice) {
        Some([x, y, ..]) => match (x.as_f64(), y.as_f64()) {
            (Some(x), Some(y)) => Ok(Coord::new(x, y)),
            _ => Err(Error::Parse(format!("non-numeric position {v}"))),
        },
        _ => Err(Error::Parse(format!("malformed position {v}"))),
    }
}

fn positions(v: &Value) -> Result<Vec<Coord>> {
    v.as_array()
        .ok_or_else(|| Error::Parse(format!("expected a coordinate array, got {v}")))?
        .iter()
        .map(position)
        .collect()
}

/// Outer rings of a Polygon or MultiPolygon geometry.
fn outer_rings(geometry: &Value, crs: Crs) -> Result<Vec<Ring>> {
    let polys: Vec<&Value> = match geometry["type"].as_str() {
        Some("Polygon") => vec![&geometry["coordinates"]],
        Some("MultiPolygon") => geometry["coordinates"]
            .as_array()
            .ok_or_else(|| Error::Parse("MultiPolygon without coordinates".into()))?
            .iter()
            .collect(),
        _ => return Ok(Vec::new()),
    };
    polys
        .into_iter()
        .map(|p| {
            let outer = p
                .get(0)
                .ok_or_else(|| Error::Parse("polygon without an outer ring".into()))?;
            Ok(Ring::new(positions(outer)?, crs))
        })
        .collect()
}

/// Reads a geocoder GeoJSON response. `Ok(None)` means no results.
///
/// Polygon results use their outer ring; for a MultiPolygon the part with
/// the largest area is taken. A point result becomes a square of
/// `point_half_width_m` ground meters around it.
pub fn parse_geocode_response(text: &str, point_half_width_m: f64) -> Result<Option<GeocodedArea>> {
    let doc: Value = serde_json::from_str(text).map_err(|e| Error::Parse(format!("geocoder JSON: {e}")))?;
    let Some(first) = features(&doc)?.first() else {
        return Ok(None);
    };
    let display_name = first["properties"]["display_name"].as_str().unwrap_or_default().to_string();
    let geometry = &first["geometry"];

    let boundary = match geometry["type"].as_str() {
        Some("Polygon" | "MultiPolygon") => outer_rings(geometry, Crs::Wgs84)?
            .into_iter()
            .filter_map(|r| ring_metrics(&r).ok().map(|m| (m.signed_area.abs(), r)))
            .max_by(|a, b| a.0.total_cmp(&b.0))
            .map(|(_, r)| r)
            .ok_or_else(|| Error::Parse("geocoder polygon has no usable ring".into()))?,
        Some("Point") => {
            let c = position(&geometry["coordinates"])?;
            let dlat = (point_half_width_m / EARTH_RADIUS).to_degrees();
            let dlon = dlat / c.y.to_radians().cos();
            BBox::new(c.x - dlon, c.y - dlat, c.x + dlon, c.y + dlat)?.to_ring(Crs::Wgs84)
        }
        Some("LineString") => BBox::envelope(positions(&geometry["coordinates"])?)?.to_ring(Crs::Wgs84),
        other => return Err(Error::Parse(format!("unsupported geocoder geometry {other:?}"))),
    };
    let bbox = boundary.envelope()?;
    Ok(Some(GeocodedArea { display_name, boundary, bbox }))
}

/// Reads height polygons: Polygon/MultiPolygon features with a numeric
/// `height` property (meters). Features without a positive height are skipped.
pub fn parse_height_features(text: &str, crs: Crs) -> Result<Vec<HeightFeature>> {
    let doc: Value = serde_json::from_str(text).map_err(|e| Error::Parse(format!("height GeoJSON: {e}")))?;
    let mut out = Vec::new();
    for (n, f) in features(&doc)?.iter().enumerate() {
        let height = match &f["properties"]["height"] {
            Value::Number(h) => h.as_f64(),
            Value::String(s) => s.trim().parse().ok(),
            _ => None,
        };
        let Some(height) = height.filter(|h| *h > 0.0 && h.is_finite()) else {
            tracing::debug!(feature = n, "height feature without a positive height");
            continue;
        };
        for ring in outer_rings(&f["geometry"], crs)? {
            if ring.len() >= 3 {
                out.push(HeightFeature { ring, height });
            }
        }
    }
    Ok(out)
}

fn feature_id(f: &Value, fallback: i64) -> i64 {
    let props = &f["properties"];
    [&f["id"], &props["osm_id"], &props["id"]]
        .into_iter()
        .find_map(|v| v.as_i64().or_else(|| v.as_str().and_then(|s| s.trim_start_matches("way/").parse().ok())))
        .unwrap_or(fallback)
}

/// Reads line or polygon features as ways, for offline inputs that are not
/// Overpass JSON. String-valued properties become tags.
pub fn parse_vector_geojson(text: &str) -> Result<Vec<OsmWay>> {
    let doc: Value = serde_json::from_str(text).map_err(|e| Error::Parse(format!("GeoJSON: {e}")))?;
    let mut out = Vec::new();
    for (n, f) in features(&doc)?.iter().enumerate() {
        let id = feature_id(f, n as i64 + 1);
        let tags: BTreeMap<String, String> = f["properties"]
            .as_object()
            .map(|p| p.iter().filter_map(|(k, v)| v.as_str().map(|s| (k.clone(), s.to_string()))).collect())
            .unwrap_or_default();
        let geometry = &f["geometry"];
        let parts: Vec<Vec<Coord>> = match geometry["type"].as_str() {
            Some("LineString") => vec![positions(&geometry["coordinates"])?],
            Some("MultiLineString") => geometry["coordinates"]
                .as_array()
                .ok_or_else(|| Error::Parse("MultiLineString without coordinates".into()))?
                .iter()
                .map(positions)
                .collect::<Result<_>>()?,
            Some("Polygon" | "MultiPolygon") => outer_rings(geometry, Crs::Wgs84)?
                .into_iter()
                .map(|r| {
                    let mut c = r.coords;
                    if let Some(&first) = c.first() {
                        c.push(first);
                    }
                    c
                })
                .collect(),
            _ => continue,
        };
        for coords in parts.into_iter().filter(|c| c.len() >= 2) {
            out.push(OsmWay { id, node_ids: Vec::new(), coords, tags: tags.clone() });
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn square_polygon_envelope() {
        let text = r#"{"type":"FeatureCollection","features":[{"type":"Feature",
            "properties":{"display_name":"Square"},
            "geometry":{"type":"Polygon","coordinates":[[[0,0],[1,0],[1,1],[0,1],[0,0]]]}}]}"#;
        let area = parse_geocode_response(text, 1000.0).unwrap().unwrap();
        assert_eq!(area.bbox, BBox::new(0.0, 0.0, 1.0, 1.0).unwrap());
        assert_eq!(area.boundary.len(), 4);
        assert_eq!(area.display_name, "Square");
    }

    #[test]
    fn empty_result_is_none() {
        let text = r#"{"type":"FeatureCollection","features":[]}"#;
        assert_eq!(parse_geocode_response(text, 1000.0).unwrap(), None);
    }

    #[test]
    fn multipolygon_takes_largest_part() {
        let text = r#"{"type":"FeatureCollection","features":[{"type":"Feature","properties":{},
            "geometry":{"type":"MultiPolygon","coordinates":[
                [[[0,0],[0.1,0],[0.1,0.1],[0,0.1],[0,0]]],
                [[[5,5],[7,5],[7,7],[5,7],[5,5]]]]}}]}"#;
        let area = parse_geocode_response(text, 1000.0).unwrap().unwrap();
        assert_eq!(area.bbox, BBox::new(5.0, 5.0, 7.0, 7.0).unwrap());
    }

    #[test]
    fn point_result_becomes_square() {
        let text = r#"{"type":"FeatureCollection","features":[{"type":"Feature","properties":{},
            "geometry":{"type":"Point","coordinates":[10.0,60.0]}}]}"#;
        let area = parse_geocode_response(text, 1000.0).unwrap().unwrap();
        let dlat = (1000.0 / 6378137.0f64).to_degrees();
        assert!((area.bbox.height() - 2.0 * dlat).abs() < 1e-12);
        // At 60° a degree of longitude is half as long on the ground.
        assert!((area.bbox.width() - 4.0 * dlat).abs() < 1e-9);
        assert!((area.bbox.center().x - 10.0).abs() < 1e-12);
    }

    #[test]
    fn geocoder_garbage_is_a_parse_error() {
        assert!(parse_geocode_response("[]", 1000.0).is_err());
        assert!(parse_geocode_response("not json", 1000.0).is_err());
    }

    #[test]
    fn height_features() {
        let text = r#"{"type":"FeatureCollection","features":[
            {"type":"Feature","properties":{"height":12.5},
             "geometry":{"type":"Polygon","coordinates":[[[0,0],[1,0],[1,1],[0,1],[0,0]]]}},
            {"type":"Feature","properties":{"height":"7"},
             "geometry":{"type":"Polygon","coordinates":[[[2,2],[3,2],[3,3],[2,2]]]}},
            {"type":"Feature","properties":{},
             "geometry":{"type":"Polygon","coordinates":[[[0,0],[1,0],[1,1],[0,0]]]}},
            {"type":"Feature","properties":{"height":-3},
             "geometry":{"type":"Polygon","coordinates":[[[0,0],[1,0],[1,1],[0,0]]]}}
        ]}"#;
        let hs = parse_height_features(text, Crs::Wgs84).unwrap();
        assert_eq!(hs.iter().map(|h| h.height).collect::<Vec<_>>(), vec![12.5, 7.0]);
        assert_eq!(hs[0].ring.len(), 4);
    }

    #[test]
    fn vector_layers() {
        let text = r#"{"type":"FeatureCollection","features":[
            {"type":"Feature","id":42,"properties":{"highway":"primary"},
             "geometry":{"type":"LineString","coordinates":[[0,0],[1,1]]}},
            {"type":"Feature","properties":{"osm_id":"way/77","building":"yes"},
             "geometry":{"type":"Polygon","coordinates":[[[0,0],[1,0],[1,1],[0,0]]]}}
        ]}"#;
        let ways = parse_vector_geojson(text).unwrap();
        assert_eq!(ways.len(), 2);
        assert_eq!(ways[0].id, 42);
        assert_eq!(ways[0].tag("highway"), Some("primary"));
        assert_eq!(ways[1].id, 77);
        assert!(ways[1].is_closed());
    }
}
