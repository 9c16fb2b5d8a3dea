use std::collections::{BTreeMap, HashMap};

use serde_json::Value;

use super::{OsmLayer, OsmWay};
use crate::error::{Error, Result};
use crate::geomath::{BBox, Coord};

/// `highway=*` values fetched for the road layer.
pub const DRIVABLE_HIGHWAYS: &[&str] = &[
    "motorway",
    "motorway_link",
    "trunk",
    "trunk_link",
    "primary",
    "primary_link",
    "secondary",
    "secondary_link",
    "tertiary",
    "tertiary_link",
    "unclassified",
    "residential",
    "service",
    "living_street",
];

/// `power=*` values fetched for the power layer.
pub const POWER_LINE_TAGS: &[&str] = &["line", "minor_line", "cable", "major_line"];

/// Overpass QL for one layer inside `bbox` (lon/lat). Output is the matching
/// ways followed by their nodes, so coordinates can be joined locally.
pub fn build_overpass_query(bbox: &BBox, layer: OsmLayer) -> String {
    let b = format!("({},{},{},{})", bbox.south, bbox.west, bbox.north, bbox.east);
    let mut q = String::from("[out:json][timeout:60];\n(\n");
    match layer {
        OsmLayer::Road => {
            q.push_str(&format!("  way[\"highway\"~\"^({})$\"]{b};\n", DRIVABLE_HIGHWAYS.join("|")));
        }
        OsmLayer::Power => {
            for tag in POWER_LINE_TAGS {
                q.push_str(&format!("  way[\"power\"=\"{tag}\"]{b};\n"));
            }
        }
        OsmLayer::Building => q.push_str(&format!("  way[\"building\"]{b};\n")),
    }
    q.push_str(");\nout body;\n>;\nout skel qt;\n");
    q
}

/// Joins an Overpass JSON response into coordinate-resolved ways.
///
/// Ways that reference a node missing from the response are dropped with a
/// warning. For the building layer only closed ways are kept.
pub fn parse_overpass_json(text: &str, layer: OsmLayer) -> Result<Vec<OsmWay>> {
    let doc: Value = serde_json::from_str(text).map_err(|e| Error::Parse(format!("Overpass JSON: {e}")))?;
    let elements = doc
        .get("elements")
        .and_then(Value::as_array)
        .ok_or_else(|| Error::Parse("Overpass JSON has no `elements` array".into()))?;

    let mut nodes: HashMap<i64, Coord> = HashMap::new();
    for el in elements.iter().filter(|e| e["type"] == "node") {
        let (Some(id), Some(lat), Some(lon)) = (el["id"].as_i64(), el["lat"].as_f64(), el["lon"].as_f64()) else {
            return Err(Error::Parse(format!("malformed node element: {el}")));
        };
        nodes.insert(id, Coord::new(lon, lat));
    }

    let mut ways = Vec::new();
    for el in elements.iter().filter(|e| e["type"] == "way") {
        let id = el["id"]
            .as_i64()
            .ok_or_else(|| Error::Parse(format!("way element without id: {el}")))?;
        let refs = el["nodes"]
            .as_array()
            .ok_or_else(|| Error::Parse(format!("way {id} has no node list")))?;
        let node_ids: Vec<i64> = refs
            .iter()
            .map(|n| n.as_i64().ok_or_else(|| Error::Parse(format!("way {id} has a non-integer node ref"))))
            .collect::<Result<_>>()?;
        let coords: Option<Vec<Coord>> = node_ids.iter().map(|n| nodes.get(n).copied()).collect();
        let Some(coords) = coords else {
            tracing::warn!(way = id, "dropping way that references a missing node");
            continue;
        };
        if coords.len() < 2 {
            tracing::warn!(way = id, "dropping way with fewer than two nodes");
            continue;
        }
        let tags: BTreeMap<String, String> = el
            .get("tags")
            .and_then(Value::as_object)
            .map(|t| {
                t.iter()
                    .filter_map(|(k, v)| v.as_str().map(|s| (k.clone(), s.to_string())))
                    .collect()
            })
            .unwrap_or_default();
        let way = OsmWay { id, node_ids, coords, tags };
        if layer == OsmLayer::Building && !way.is_closed() {
            continue;
        }
        ways.push(way);
    }
    Ok(ways)
}
