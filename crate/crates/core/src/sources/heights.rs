use crate::error::Result;
use crate::extrude::{Building, HeightSource};
use crate::geomath::{point_in_ring, ring_metrics, BBox, Coord, Ring};

/// A polygon carrying a building height, e.g. from an Overture-style dataset.
#[derive(Debug, Clone, PartialEq)]
pub struct HeightFeature {
    pub ring: Ring,
    pub height: f64,
}

impl HeightFeature {
    pub fn to_mercator(&self) -> Result<HeightFeature> {
        Ok(HeightFeature { ring: self.ring.to_mercator()?, height: self.height })
    }
}

fn representative_point(r: &Ring) -> Coord {
    match ring_metrics(r) {
        Ok(m) => m.centroid,
        Err(_) => {
            let n = r.len().max(1) as f64;
            let (sx, sy) = r.coords.iter().fold((0.0, 0.0), |(x, y), c| (x + c.x, y + c.y));
            Coord::new(sx / n, sy / n)
        }
    }
}

/// Gives every footprint a height.
///
/// A footprint takes the height of the feature containing its centroid.
/// When several contain it, the feature whose own centroid is nearest wins
/// (first one on ties). Otherwise `default_height` is used. Footprints and
/// features must share a CRS. `base_z` is left at zero for the caller.
pub fn assign_heights(footprints: &[Ring], features: &[HeightFeature], default_height: f64) -> Vec<Building> {
    let prepared: Vec<(Option<BBox>, Coord)> = features
        .iter()
        .map(|f| (f.ring.envelope().ok(), representative_point(&f.ring)))
        .collect();

    footprints
        .iter()
        .map(|ring| {
            let c = representative_point(ring);
            let best = features
                .iter()
                .zip(&prepared)
                .filter(|(_, (env, _))| {
                    env.is_some_and(|e| c.x >= e.west && c.x <= e.east && c.y >= e.south && c.y <= e.north)
                })
                .filter(|(f, _)| point_in_ring(c, &f.ring))
                .map(|(f, (_, fc))| (f, c.distance(*fc)))
                .fold(None, |best: Option<(&HeightFeature, f64)>, cand| match best {
                    Some(b) if b.1 <= cand.1 => Some(b),
                    _ => Some(cand),
                });
            let (height, height_source) = match best {
                Some((f, _)) => (f.height, HeightSource::Matched),
                None => (default_height, HeightSource::Default),
            };
            Building { footprint: ring.clone(), height, base_z: 0.0, way_id: None, height_source }
        })
        .collect()
}
