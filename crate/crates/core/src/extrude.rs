//! Building prisms: footprint triangulation, base seating, extrusion.

use crate::error::{Error, Result};
use crate::geomath::{cross, ring_metrics, Coord, Crs, Ring};
use crate::mesh::TriMesh;
use crate::raster::DemGrid;

pub const DEFAULT_BUILDING_HEIGHT: f64 = 8.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HeightSource {
    /// Taken from a height feature covering the footprint.
    Matched,
    /// No feature matched; the configured fallback was used.
    Default,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Building {
    /// Web Mercator, counter-clockwise.
    pub footprint: Ring,
    pub height: f64,
    pub base_z: f64,
    pub way_id: Option<i64>,
    pub height_source: HeightSource,
}

/// Cleans a raw footprint for extrusion: drops the closing vertex, repeated
/// vertices and collinear vertices, then checks simplicity and orients the
/// ring counter-clockwise.
pub fn normalize_footprint(ring: &Ring) -> Result<Ring> {
    let mut coords = Ring::new(ring.coords.clone(), ring.crs).coords;
    coords.dedup();
    if coords.len() > 1 && coords.first() == coords.last() {
        coords.pop();
    }
    loop {
        let n = coords.len();
        if n < 3 {
            return Err(Error::DegenerateGeometry(format!("footprint has {n} usable vertices")));
        }
        let straight = (0..n).find(|&i| {
            let (a, b, c) = (coords[(i + n - 1) % n], coords[i], coords[(i + 1) % n]);
            let scale = a.distance(b) * b.distance(c);
            cross(a, b, c).abs() <= 1e-12 * scale
        });
        match straight {
            Some(i) => {
                coords.remove(i);
            }
            None => break,
        }
    }
    let mut out = Ring { coords, crs: ring.crs };
    if !out.is_simple() {
        return Err(Error::DegenerateGeometry("footprint is self-intersecting".into()));
    }
    out.normalize_ccw()?;
    Ok(out)
}

/// Minimum bilinear elevation over the footprint's vertices. Vertices on
/// nodata are skipped.
pub fn footprint_base_elevation(r: &Ring, g: &DemGrid) -> Result<f64> {
    if r.crs != g.crs {
        return Err(Error::InvalidParameter(format!(
            "footprint is EPSG:{} but the DEM is EPSG:{}",
            r.crs.epsg(),
            g.crs.epsg()
        )));
    }
    r.coords
        .iter()
        .filter_map(|c| g.sample_bilinear(c.x, c.y).value())
        .reduce(f64::min)
        .ok_or(Error::NoElevation)
}

/// Ear-clipping triangulation of a simple polygon.
///
/// Returns exactly `n − 2` index triples into `r.coords`, each wound
/// counter-clockwise. A clockwise ring is accepted and triangulated as its
/// reverse.
pub fn triangulate_ring(r: &Ring) -> Result<Vec<[usize; 3]>> {
    let n = r.coords.len();
    if n < 3 {
        return Err(Error::Triangulation(format!("ring has {n} vertices")));
    }
    let metrics = ring_metrics(r).map_err(|e| Error::Triangulation(e.to_string()))?;
    if !r.is_simple() {
        return Err(Error::Triangulation("ring is self-intersecting".into()));
    }
    // Work relative to the first vertex; Mercator magnitudes cost precision.
    let o = r.coords[0];
    let pts: Vec<Coord> = r.coords.iter().map(|c| Coord::new(c.x - o.x, c.y - o.y)).collect();
    let mut remaining: Vec<usize> = (0..n).collect();
    if !metrics.is_ccw {
        remaining.reverse();
    }

    let mut tris = Vec::with_capacity(n - 2);
    while remaining.len() > 3 {
        let ear = find_ear(&pts, &remaining, true).or_else(|| find_ear(&pts, &remaining, false));
        let Some(k) = ear else {
            return Err(Error::Triangulation(format!(
                "no ear among {} remaining vertices",
                remaining.len()
            )));
        };
        let m = remaining.len();
        tris.push([remaining[(k + m - 1) % m], remaining[k], remaining[(k + 1) % m]]);
        remaining.remove(k);
    }
    tris.push([remaining[0], remaining[1], remaining[2]]);
    Ok(tris)
}

/// Position in `remaining` of a clippable ear. With `strict`, no other vertex
/// may touch the candidate triangle; otherwise boundary contact is allowed,
/// which rescues rings with leftover collinear runs.
fn find_ear(pts: &[Coord], remaining: &[usize], strict: bool) -> Option<usize> {
    let m = remaining.len();
    (0..m).find(|&k| {
        let (ia, ib, ic) = (remaining[(k + m - 1) % m], remaining[k], remaining[(k + 1) % m]);
        let (a, b, c) = (pts[ia], pts[ib], pts[ic]);
        if cross(a, b, c) <= 0.0 {
            return false;
        }
        !remaining.iter().any(|&j| {
            if j == ia || j == ib || j == ic {
                return false;
            }
            let p = pts[j];
            if p == a || p == b || p == c {
                return false;
            }
            let (d1, d2, d3) = (cross(a, b, p), cross(b, c, p), cross(c, a, p));
            if strict {
                d1 >= 0.0 && d2 >= 0.0 && d3 >= 0.0
            } else {
                d1 > 0.0 && d2 > 0.0 && d3 > 0.0
            }
        })
    })
}

/// Closed prism: `n` base vertices at `base_z`, `n` roof vertices at
/// `base_z + height`, a downward base, an upward roof and two triangles per
/// wall. All faces wind outward.
pub fn extrude_building(b: &Building) -> Result<TriMesh> {
    if !(b.height > 0.0 && b.height.is_finite()) {
        return Err(Error::InvalidParameter(format!("building height must be positive, got {}", b.height)));
    }
    if !b.base_z.is_finite() {
        return Err(Error::InvalidParameter("building base elevation is not finite".into()));
    }
    let mut ring = b.footprint.clone();
    ring.normalize_ccw()?;
    let cap = triangulate_ring(&ring)?;
    let n = ring.len();
    let roof_z = b.base_z + b.height;

    let mut mesh = TriMesh::default();
    for c in &ring.coords {
        mesh.push_vertex(c.x, c.y, b.base_z);
    }
    for c in &ring.coords {
        mesh.push_vertex(c.x, c.y, roof_z);
    }
    mesh.tris.reserve(2 * cap.len() + 2 * n);
    for &[p, q, r] in &cap {
        mesh.tris.push([p, r, q]);
    }
    for &[p, q, r] in &cap {
        mesh.tris.push([p + n, q + n, r + n]);
    }
    for i in 0..n {
        let j = (i + 1) % n;
        mesh.tris.push([i, j, j + n]);
        mesh.tris.push([i, j + n, i + n]);
    }
    Ok(mesh)
}

/// Convenience for tests and fixtures: a Mercator ring from raw pairs.
pub fn mercator_ring(pts: &[(f64, f64)]) -> Ring {
    Ring::new(pts.iter().map(|&(x, y)| Coord::new(x, y)).collect(), Crs::WebMercator)
}
