//! Laying 2D road and power-line geometry onto the terrain surface.

use crate::error::{Error, Result};
use crate::geomath::{Coord, Crs};
use crate::raster::DemGrid;

pub const DEFAULT_SPACING: f64 = 10.0;
pub const DEFAULT_ROAD_OFFSET: f64 = 1.0;
pub const DEFAULT_POWER_OFFSET: f64 = 2.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PathKind {
    Road,
    Power,
}

/// A 2D line in Web Mercator meters.
#[derive(Debug, Clone, PartialEq)]
pub struct Polyline {
    pub coords: Vec<Coord>,
    pub kind: PathKind,
    pub way_id: Option<i64>,
    /// `highway=*` or `power=*` value, when known.
    pub class: Option<String>,
}

impl Polyline {
    /// Collapses repeated consecutive vertices; fails below two distinct vertices.
    pub fn new(mut coords: Vec<Coord>, kind: PathKind) -> Result<Self> {
        coords.dedup();
        if coords.len() < 2 {
            return Err(Error::DegenerateGeometry(format!(
                "polyline needs 2 distinct vertices, got {}",
                coords.len()
            )));
        }
        if coords.iter().any(|c| !c.x.is_finite() || !c.y.is_finite()) {
            return Err(Error::DegenerateGeometry("polyline has a non-finite vertex".into()));
        }
        Ok(Polyline { coords, kind, way_id: None, class: None })
    }

    pub fn with_way_id(mut self, id: i64) -> Self {
        self.way_id = Some(id);
        self
    }

    pub fn with_class(mut self, class: impl Into<String>) -> Self {
        self.class = Some(class.into());
        self
    }

    pub fn length(&self) -> f64 {
        self.coords.windows(2).map(|w| w[0].distance(w[1])).sum()
    }
}

/// Draped 3D geometry: disjoint runs of points, rendered with breaks between.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Path3D {
    pub segments: Vec<Vec<[f64; 3]>>,
}

impl Path3D {
    pub fn is_empty(&self) -> bool {
        self.segments.is_empty()
    }

    pub fn point_count(&self) -> usize {
        self.segments.iter().map(Vec::len).sum()
    }
}

/// Subdivides every edge into `ceil(len / spacing)` equal parts. Original
/// vertices are kept and order is preserved.
pub fn densify_polyline(p: &Polyline, spacing: f64) -> Result<Polyline> {
    if !(spacing > 0.0 && spacing.is_finite()) {
        return Err(Error::InvalidParameter(format!("spacing must be positive, got {spacing}")));
    }
    let mut coords = Vec::with_capacity(p.coords.len());
    coords.push(p.coords[0]);
    for w in p.coords.windows(2) {
        let (a, b) = (w[0], w[1]);
        let parts = (a.distance(b) / spacing).ceil().max(1.0) as usize;
        for k in 1..parts {
            coords.push(a.lerp(b, k as f64 / parts as f64));
        }
        coords.push(b);
    }
    Ok(Polyline { coords, ..p.clone() })
}

/// Densifies each polyline and lifts it onto the DEM.
///
/// `z = elevation + z_offset`. Samples on nodata or outside the grid are
/// dropped and break the run; runs shorter than two points are discarded,
/// so a polyline maps to zero or more segments, in input order.
pub fn drape_polylines(
    lines: &[Polyline],
    g: &DemGrid,
    spacing: f64,
    z_offset: f64,
) -> Result<Path3D> {
    if g.crs != Crs::WebMercator {
        return Err(Error::InvalidParameter(format!(
            "draping expects an EPSG:3857 grid, got EPSG:{}",
            g.crs.epsg()
        )));
    }
    let mut path = Path3D::default();
    for line in lines {
        let dense = densify_polyline(line, spacing)?;
        let mut run: Vec<[f64; 3]> = Vec::new();
        for c in &dense.coords {
            match g.sample_bilinear(c.x, c.y).value() {
                Some(z) => run.push([c.x, c.y, z + z_offset]),
                None => flush(&mut run, &mut path),
            }
        }
        flush(&mut run, &mut path);
    }
    Ok(path)
}

fn flush(run: &mut Vec<[f64; 3]>, path: &mut Path3D) {
    if run.len() >= 2 {
        path.segments.push(std::mem::take(run));
    } else {
        run.clear();
    }
}
