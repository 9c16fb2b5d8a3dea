//! WGS84 / spherical Web Mercator transforms and planar ring utilities.

use std::f64::consts::{FRAC_PI_2, PI};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Sphere radius used by EPSG:3857.
pub const EARTH_RADIUS: f64 = 6_378_137.0;

/// Half the Mercator world width, `π·R`.
pub const MERCATOR_HALF_EXTENT: f64 = PI * EARTH_RADIUS;

/// Latitudes beyond this are rejected rather than clamped.
pub const MAX_LATITUDE: f64 = 85.06;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Crs {
    /// Geographic lon/lat degrees (EPSG:4326).
    Wgs84,
    /// Spherical Web Mercator meters (EPSG:3857).
    WebMercator,
}

impl Crs {
    pub fn epsg(self) -> u32 {
        match self {
            Crs::Wgs84 => 4326,
            Crs::WebMercator => 3857,
        }
    }

    pub fn from_epsg(code: u32) -> Option<Self> {
        match code {
            4326 => Some(Crs::Wgs84),
            3857 => Some(Crs::WebMercator),
            _ => None,
        }
    }
}

/// A planar coordinate in whatever CRS its container is tagged with.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Coord {
    pub x: f64,
    pub y: f64,
}

impl Coord {
    pub const fn new(x: f64, y: f64) -> Self {
        Coord { x, y }
    }

    pub fn distance(self, other: Coord) -> f64 {
        (other.x - self.x).hypot(other.y - self.y)
    }

    pub fn lerp(self, other: Coord, t: f64) -> Coord {
        Coord::new(
            self.x + (other.x - self.x) * t,
            self.y + (other.y - self.y) * t,
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeoPoint {
    pub lon: f64,
    pub lat: f64,
}

impl GeoPoint {
    pub const fn new(lon: f64, lat: f64) -> Self {
        GeoPoint { lon, lat }
    }
}

impl From<GeoPoint> for Coord {
    fn from(p: GeoPoint) -> Coord {
        Coord::new(p.lon, p.lat)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MercatorPoint {
    pub x: f64,
    pub y: f64,
}

impl MercatorPoint {
    pub const fn new(x: f64, y: f64) -> Self {
        MercatorPoint { x, y }
    }
}

impl From<MercatorPoint> for Coord {
    fn from(p: MercatorPoint) -> Coord {
        Coord::new(p.x, p.y)
    }
}

/// Projects a WGS84 point onto spherical Web Mercator.
pub fn mercator_forward(p: GeoPoint) -> Result<MercatorPoint> {
    if !p.lon.is_finite() || !p.lat.is_finite() {
        return Err(Error::OutOfDomain(format!("non-finite point ({}, {})", p.lon, p.lat)));
    }
    if p.lon.abs() > 180.0 {
        return Err(Error::OutOfDomain(format!("longitude {} outside [-180, 180]", p.lon)));
    }
    if p.lat.abs() > MAX_LATITUDE {
        return Err(Error::OutOfDomain(format!(
            "latitude {} outside the Mercator band of ±{MAX_LATITUDE}",
            p.lat
        )));
    }
    let x = EARTH_RADIUS * p.lon.to_radians();
    let y = EARTH_RADIUS * p.lat.to_radians().tan().asinh();
    Ok(MercatorPoint::new(x, y))
}

/// Exact inverse of [`mercator_forward`].
pub fn mercator_inverse(p: MercatorPoint) -> Result<GeoPoint> {
    if !p.x.is_finite() || !p.y.is_finite() {
        return Err(Error::OutOfDomain(format!("non-finite point ({}, {})", p.x, p.y)));
    }
    // A hair of slack so that forward(±180°) comes back cleanly.
    let limit = MERCATOR_HALF_EXTENT * (1.0 + 1e-12);
    if p.x.abs() > limit || p.y.abs() > limit {
        return Err(Error::OutOfDomain(format!(
            "({}, {}) outside the Mercator extent ±{MERCATOR_HALF_EXTENT}",
            p.x, p.y
        )));
    }
    let lon = (p.x / EARTH_RADIUS).to_degrees();
    let lat = (2.0 * (p.y / EARTH_RADIUS).exp().atan() - FRAC_PI_2).to_degrees();
    Ok(GeoPoint::new(lon, lat))
}

/// Forward-projects a raw lon/lat coordinate.
pub fn project_coord(c: Coord) -> Result<Coord> {
    mercator_forward(GeoPoint::new(c.x, c.y)).map(Coord::from)
}

/// Axis-aligned box. `west < east` and `south < north` always hold.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BBox {
    pub west: f64,
    pub south: f64,
    pub east: f64,
    pub north: f64,
}

impl BBox {
    pub fn new(west: f64, south: f64, east: f64, north: f64) -> Result<Self> {
        let all_finite = [west, south, east, north].iter().all(|v| v.is_finite());
        if !all_finite || west >= east || south >= north {
            return Err(Error::DegenerateGeometry(format!(
                "bbox [{west}, {south}, {east}, {north}] has no area"
            )));
        }
        Ok(BBox { west, south, east, north })
    }

    /// Envelope of a coordinate set.
    pub fn envelope<I: IntoIterator<Item = Coord>>(coords: I) -> Result<Self> {
        let mut it = coords.into_iter();
        let first = it
            .next()
            .ok_or_else(|| Error::DegenerateGeometry("envelope of no points".into()))?;
        let (mut w, mut s, mut e, mut n) = (first.x, first.y, first.x, first.y);
        for c in it {
            w = w.min(c.x);
            e = e.max(c.x);
            s = s.min(c.y);
            n = n.max(c.y);
        }
        BBox::new(w, s, e, n)
    }

    pub fn width(&self) -> f64 {
        self.east - self.west
    }

    pub fn height(&self) -> f64 {
        self.north - self.south
    }

    pub fn center(&self) -> Coord {
        Coord::new((self.west + self.east) / 2.0, (self.south + self.north) / 2.0)
    }

    /// Projects a WGS84 box corner-wise. Mercator is monotone on both axes
    /// so the corners stay corners.
    pub fn to_mercator(&self) -> Result<BBox> {
        let sw = mercator_forward(GeoPoint::new(self.west, self.south))?;
        let ne = mercator_forward(GeoPoint::new(self.east, self.north))?;
        BBox::new(sw.x, sw.y, ne.x, ne.y)
    }

    /// Counter-clockwise ring tracing the box outline.
    pub fn to_ring(&self, crs: Crs) -> Ring {
        Ring {
            coords: vec![
                Coord::new(self.west, self.south),
                Coord::new(self.east, self.south),
                Coord::new(self.east, self.north),
                Coord::new(self.west, self.north),
            ],
            crs,
        }
    }
}

/// A closed polygon boundary. The first vertex is not repeated at the end.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Ring {
    pub coords: Vec<Coord>,
    pub crs: Crs,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RingMetrics {
    pub signed_area: f64,
    pub centroid: Coord,
    pub is_ccw: bool,
}

impl Ring {
    /// Builds a ring, dropping a repeated closing vertex if present.
    pub fn new(mut coords: Vec<Coord>, crs: Crs) -> Self {
        if coords.len() > 1 && coords.first() == coords.last() {
            coords.pop();
        }
        Ring { coords, crs }
    }

    pub fn len(&self) -> usize {
        self.coords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn edges(&self) -> impl Iterator<Item = (Coord, Coord)> + '_ {
        let n = self.coords.len();
        (0..n).map(move |i| (self.coords[i], self.coords[(i + 1) % n]))
    }

    pub fn metrics(&self) -> Result<RingMetrics> {
        ring_metrics(self)
    }

    pub fn envelope(&self) -> Result<BBox> {
        BBox::envelope(self.coords.iter().copied())
    }

    /// Reorders vertices counter-clockwise, keeping the first vertex.
    pub fn normalize_ccw(&mut self) -> Result<()> {
        if !ring_metrics(self)?.is_ccw {
            self.coords[1..].reverse();
        }
        Ok(())
    }

    /// Projects a WGS84 ring to Web Mercator. Mercator rings pass through.
    pub fn to_mercator(&self) -> Result<Ring> {
        match self.crs {
            Crs::WebMercator => Ok(self.clone()),
            Crs::Wgs84 => Ok(Ring {
                coords: self
                    .coords
                    .iter()
                    .map(|&c| project_coord(c))
                    .collect::<Result<_>>()?,
                crs: Crs::WebMercator,
            }),
        }
    }

    /// True when no two non-adjacent edges touch and no adjacent edges fold back.
    pub fn is_simple(&self) -> bool {
        let n = self.coords.len();
        if n < 3 {
            return false;
        }
        for i in 0..n {
            let (a, b) = (self.coords[i], self.coords[(i + 1) % n]);
            if a == b {
                return false;
            }
            for j in (i + 1)..n {
                let (c, d) = (self.coords[j], self.coords[(j + 1) % n]);
                let adjacent = j == i + 1 || (i == 0 && j == n - 1);
                if adjacent {
                    // Shared vertex only; reject overlap along a common line.
                    let shared = if j == i + 1 { b } else { a };
                    let (p, q) = if j == i + 1 { (a, d) } else { (b, c) };
                    if cross(shared, p, q) == 0.0 && dot(shared, p, q) > 0.0 {
                        return false;
                    }
                } else if segments_intersect(a, b, c, d) {
                    return false;
                }
            }
        }
        true
    }
}

/// `(b - a) × (c - a)`; positive when `a, b, c` turn left.
pub fn cross(a: Coord, b: Coord, c: Coord) -> f64 {
    (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x)
}

fn dot(o: Coord, p: Coord, q: Coord) -> f64 {
    (p.x - o.x) * (q.x - o.x) + (p.y - o.y) * (q.y - o.y)
}

fn on_segment(a: Coord, b: Coord, p: Coord) -> bool {
    p.x >= a.x.min(b.x) && p.x <= a.x.max(b.x) && p.y >= a.y.min(b.y) && p.y <= a.y.max(b.y)
}

/// Closed-segment intersection test, touching endpoints included.
pub fn segments_intersect(a: Coord, b: Coord, c: Coord, d: Coord) -> bool {
    let d1 = cross(c, d, a);
    let d2 = cross(c, d, b);
    let d3 = cross(a, b, c);
    let d4 = cross(a, b, d);
    if ((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0))
        && ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0))
    {
        return true;
    }
    (d1 == 0.0 && on_segment(c, d, a))
        || (d2 == 0.0 && on_segment(c, d, b))
        || (d3 == 0.0 && on_segment(a, b, c))
        || (d4 == 0.0 && on_segment(a, b, d))
}

/// Shoelace area, area-weighted centroid and orientation.
///
/// Coordinates are shifted to the first vertex before summing so that
/// Mercator-sized magnitudes do not swamp small footprints.
pub fn ring_metrics(r: &Ring) -> Result<RingMetrics> {
    let n = r.coords.len();
    if n < 3 {
        return Err(Error::DegenerateGeometry(format!("ring has {n} vertices, need at least 3")));
    }
    let o = r.coords[0];
    let (mut twice_area, mut cx, mut cy) = (0.0, 0.0, 0.0);
    for (a, b) in r.edges() {
        let (ax, ay) = (a.x - o.x, a.y - o.y);
        let (bx, by) = (b.x - o.x, b.y - o.y);
        let f = ax * by - bx * ay;
        twice_area += f;
        cx += (ax + bx) * f;
        cy += (ay + by) * f;
    }
    if twice_area == 0.0 || !twice_area.is_finite() {
        return Err(Error::DegenerateGeometry("ring has zero area".into()));
    }
    let signed_area = twice_area / 2.0;
    let centroid = Coord::new(o.x + cx / (3.0 * twice_area), o.y + cy / (3.0 * twice_area));
    Ok(RingMetrics { signed_area, centroid, is_ccw: signed_area > 0.0 })
}

/// Even-odd ray casting. Points exactly on the boundary may go either way.
pub fn point_in_ring(p: Coord, r: &Ring) -> bool {
    let mut inside = false;
    for (a, b) in r.edges() {
        if (a.y > p.y) != (b.y > p.y) {
            let x_at = a.x + (p.y - a.y) * (b.x - a.x) / (b.y - a.y);
            if p.x < x_at {
                inside = !inside;
            }
        }
    }
    inside
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};

    fn ring(pts: &[(f64, f64)]) -> Ring {
        Ring::new(pts.iter().map(|&(x, y)| Coord::new(x, y)).collect(), Crs::WebMercator)
    }

    #[test]
    fn origin_maps_to_origin() {
        let m = mercator_forward(GeoPoint::new(0.0, 0.0)).unwrap();
        assert_eq!((m.x, m.y), (0.0, 0.0));
        let g = mercator_inverse(MercatorPoint::new(0.0, 0.0)).unwrap();
        assert_eq!((g.lon, g.lat), (0.0, 0.0));
    }

    #[test]
    fn antimeridian_is_half_extent() {
        // π·6378137 evaluated with mpmath at 50 digits: 20037508.342789243...
        let m = mercator_forward(GeoPoint::new(180.0, 0.0)).unwrap();
        assert!((m.x - 20037508.342789244).abs() < 1e-6);
        assert_eq!(m.y, 0.0);
        let g = mercator_inverse(MercatorPoint::new(20037508.342789244, 0.0)).unwrap();
        assert!((g.lon - 180.0).abs() < 1e-9);
        assert_eq!(g.lat, 0.0);
    }

    #[test]
    fn oslo_matches_extended_precision() {
        // mpmath, 50 digits: R*radians(10.8), R*ln(tan(pi/4 + radians(59.93)/2))
        let m = mercator_forward(GeoPoint::new(10.8, 59.93)).unwrap();
        assert!((m.x - 1_202_250.500_567_354_6).abs() < 1e-6, "{}", m.x);
        assert!((m.y - 8_384_169.623_431_632).abs() < 1e-6, "{}", m.y);
    }

    #[test]
    fn rejects_polar_latitudes() {
        assert!(matches!(
            mercator_forward(GeoPoint::new(0.0, 85.1)),
            Err(Error::OutOfDomain(_))
        ));
        assert!(mercator_forward(GeoPoint::new(0.0, -85.06)).is_ok());
        assert!(mercator_inverse(MercatorPoint::new(0.0, 2.1e7)).is_err());
        assert!(mercator_forward(GeoPoint::new(f64::NAN, 0.0)).is_err());
    }

    #[test]
    fn unit_square_metrics() {
        let sq = ring(&[(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)]);
        let m = ring_metrics(&sq).unwrap();
        assert_eq!(m.signed_area, 1.0);
        assert_eq!(m.centroid, Coord::new(0.5, 0.5));
        assert!(m.is_ccw);

        let rev = ring(&[(0.0, 1.0), (1.0, 1.0), (1.0, 0.0), (0.0, 0.0)]);
        let m = ring_metrics(&rev).unwrap();
        assert_eq!(m.signed_area, -1.0);
        assert!(!m.is_ccw);
    }

    #[test]
    fn triangle_metrics() {
        // By hand: area = 4*3/2 = 6, centroid = vertex mean = (4/3, 1).
        let t = ring(&[(0.0, 0.0), (4.0, 0.0), (0.0, 3.0)]);
        let m = ring_metrics(&t).unwrap();
        assert_eq!(m.signed_area, 6.0);
        assert!((m.centroid.x - 4.0 / 3.0).abs() < 1e-12);
        assert!((m.centroid.y - 1.0).abs() < 1e-12);
    }

    #[test]
    fn degenerate_rings_error() {
        let line = ring(&[(0.0, 0.0), (1.0, 1.0), (2.0, 2.0)]);
        assert!(matches!(ring_metrics(&line), Err(Error::DegenerateGeometry(_))));
        let two = ring(&[(0.0, 0.0), (1.0, 1.0)]);
        assert!(ring_metrics(&two).is_err());
    }

    #[test]
    fn closing_vertex_is_dropped() {
        let r = ring(&[(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 0.0)]);
        assert_eq!(r.len(), 3);
    }

    #[test]
    fn normalize_ccw_flips_clockwise() {
        let mut r = ring(&[(0.0, 1.0), (1.0, 1.0), (1.0, 0.0), (0.0, 0.0)]);
        r.normalize_ccw().unwrap();
        assert!(ring_metrics(&r).unwrap().is_ccw);
        assert_eq!(r.coords[0], Coord::new(0.0, 1.0));
    }

    #[test]
    fn simplicity() {
        let sq = ring(&[(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)]);
        assert!(sq.is_simple());
        let bowtie = ring(&[(0.0, 0.0), (1.0, 1.0), (1.0, 0.0), (0.0, 1.0)]);
        assert!(!bowtie.is_simple());
        let spike = ring(&[(0.0, 0.0), (2.0, 0.0), (1.0, 0.0), (1.0, 1.0)]);
        assert!(!spike.is_simple());
    }

    #[test]
    fn point_in_unit_square() {
        let sq = ring(&[(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)]);
        assert!(point_in_ring(Coord::new(0.5, 0.5), &sq));
        assert!(!point_in_ring(Coord::new(2.0, 2.0), &sq));
    }

    /// Winding number by summing signed angles; independent of ray casting.
    fn winding_number(p: Coord, r: &Ring) -> i32 {
        let total: f64 = r
            .edges()
            .map(|(a, b)| {
                let (ax, ay) = (a.x - p.x, a.y - p.y);
                let (bx, by) = (b.x - p.x, b.y - p.y);
                (ax * by - ay * bx).atan2(ax * bx + ay * by)
            })
            .sum();
        (total / (2.0 * PI)).round() as i32
    }

    fn random_star_polygon(rng: &mut impl Rng, n: usize) -> Ring {
        let mut angles: Vec<f64> = (0..n).map(|_| rng.gen_range(0.0..2.0 * PI)).collect();
        angles.sort_by(f64::total_cmp);
        Ring::new(
            angles
                .iter()
                .map(|a| {
                    let rad = rng.gen_range(0.2..1.0);
                    Coord::new(rad * a.cos(), rad * a.sin())
                })
                .collect(),
            Crs::WebMercator,
        )
    }

    fn boundary_distance(p: Coord, r: &Ring) -> f64 {
        r.edges()
            .map(|(a, b)| {
                let (dx, dy) = (b.x - a.x, b.y - a.y);
                let t = (((p.x - a.x) * dx + (p.y - a.y) * dy) / (dx * dx + dy * dy)).clamp(0.0, 1.0);
                p.distance(Coord::new(a.x + t * dx, a.y + t * dy))
            })
            .fold(f64::INFINITY, f64::min)
    }

    #[test]
    fn ray_casting_agrees_with_winding_number() {
        let mut rng = rand::rngs::StdRng::seed_from_u64(7);
        for _ in 0..100 {
            let n = rng.gen_range(3..16);
            let r = random_star_polygon(&mut rng, n);
            for _ in 0..200 {
                let p = Coord::new(rng.gen_range(-1.2..1.2), rng.gen_range(-1.2..1.2));
                if boundary_distance(p, &r) < 1e-9 {
                    continue;
                }
                assert_eq!(point_in_ring(p, &r), winding_number(p, &r) != 0, "{p:?} vs {r:?}");
            }
        }
    }

    proptest! {
        #[test]
        fn round_trip(lon in -180.0f64..=180.0, lat in -85.0f64..=85.0) {
            let g = mercator_inverse(mercator_forward(GeoPoint::new(lon, lat)).unwrap()).unwrap();
            prop_assert!((g.lon - lon).abs() <= 1e-9);
            prop_assert!((g.lat - lat).abs() <= 1e-9);
        }

        #[test]
        fn forward_is_monotone(lon in -179.0f64..179.0, lat in -84.0f64..84.0, d in 1e-6f64..1.0) {
            let a = mercator_forward(GeoPoint::new(lon, lat)).unwrap();
            let b = mercator_forward(GeoPoint::new(lon + d, lat + d)).unwrap();
            prop_assert!(b.x > a.x);
            prop_assert!(b.y > a.y);
        }

        #[test]
        fn area_invariant_under_rotation(seed in any::<u64>(), shift in 0usize..16) {
            let mut rng = rand::rngs::StdRng::seed_from_u64(seed);
            let r = random_star_polygon(&mut rng, 8);
            let a = ring_metrics(&r).unwrap().signed_area;
            let mut rotated = r.clone();
            rotated.coords.rotate_left(shift % 8);
            let b = ring_metrics(&rotated).unwrap().signed_area;
            prop_assert!((a - b).abs() <= 1e-12 * a.abs().max(1.0));
            let mut reversed = r.clone();
            reversed.coords.reverse();
            let c = ring_metrics(&reversed).unwrap().signed_area;
            prop_assert!((a + c).abs() <= 1e-12 * a.abs().max(1.0));
        }
    }
}
