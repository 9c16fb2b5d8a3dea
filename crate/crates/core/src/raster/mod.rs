//! Single-band elevation rasters: parsing, reprojection and bilinear sampling.

mod ascii;
mod geotiff;
mod reproject;

pub use ascii::{parse_ascii_grid, write_ascii_grid};
pub use geotiff::parse_geotiff;
pub use reproject::{mercator_grid_shape, reproject_to_mercator, Resolution};

use crate::error::{Error, Result};
use crate::geomath::{BBox, Coord, Crs};

/// Sentinel used when a grid needs a nodata value and none was supplied.
pub const DEFAULT_NODATA: f64 = -9999.0;

/// A georeferenced, north-up elevation grid.
///
/// `origin_x`/`origin_y` is the outer top-left corner of pixel (0, 0). Rows
/// advance southward, so the center of `(row, col)` sits at
/// `(origin_x + (col + 0.5)·pixel_w, origin_y − (row + 0.5)·pixel_h)`.
#[derive(Debug, Clone, PartialEq)]
pub struct DemGrid {
    pub crs: Crs,
    pub origin_x: f64,
    pub origin_y: f64,
    pub pixel_w: f64,
    pub pixel_h: f64,
    pub width: usize,
    pub height: usize,
    pub nodata: Option<f64>,
    values: Vec<f64>,
}

/// Outcome of sampling a grid. Nodata is a value, not an error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ElevationSample {
    Value(f64),
    NoData,
}

impl ElevationSample {
    pub fn value(self) -> Option<f64> {
        match self {
            ElevationSample::Value(v) => Some(v),
            ElevationSample::NoData => None,
        }
    }

    pub fn is_nodata(self) -> bool {
        matches!(self, ElevationSample::NoData)
    }
}

impl DemGrid {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        crs: Crs,
        origin_x: f64,
        origin_y: f64,
        pixel_w: f64,
        pixel_h: f64,
        width: usize,
        height: usize,
        nodata: Option<f64>,
        values: Vec<f64>,
    ) -> Result<Self> {
        if !(pixel_w > 0.0 && pixel_h > 0.0 && pixel_w.is_finite() && pixel_h.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "pixel size must be positive, got {pixel_w} x {pixel_h}"
            )));
        }
        if !origin_x.is_finite() || !origin_y.is_finite() {
            return Err(Error::InvalidParameter("grid origin must be finite".into()));
        }
        if width == 0 || height == 0 {
            return Err(Error::EmptyRaster(format!("{width} x {height} grid")));
        }
        if width * height != values.len() {
            return Err(Error::InvalidParameter(format!(
                "{width} x {height} grid needs {} values, got {}",
                width * height,
                values.len()
            )));
        }
        Ok(DemGrid { crs, origin_x, origin_y, pixel_w, pixel_h, width, height, nodata, values })
    }

    /// Row-major samples, nodata sentinels included.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn is_nodata_value(&self, v: f64) -> bool {
        v.is_nan() || self.nodata == Some(v)
    }

    /// The raw sample at `(row, col)`, `None` when it is nodata.
    pub fn get(&self, row: usize, col: usize) -> Option<f64> {
        let v = self.values[row * self.width + col];
        (!self.is_nodata_value(v)).then_some(v)
    }

    pub fn pixel_center(&self, row: usize, col: usize) -> Coord {
        Coord::new(
            self.origin_x + (col as f64 + 0.5) * self.pixel_w,
            self.origin_y - (row as f64 + 0.5) * self.pixel_h,
        )
    }

    /// Outer extent of the grid in its own CRS.
    pub fn bounds(&self) -> BBox {
        BBox {
            west: self.origin_x,
            south: self.origin_y - self.height as f64 * self.pixel_h,
            east: self.origin_x + self.width as f64 * self.pixel_w,
            north: self.origin_y,
        }
    }

    pub fn valid_count(&self) -> usize {
        self.values.iter().filter(|&&v| !self.is_nodata_value(v)).count()
    }

    /// Bilinear blend of the surrounding pixel centers.
    ///
    /// Queries outside the hull of pixel centers give [`ElevationSample::NoData`],
    /// as does any query with a nodata pixel among its contributors. A
    /// contributor is a neighbor with nonzero weight, so a query exactly on a
    /// pixel center returns that pixel regardless of its neighbors.
    pub fn sample_bilinear(&self, x: f64, y: f64) -> ElevationSample {
        let Some((rows, cols)) = self.neighborhood(x, y) else {
            return ElevationSample::NoData;
        };
        let fetch = |r: (usize, f64), c: (usize, f64)| -> Option<f64> {
            if r.1 == 0.0 || c.1 == 0.0 {
                // Zero weight: never read, never poisons the result.
                return Some(0.0);
            }
            self.get(r.0, c.0)
        };
        let mut blended = [0.0; 2];
        for (slot, &r) in rows.iter().enumerate() {
            let (Some(left), Some(right)) = (fetch(r, cols[0]), fetch(r, cols[1])) else {
                return ElevationSample::NoData;
            };
            blended[slot] = lerp(left, right, cols[1].1);
        }
        ElevationSample::Value(lerp(blended[0], blended[1], rows[1].1))
    }

    /// The up-to-four pixels a bilinear query at `(x, y)` would read, with
    /// `(index, weight)` per axis. `None` outside the pixel-center hull.
    #[allow(clippy::type_complexity)]
    fn neighborhood(&self, x: f64, y: f64) -> Option<([(usize, f64); 2], [(usize, f64); 2])> {
        let col = (x - self.origin_x) / self.pixel_w - 0.5;
        let row = (self.origin_y - y) / self.pixel_h - 0.5;
        let axis = |t: f64, n: usize| -> Option<[(usize, f64); 2]> {
            if !t.is_finite() || t < 0.0 || t > (n - 1) as f64 {
                return None;
            }
            if n == 1 {
                return Some([(0, 1.0), (0, 0.0)]);
            }
            let i0 = (t.floor() as usize).min(n - 2);
            let f = t - i0 as f64;
            Some([(i0, 1.0 - f), (i0 + 1, f)])
        };
        Some((axis(row, self.height)?, axis(col, self.width)?))
    }

    /// Valid values among the pixels a query at `(x, y)` draws on.
    pub fn neighborhood_values(&self, x: f64, y: f64) -> Vec<f64> {
        let Some((rows, cols)) = self.neighborhood(x, y) else {
            return Vec::new();
        };
        let mut out = Vec::with_capacity(4);
        for &(r, wr) in &rows {
            for &(c, wc) in &cols {
                if wr > 0.0 && wc > 0.0 {
                    if let Some(v) = self.get(r, c) {
                        out.push(v);
                    }
                }
            }
        }
        out
    }
}

/// Linear blend that returns the endpoints exactly at `t = 0` and `t = 1`.
fn lerp(a: f64, b: f64, t: f64) -> f64 {
    if t == 0.0 {
        a
    } else if t == 1.0 {
        b
    } else {
        a + (b - a) * t
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn grid(w: usize, h: usize, values: Vec<f64>) -> DemGrid {
        DemGrid::new(Crs::WebMercator, 0.0, h as f64, 1.0, 1.0, w, h, Some(-9999.0), values).unwrap()
    }

    #[test]
    fn rejects_bad_shapes() {
        assert!(DemGrid::new(Crs::Wgs84, 0.0, 0.0, 1.0, 1.0, 2, 2, None, vec![0.0; 3]).is_err());
        assert!(DemGrid::new(Crs::Wgs84, 0.0, 0.0, 0.0, 1.0, 1, 1, None, vec![0.0]).is_err());
        assert!(DemGrid::new(Crs::Wgs84, 0.0, 0.0, 1.0, 1.0, 0, 0, None, vec![]).is_err());
    }

    #[test]
    fn pixel_center_exact() {
        let g = grid(3, 2, vec![1.0, 2.0, 3.0, 4.0, 5.0, 6.0]);
        for row in 0..2 {
            for col in 0..3 {
                let c = g.pixel_center(row, col);
                assert_eq!(
                    g.sample_bilinear(c.x, c.y),
                    ElevationSample::Value(g.get(row, col).unwrap())
                );
            }
        }
    }

    #[test]
    fn center_of_four() {
        let g = grid(2, 2, vec![0.0, 10.0, 10.0, 20.0]);
        assert_eq!(g.sample_bilinear(1.0, 1.0), ElevationSample::Value(10.0));
    }

    #[test]
    fn outside_hull_is_nodata() {
        let g = grid(2, 2, vec![0.0, 10.0, 10.0, 20.0]);
        assert!(g.sample_bilinear(0.4, 1.0).is_nodata());
        assert!(g.sample_bilinear(1.0, 1.6).is_nodata());
        assert!(g.sample_bilinear(f64::NAN, 1.0).is_nodata());
    }

    #[test]
    fn nodata_contributor_propagates() {
        let g = grid(3, 1, vec![1.0, -9999.0, 3.0]);
        assert!(g.sample_bilinear(1.2, 0.5).is_nodata());
        assert!(g.sample_bilinear(2.3, 0.5).is_nodata());
        // Exactly on a valid center the nodata neighbor carries no weight.
        assert_eq!(g.sample_bilinear(0.5, 0.5), ElevationSample::Value(1.0));
        assert_eq!(g.sample_bilinear(2.5, 0.5), ElevationSample::Value(3.0));
    }

    #[test]
    fn nan_counts_as_nodata() {
        let g = DemGrid::new(Crs::WebMercator, 0.0, 1.0, 1.0, 1.0, 2, 1, None, vec![f64::NAN, 1.0])
            .unwrap();
        assert_eq!(g.valid_count(), 1);
        assert!(g.sample_bilinear(1.0, 0.5).is_nodata());
    }

    #[test]
    fn single_pixel_grid() {
        let g = grid(1, 1, vec![7.0]);
        assert_eq!(g.sample_bilinear(0.5, 0.5), ElevationSample::Value(7.0));
        assert!(g.sample_bilinear(0.6, 0.5).is_nodata());
    }

    fn plane_grid(a: f64, b: f64, c: f64) -> DemGrid {
        let (w, h) = (6, 5);
        let (ox, oy, pw, ph) = (100.0, 500.0, 30.0, 20.0);
        let mut values = Vec::new();
        for row in 0..h {
            for col in 0..w {
                let x = ox + (col as f64 + 0.5) * pw;
                let y = oy - (row as f64 + 0.5) * ph;
                values.push(a * x + b * y + c);
            }
        }
        DemGrid::new(Crs::WebMercator, ox, oy, pw, ph, w, h, None, values).unwrap()
    }

    proptest! {
        #[test]
        fn exact_on_planes(a in -1.0f64..1.0, b in -1.0f64..1.0, c in -100.0f64..100.0,
                           u in 0.0f64..=1.0, v in 0.0f64..=1.0) {
            let g = plane_grid(a, b, c);
            let x = 115.0 + u * 150.0;
            let y = 490.0 - v * 80.0;
            let z = g.sample_bilinear(x, y).value().unwrap();
            prop_assert!((z - (a * x + b * y + c)).abs() <= 1e-9);
        }

        #[test]
        fn bounded_by_neighbors(vals in proptest::collection::vec(-50.0f64..50.0, 16),
                                x in 0.5f64..3.5, y in 0.5f64..3.5) {
            let g = grid(4, 4, vals);
            let z = g.sample_bilinear(x, y).value().unwrap();
            let nb = g.neighborhood_values(x, y);
            let lo = nb.iter().copied().fold(f64::INFINITY, f64::min);
            let hi = nb.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            prop_assert!(z >= lo - 1e-12 && z <= hi + 1e-12);
        }

        #[test]
        fn nodata_in_neighborhood_gives_nodata(hole in 0usize..16, x in 0.51f64..3.49, y in 0.51f64..3.49) {
            let mut vals: Vec<f64> = (0..16).map(|i| i as f64).collect();
            vals[hole] = -9999.0;
            let g = grid(4, 4, vals);
            let (hr, hc) = (hole / 4, hole % 4);
            let col = x - 0.5;
            let row = (4.0 - y) - 0.5;
            let touches = (hc as f64 - col).abs() < 1.0 && (hr as f64 - row).abs() < 1.0;
            prop_assert_eq!(g.sample_bilinear(x, y).is_nodata(), touches);
        }
    }
}
