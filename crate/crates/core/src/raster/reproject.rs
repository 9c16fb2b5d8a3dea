use super::{DemGrid, DEFAULT_NODATA};
use crate::error::{Error, Result};
use crate::geomath::{mercator_inverse, BBox, Crs, MercatorPoint, EARTH_RADIUS, MAX_LATITUDE};

/// Output pixel size for [`reproject_to_mercator`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Resolution {
    /// Keep roughly one output pixel per source pixel: the source cell's
    /// angular size converted to Mercator meters at the center latitude.
    Auto,
    /// Square pixels of this many Mercator meters.
    Meters(f64),
}

/// Extent and pixel layout of the Mercator grid that would cover `src`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridShape {
    pub extent: BBox,
    pub pixel_w: f64,
    pub pixel_h: f64,
    pub width: usize,
    pub height: usize,
}

impl GridShape {
    pub fn pixels(&self) -> u64 {
        self.width as u64 * self.height as u64
    }
}

/// Computes the output layout without resampling anything, so callers can
/// reject oversized requests up front.
pub fn mercator_grid_shape(src: &DemGrid, resolution: Resolution) -> Result<GridShape> {
    if src.crs != Crs::Wgs84 {
        return Err(Error::InvalidParameter(format!(
            "reprojection expects an EPSG:4326 grid, got EPSG:{}",
            src.crs.epsg()
        )));
    }
    let b = src.bounds();
    let west = b.west.max(-180.0);
    let east = b.east.min(180.0);
    let south = b.south.max(-MAX_LATITUDE);
    let north = b.north.min(MAX_LATITUDE);
    if west >= east || south >= north {
        return Err(Error::EmptyRaster(format!(
            "grid [{}, {}, {}, {}] does not overlap the Mercator domain",
            b.west, b.south, b.east, b.north
        )));
    }
    let extent = BBox::new(west, south, east, north)?.to_mercator()?;

    let (pixel_w, pixel_h) = match resolution {
        Resolution::Meters(m) if m > 0.0 && m.is_finite() => (m, m),
        Resolution::Meters(m) => {
            return Err(Error::InvalidParameter(format!("resolution must be positive, got {m}")))
        }
        Resolution::Auto => {
            let center_lat = ((south + north) / 2.0).to_radians();
            let w = EARTH_RADIUS * src.pixel_w.to_radians();
            let h = EARTH_RADIUS * src.pixel_h.to_radians() / center_lat.cos();
            (w, h)
        }
    };
    // Tolerate float noise when the extent is an exact multiple of the pixel.
    let count = |span: f64, px: f64| ((span / px) - 1e-9).ceil().max(1.0) as usize;
    Ok(GridShape {
        extent,
        pixel_w,
        pixel_h,
        width: count(extent.width(), pixel_w),
        height: count(extent.height(), pixel_h),
    })
}

/// Resamples an EPSG:4326 grid onto a Web Mercator grid.
///
/// Each output pixel center is inverse-projected and filled by bilinear
/// interpolation over the source pixel centers. Output pixels whose
/// neighborhood touches nodata, or that fall outside the source, are nodata.
pub fn reproject_to_mercator(src: &DemGrid, resolution: Resolution) -> Result<DemGrid> {
    let shape = mercator_grid_shape(src, resolution)?;
    let nodata = src.nodata.unwrap_or(DEFAULT_NODATA);
    let origin_x = shape.extent.west;
    let origin_y = shape.extent.north;

    // Longitude depends only on the column and latitude only on the row.
    let lons: Vec<f64> = (0..shape.width)
        .map(|col| {
            let x = origin_x + (col as f64 + 0.5) * shape.pixel_w;
            (x / EARTH_RADIUS).to_degrees()
        })
        .collect();
    let lats: Vec<Option<f64>> = (0..shape.height)
        .map(|row| {
            let y = origin_y - (row as f64 + 0.5) * shape.pixel_h;
            mercator_inverse(MercatorPoint::new(0.0, y)).ok().map(|g| g.lat)
        })
        .collect();

    let mut values = Vec::with_capacity(shape.width * shape.height);
    for lat in &lats {
        for &lon in &lons {
            let v = lat.and_then(|lat| src.sample_bilinear(lon, lat).value());
            values.push(v.unwrap_or(nodata));
        }
    }
    DemGrid::new(
        Crs::WebMercator,
        origin_x,
        origin_y,
        shape.pixel_w,
        shape.pixel_h,
        shape.width,
        shape.height,
        Some(nodata),
        values,
    )
}
