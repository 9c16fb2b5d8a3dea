//! Per-pixel terrain meshing of a Mercator DEM.

use crate::error::{Error, Result};
use crate::geomath::Crs;
use crate::mesh::TriMesh;
use crate::raster::DemGrid;

/// One vertex per valid pixel center, two triangles per 2×2 block of valid
/// pixels.
///
/// Vertices are emitted row-major. Each quad is split along its top-left to
/// bottom-right diagonal and both triangles wind counter-clockwise seen from
/// above. Quads touching a nodata pixel produce no faces.
pub fn build_terrain_mesh(g: &DemGrid) -> Result<TriMesh> {
    if g.crs != Crs::WebMercator {
        return Err(Error::InvalidParameter(format!(
            "terrain meshing expects an EPSG:3857 grid, got EPSG:{}",
            g.crs.epsg()
        )));
    }
    let mut mesh = TriMesh::default();
    let mut index = vec![usize::MAX; g.width * g.height];
    for row in 0..g.height {
        for col in 0..g.width {
            if let Some(z) = g.get(row, col) {
                let c = g.pixel_center(row, col);
                index[row * g.width + col] = mesh.push_vertex(c.x, c.y, z);
            }
        }
    }
    if mesh.is_empty() {
        return Err(Error::EmptyMesh("DEM has no valid pixels".into()));
    }

    for row in 0..g.height.saturating_sub(1) {
        for col in 0..g.width - 1 {
            let tl = index[row * g.width + col];
            let tr = index[row * g.width + col + 1];
            let bl = index[(row + 1) * g.width + col];
            let br = index[(row + 1) * g.width + col + 1];
            if [tl, tr, bl, br].contains(&usize::MAX) {
                continue;
            }
            mesh.tris.push([tl, bl, br]);
            mesh.tris.push([tl, br, tr]);
        }
    }
    Ok(mesh)
}
