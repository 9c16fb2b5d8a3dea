//! Builds 3D urban scenes from open geodata: a terrain mesh from a DEM,
//! road and power-line paths draped onto it, and buildings extruded from
//! their footprints. The result is a figure document (`mesh3d` and
//! `scatter3d` traces) serialized to JSON.

pub mod drape;
pub mod error;
pub mod extrude;
pub mod geomath;
pub mod mesh;
pub mod pipeline;
pub mod raster;
pub mod scene;
pub mod sources;
pub mod terrain;

pub use error::{Error, Result};
