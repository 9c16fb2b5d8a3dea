//! The shared scene pipeline used by both the HTTP service and the CLI.
//!
//! Inputs are already-fetched data in their native CRS (DEM grid, OSM ways
//! in lon/lat, height polygons); output is the finished figure document.

use crate::drape::{drape_polylines, PathKind, Path3D, Polyline, DEFAULT_POWER_OFFSET, DEFAULT_ROAD_OFFSET, DEFAULT_SPACING};
use crate::error::{Error, Result};
use crate::extrude::{extrude_building, footprint_base_elevation, normalize_footprint, DEFAULT_BUILDING_HEIGHT};
use crate::geomath::{project_coord, Crs, Ring};
use crate::mesh::TriMesh;
use crate::raster::{mercator_grid_shape, reproject_to_mercator, DemGrid, Resolution};
use crate::scene::{assemble_figure, serialize_figure, FigureDoc, SceneStyle};
use crate::sources::{assign_heights, HeightFeature, OsmWay};
use crate::terrain::build_terrain_mesh;

pub const DEFAULT_PIXEL_BUDGET: u64 = 4_000_000;

#[derive(Debug, Clone, PartialEq)]
pub struct PipelineOptions {
    pub spacing: f64,
    pub road_offset: f64,
    pub power_offset: f64,
    pub default_height: f64,
    pub resolution: Resolution,
    /// Largest Mercator DEM, in pixels, the pipeline will build.
    pub pixel_budget: u64,
}

impl Default for PipelineOptions {
    fn default() -> Self {
        PipelineOptions {
            spacing: DEFAULT_SPACING,
            road_offset: DEFAULT_ROAD_OFFSET,
            power_offset: DEFAULT_POWER_OFFSET,
            default_height: DEFAULT_BUILDING_HEIGHT,
            resolution: Resolution::Auto,
            pixel_budget: DEFAULT_PIXEL_BUDGET,
        }
    }
}

impl PipelineOptions {
    pub fn validate(&self) -> Result<()> {
        let positive = |name: &str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(Error::InvalidParameter(format!("{name} must be positive, got {v}")))
            }
        };
        positive("spacing", self.spacing)?;
        positive("road offset", self.road_offset)?;
        positive("power offset", self.power_offset)?;
        positive("default height", self.default_height)?;
        if let Resolution::Meters(m) = self.resolution {
            positive("resolution", m)?;
        }
        if self.pixel_budget == 0 {
            return Err(Error::InvalidParameter("pixel budget must be positive".into()));
        }
        Ok(())
    }

    /// Stable text form of every option that affects output, for cache keys.
    pub fn fingerprint(&self) -> String {
        let res = match self.resolution {
            Resolution::Auto => "auto".to_string(),
            Resolution::Meters(m) => m.to_string(),
        };
        format!(
            "spacing={};road={};power={};height={};res={};budget={}",
            self.spacing, self.road_offset, self.power_offset, self.default_height, res, self.pixel_budget
        )
    }
}

#[derive(Debug, Clone)]
pub struct SceneInputs {
    pub title: String,
    /// EPSG:4326 (reprojected here) or EPSG:3857 (used as is).
    pub dem: DemGrid,
    pub roads: Vec<OsmWay>,
    pub power: Vec<OsmWay>,
    pub buildings: Vec<OsmWay>,
    pub heights: Vec<HeightFeature>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SceneSummary {
    pub vertices: usize,
    pub triangles: usize,
    pub traces: usize,
    pub road_points: usize,
    pub power_points: usize,
    pub buildings: usize,
    pub buildings_dropped: usize,
}

impl std::fmt::Display for SceneSummary {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "{} vertices, {} triangles, {} traces ({} buildings, {} dropped; {} road / {} power points)",
            self.vertices,
            self.triangles,
            self.traces,
            self.buildings,
            self.buildings_dropped,
            self.road_points,
            self.power_points
        )
    }
}

/// Brings the DEM into Web Mercator, refusing grids over the pixel budget.
pub fn prepare_dem(dem: &DemGrid, opts: &PipelineOptions) -> Result<DemGrid> {
    match dem.crs {
        Crs::WebMercator => {
            let pixels = (dem.width * dem.height) as u64;
            if pixels > opts.pixel_budget {
                return Err(Error::TooLarge { pixels, budget: opts.pixel_budget });
            }
            Ok(dem.clone())
        }
        Crs::Wgs84 => {
            let shape = mercator_grid_shape(dem, opts.resolution)?;
            if shape.pixels() > opts.pixel_budget {
                return Err(Error::TooLarge { pixels: shape.pixels(), budget: opts.pixel_budget });
            }
            reproject_to_mercator(dem, opts.resolution)
        }
    }
}

fn project_ways(ways: &[OsmWay], kind: PathKind) -> Vec<Polyline> {
    ways.iter()
        .filter_map(|w| {
            let coords = match w.coords.iter().map(|&c| project_coord(c)).collect::<Result<Vec<_>>>() {
                Ok(c) => c,
                Err(e) => {
                    tracing::warn!(way = w.id, error = %e, "skipping way outside the Mercator domain");
                    return None;
                }
            };
            let class = match kind {
                PathKind::Road => w.tag("highway"),
                PathKind::Power => w.tag("power"),
            };
            let line = Polyline::new(coords, kind).ok()?.with_way_id(w.id);
            Some(match class {
                Some(c) => line.with_class(c),
                None => line,
            })
        })
        .collect()
}

fn building_meshes(
    ways: &[OsmWay],
    heights: &[HeightFeature],
    dem: &DemGrid,
    opts: &PipelineOptions,
) -> Result<(Vec<TriMesh>, usize)> {
    let mut dropped = 0;
    let mut footprints = Vec::new();
    let mut ids = Vec::new();
    for w in ways {
        let footprint = Ring::new(w.coords.clone(), Crs::Wgs84)
            .to_mercator()
            .and_then(|r| normalize_footprint(&r));
        match footprint {
            Ok(r) => {
                footprints.push(r);
                ids.push(w.id);
            }
            Err(e) => {
                tracing::warn!(way = w.id, error = %e, "dropping building footprint");
                dropped += 1;
            }
        }
    }
    let features: Vec<HeightFeature> = heights
        .iter()
        .filter_map(|f| match f.ring.crs {
            Crs::WebMercator => Some(f.clone()),
            Crs::Wgs84 => f.to_mercator().ok(),
        })
        .collect();

    let mut meshes = Vec::with_capacity(footprints.len());
    for (mut b, id) in assign_heights(&footprints, &features, opts.default_height).into_iter().zip(ids) {
        b.way_id = Some(id);
        let mesh = footprint_base_elevation(&b.footprint, dem).and_then(|z| {
            b.base_z = z;
            extrude_building(&b)
        });
        match mesh {
            Ok(m) => meshes.push(m),
            Err(e) => {
                tracing::warn!(way = id, error = %e, "dropping building");
                dropped += 1;
            }
        }
    }
    Ok((meshes, dropped))
}

/// Runs terrain meshing, draping and extrusion, and assembles the figure.
pub fn build_figure(inputs: &SceneInputs, opts: &PipelineOptions) -> Result<(FigureDoc, SceneSummary)> {
    opts.validate()?;
    let dem = prepare_dem(&inputs.dem, opts)?;
    let terrain = build_terrain_mesh(&dem)?;

    let roads = project_ways(&inputs.roads, PathKind::Road);
    let power = project_ways(&inputs.power, PathKind::Power);
    let road_path: Path3D = drape_polylines(&roads, &dem, opts.spacing, opts.road_offset)?;
    let power_path: Path3D = drape_polylines(&power, &dem, opts.spacing, opts.power_offset)?;
    let (buildings, dropped) = building_meshes(&inputs.buildings, &inputs.heights, &dem, opts)?;

    let style = SceneStyle { title: inputs.title.clone(), ..SceneStyle::default() };
    let figure = assemble_figure(&terrain, &road_path, &power_path, &buildings, &style)?;
    let meshes = std::iter::once(&terrain).chain(&buildings);
    let summary = SceneSummary {
        vertices: meshes.clone().map(TriMesh::vertex_count).sum(),
        triangles: meshes.map(TriMesh::triangle_count).sum(),
        traces: figure.data.len(),
        road_points: road_path.point_count(),
        power_points: power_path.point_count(),
        buildings: buildings.len(),
        buildings_dropped: dropped,
    };
    Ok((figure, summary))
}

/// [`build_figure`] followed by serialization.
pub fn render_scene_json(inputs: &SceneInputs, opts: &PipelineOptions) -> Result<(String, SceneSummary)> {
    let (figure, summary) = build_figure(inputs, opts)?;
    Ok((serialize_figure(&figure)?, summary))
}
