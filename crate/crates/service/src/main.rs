use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use urbanscene_core::geomath::Crs;
use urbanscene_core::pipeline::{render_scene_json, PipelineOptions, SceneInputs, DEFAULT_PIXEL_BUDGET};
use urbanscene_core::raster::Resolution;
use urbanscene_core::sources::OsmLayer;
use urbanscene_service::inputs::{load_dem, load_heights, load_ways};
use urbanscene_service::Config;

#[derive(Parser)]
#[command(name = "urbanscene", version, about = "3D urban scenes from open geodata")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build a figure JSON from local files.
    Generate(GenerateArgs),
    /// Run the HTTP service.
    Serve {
        /// TOML configuration file.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Listen address, overriding the config file.
        #[arg(long)]
        listen: Option<String>,
    },
}

#[derive(Args)]
struct GenerateArgs {
    /// DEM as GeoTIFF or ESRI ASCII grid.
    #[arg(long)]
    dem: PathBuf,
    /// EPSG code of an ASCII grid DEM (4326 or 3857).
    #[arg(long, default_value_t = 4326, value_parser = parse_crs)]
    dem_crs: u32,
    /// Roads as Overpass JSON or GeoJSON.
    #[arg(long)]
    roads: Option<PathBuf>,
    /// Power lines as Overpass JSON or GeoJSON.
    #[arg(long)]
    power: Option<PathBuf>,
    /// Building footprints as Overpass JSON or GeoJSON.
    #[arg(long)]
    buildings: Option<PathBuf>,
    /// Building-height polygons as GeoJSON.
    #[arg(long)]
    heights: Option<PathBuf>,
    /// Output figure JSON.
    #[arg(long)]
    out: PathBuf,
    /// Drape sample spacing in meters.
    #[arg(long, default_value_t = 10.0)]
    spacing: f64,
    #[arg(long, default_value_t = 1.0)]
    road_offset: f64,
    #[arg(long, default_value_t = 2.0)]
    power_offset: f64,
    /// Height in meters for buildings without a matched height.
    #[arg(long, default_value_t = 8.0)]
    default_height: f64,
    /// Mercator DEM resolution: `auto` or meters.
    #[arg(long, default_value = "auto", value_parser = parse_resolution)]
    resolution: Resolution,
    #[arg(long, default_value_t = DEFAULT_PIXEL_BUDGET)]
    pixel_budget: u64,
    /// Figure title.
    #[arg(long, default_value = "")]
    title: String,
}

fn parse_crs(s: &str) -> Result<u32, String> {
    match s.trim_start_matches("EPSG:").parse::<u32>() {
        Ok(code) if Crs::from_epsg(code).is_some() => Ok(code),
        _ => Err(format!("unsupported CRS `{s}` (use 4326 or 3857)")),
    }
}

fn parse_resolution(s: &str) -> Result<Resolution, String> {
    if s.eq_ignore_ascii_case("auto") {
        return Ok(Resolution::Auto);
    }
    match s.parse::<f64>() {
        Ok(m) if m > 0.0 && m.is_finite() => Ok(Resolution::Meters(m)),
        _ => Err(format!("expected `auto` or a positive number of meters, got `{s}`")),
    }
}

fn generate(a: GenerateArgs) -> Result<String, String> {
    let crs = Crs::from_epsg(a.dem_crs).expect("validated by the argument parser");
    let dem = load_dem(&a.dem, crs).map_err(|e| e.to_string())?;
    let ways = |p: &Option<PathBuf>, layer| match p {
        Some(p) => load_ways(p, layer).map_err(|e| e.to_string()),
        None => Ok(Vec::new()),
    };
    let inputs = SceneInputs {
        title: a.title,
        dem,
        roads: ways(&a.roads, OsmLayer::Road)?,
        power: ways(&a.power, OsmLayer::Power)?,
        buildings: ways(&a.buildings, OsmLayer::Building)?,
        heights: match &a.heights {
            Some(p) => load_heights(p).map_err(|e| e.to_string())?,
            None => Vec::new(),
        },
    };
    let opts = PipelineOptions {
        spacing: a.spacing,
        road_offset: a.road_offset,
        power_offset: a.power_offset,
        default_height: a.default_height,
        resolution: a.resolution,
        pixel_budget: a.pixel_budget,
    };
    let (json, summary) = render_scene_json(&inputs, &opts).map_err(|e| format!("scene generation failed: {e}"))?;
    std::fs::write(&a.out, json).map_err(|e| format!("cannot write {}: {e}", a.out.display()))?;
    Ok(format!("wrote {}: {summary}", a.out.display()))
}

async fn serve(config: Option<PathBuf>, listen: Option<String>) -> Result<(), String> {
    let mut cfg = match config {
        Some(p) => Config::load(&p).map_err(|e| e.to_string())?,
        None => Config::default(),
    };
    cfg.apply_env(std::env::vars()).map_err(|e| e.to_string())?;
    if let Some(l) = listen {
        cfg.listen = l;
    }
    urbanscene_service::serve(cfg).await.map_err(|e| e.to_string())
}

fn main() -> ExitCode {
    tracing_subscriber::fmt()
        .with_env_filter(
            tracing_subscriber::EnvFilter::try_from_default_env().unwrap_or_else(|_| "warn,urbanscene_service=info".into()),
        )
        .with_writer(std::io::stderr)
        .init();

    let result = match Cli::parse().command {
        Command::Generate(args) => generate(args).map(|line| println!("{line}")),
        Command::Serve { config, listen } => tokio::runtime::Runtime::new()
            .map_err(|e| e.to_string())
            .and_then(|rt| rt.block_on(serve(config, listen))),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::FAILURE
        }
    }
}
