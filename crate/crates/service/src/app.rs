use std::sync::Arc;

use axum::extract::rejection::RawPathParamsRejection;
use axum::extract::{RawPathParams, State};
use axum::http::{header, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::get;
use axum::Router;
use percent_encoding::percent_decode_str;
use tokio::sync::Semaphore;
use urbanscene_core::geomath::BBox;
use urbanscene_core::pipeline::{render_scene_json, PipelineOptions, SceneInputs};
use urbanscene_core::raster::parse_geotiff;
use urbanscene_core::sources::OsmLayer;
use urbanscene_sources::{
    ClientSettings, DemClient, FileHeights, GeocoderClient, HeightProvider, HttpHeights, NoHeights, OverpassClient,
    SourceError,
};

use crate::cache::SceneCache;
use crate::config::{Config, HeightsMode};
use crate::error::ServiceError;
use crate::slug::{normalize_query, parse_place_slug};

/// Arc-seconds per degree: the DEM provider's native cell size.
const DEM_CELLS_PER_DEGREE: f64 = 3600.0;

/// The upstream clients one pipeline run needs.
#[derive(Clone)]
pub struct Upstreams {
    pub geocoder: GeocoderClient,
    pub dem: DemClient,
    pub overpass: OverpassClient,
    pub heights: Arc<dyn HeightProvider>,
}

impl Upstreams {
    pub fn from_config(cfg: &Config) -> Result<Self, SourceError> {
        let settings = ClientSettings {
            user_agent: cfg.user_agent.clone(),
            timeout: std::time::Duration::from_secs(cfg.timeout_secs),
            retry: cfg.retry(),
            ..ClientSettings::default()
        };
        let heights: Arc<dyn HeightProvider> = match cfg.heights {
            HeightsMode::None => Arc::new(NoHeights),
            HeightsMode::File => Arc::new(FileHeights::new(
                cfg.heights_path.clone().unwrap_or_default(),
                urbanscene_core::geomath::Crs::Wgs84,
            )),
            HeightsMode::Http => Arc::new(HttpHeights::new(
                cfg.heights_url.as_deref().unwrap_or_default(),
                cfg.dem_policy(),
                &settings,
            )?),
        };
        Ok(Upstreams {
            geocoder: GeocoderClient::new(&cfg.geocoder_url, cfg.geocoder_policy(), &settings)?
                .with_point_half_width(cfg.point_half_width_m),
            dem: DemClient::new(&cfg.dem_url, cfg.dem_policy(), &settings)?,
            overpass: OverpassClient::new(&cfg.overpass_url, cfg.overpass_policy(), &settings)?,
            heights,
        })
    }
}

/// Refuses areas whose DEM would blow the pixel budget before downloading it.
fn check_area(bbox: &BBox, opts: &PipelineOptions) -> Result<(), ServiceError> {
    let cols = (bbox.width() * DEM_CELLS_PER_DEGREE).ceil();
    let rows = (bbox.height() * DEM_CELLS_PER_DEGREE).ceil();
    let pixels = (cols * rows) as u64;
    if pixels > opts.pixel_budget {
        return Err(urbanscene_core::Error::TooLarge { pixels, budget: opts.pixel_budget }.into());
    }
    Ok(())
}

/// Runs the whole pipeline for one place and returns the figure JSON.
pub async fn generate_scene(
    up: &Upstreams,
    query: &str,
    api_key: &str,
    opts: &PipelineOptions,
) -> Result<String, ServiceError> {
    let area = up.geocoder.geocode_place(query).await?;
    check_area(&area.bbox, opts)?;
    let bbox = area.bbox;
    let (dem_bytes, roads, power, buildings, heights) = tokio::try_join!(
        up.dem.fetch_dem(&bbox, api_key),
        up.overpass.fetch_osm_layer(&bbox, OsmLayer::Road),
        up.overpass.fetch_osm_layer(&bbox, OsmLayer::Power),
        up.overpass.fetch_osm_layer(&bbox, OsmLayer::Building),
        up.heights.heights(&bbox),
    )?;
    let title = query.to_string();
    let opts = opts.clone();
    let rendered = tokio::task::spawn_blocking(move || {
        let dem = parse_geotiff(&dem_bytes)?;
        let inputs = SceneInputs { title, dem, roads, power, buildings, heights };
        render_scene_json(&inputs, &opts)
    })
    .await
    .map_err(|e| ServiceError::Upstream(format!("scene generation aborted: {e}")))?;
    let (json, summary) = rendered?;
    tracing::info!(query, %summary, "scene generated");
    Ok(json)
}

pub struct AppState {
    pub upstreams: Upstreams,
    pub options: PipelineOptions,
    pub cache: SceneCache,
    permits: Semaphore,
}

impl AppState {
    pub fn new(upstreams: Upstreams, options: PipelineOptions, cache: SceneCache, max_concurrent: usize) -> Self {
        AppState { upstreams, options, cache, permits: Semaphore::new(max_concurrent.max(1)) }
    }

    pub fn from_config(cfg: &Config) -> Result<Self, SourceError> {
        Ok(Self::new(
            Upstreams::from_config(cfg)?,
            cfg.pipeline_options(),
            SceneCache::new(cfg.cache_ttl()),
            cfg.max_concurrent,
        ))
    }

    fn cache_key(&self, query: &str) -> String {
        format!("{}|{}", normalize_query(query), self.options.fingerprint())
    }

    /// Cached figure for `query`, generating it on a miss.
    pub async fn scene(&self, query: &str, api_key: &str) -> Result<Arc<String>, ServiceError> {
        let key = self.cache_key(query);
        if let Some(body) = self.cache.get(&key) {
            tracing::debug!(query, "cache hit");
            return Ok(body);
        }
        let _permit = self.permits.acquire().await.expect("pipeline semaphore is never closed");
        // Another request may have filled the entry while this one queued.
        if let Some(body) = self.cache.get(&key) {
            return Ok(body);
        }
        let body = Arc::new(generate_scene(&self.upstreams, query, api_key, &self.options).await?);
        self.cache.insert(key, body.clone());
        Ok(body)
    }
}

fn json_response(body: Arc<String>) -> Response {
    ([(header::CONTENT_TYPE, "application/json")], body.as_str().to_owned()).into_response()
}

async fn healthz() -> impl IntoResponse {
    (StatusCode::OK, "ok")
}

async fn scene_handler(
    State(state): State<Arc<AppState>>,
    params: Result<RawPathParams, RawPathParamsRejection>,
) -> Result<Response, ServiceError> {
    let params = params.map_err(|e| ServiceError::BadRequest(e.body_text()))?;
    let mut key = None;
    let mut slug = None;
    for (name, value) in params.iter() {
        match name {
            "api_key" => key = Some(value),
            "place_slug" => slug = Some(value),
            _ => {}
        }
    }
    let api_key = key
        .and_then(|k| percent_decode_str(k).decode_utf8().ok())
        .filter(|k| !k.trim().is_empty())
        .ok_or_else(|| ServiceError::BadRequest("missing API key".into()))?;
    let query = slug
        .and_then(parse_place_slug)
        .ok_or_else(|| ServiceError::BadRequest("place slug is empty or malformed".into()))?;
    Ok(json_response(state.scene(&query, &api_key).await?))
}

async fn malformed_path() -> ServiceError {
    ServiceError::BadRequest("expected GET /{api_key}/{place_slug}".into())
}

pub fn router(state: Arc<AppState>) -> Router {
    Router::new()
        .route("/healthz", get(healthz))
        .route("/{api_key}/{place_slug}", get(scene_handler))
        .fallback(malformed_path)
        .with_state(state)
}

/// Binds `cfg.listen` and serves until interrupted.
pub async fn serve(cfg: Config) -> std::io::Result<()> {
    let state = AppState::from_config(&cfg).map_err(|e| std::io::Error::other(e.to_string()))?;
    let listener = tokio::net::TcpListener::bind(&cfg.listen).await?;
    tracing::info!(addr = %listener.local_addr()?, "listening");
    axum::serve(listener, router(Arc::new(state)))
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await
}
