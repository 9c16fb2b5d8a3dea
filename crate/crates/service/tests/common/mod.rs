//! Mock upstreams serving the Alna fixture set, plus service launch helpers.
#![allow(dead_code)]

use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::{Arc, Mutex};

use axum::body::{to_bytes, Body};
use axum::extract::{Request, State};
use axum::http::{header, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::Router;
use urbanscene_service::config::HeightsMode;
use urbanscene_service::{router, AppState, Config};

pub const SLUG: &str = "Alna-Oslo-Norway";
pub const QUERY: &str = "Alna, Oslo, Norway";

pub fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures/alna").join(name)
}

fn read(name: &str) -> Vec<u8> {
    std::fs::read(fixture(name)).unwrap()
}

/// What each mocked endpoint answers.
#[derive(Clone)]
pub struct Replies {
    pub geocode: (u16, Vec<u8>),
    pub dem: (u16, Vec<u8>),
    pub overpass_status: u16,
    pub heights: (u16, Vec<u8>),
}

impl Default for Replies {
    fn default() -> Self {
        Replies {
            geocode: (200, read("geocode.json")),
            dem: (200, read("dem.tif")),
            overpass_status: 200,
            heights: (200, read("heights.geojson")),
        }
    }
}

#[derive(Clone)]
pub struct MockUpstream {
    pub base: String,
    calls: Arc<AtomicUsize>,
    pub log: Arc<Mutex<Vec<String>>>,
}

impl MockUpstream {
    pub fn calls(&self) -> usize {
        self.calls.load(Ordering::SeqCst)
    }
}

#[derive(Clone)]
struct MockState {
    replies: Arc<Replies>,
    calls: Arc<AtomicUsize>,
    log: Arc<Mutex<Vec<String>>>,
}

fn reply(status: u16, body: Vec<u8>, content_type: &'static str) -> Response {
    (StatusCode::from_u16(status).unwrap(), [(header::CONTENT_TYPE, content_type)], Body::from(body)).into_response()
}

async fn handle(State(s): State<MockState>, req: Request) -> Response {
    s.calls.fetch_add(1, Ordering::SeqCst);
    let path = req.uri().path().to_string();
    s.log.lock().unwrap().push(path.clone());
    let body = to_bytes(req.into_body(), usize::MAX).await.unwrap();
    let r = &s.replies;
    match path.as_str() {
        "/search" => reply(r.geocode.0, r.geocode.1.clone(), "application/json"),
        "/API/globaldem" => reply(r.dem.0, r.dem.1.clone(), "image/tiff"),
        "/heights" => reply(r.heights.0, r.heights.1.clone(), "application/json"),
        "/api/interpreter" => {
            if r.overpass_status != 200 {
                return reply(r.overpass_status, b"overpass failure".to_vec(), "text/plain");
            }
            // form-encoded `data=<query>`: quotes arrive as %22
            let text = String::from_utf8_lossy(&body).replace("%22", "\"");
            let file = if text.contains("\"building\"") {
                "buildings.json"
            } else if text.contains("\"power\"") {
                "power.json"
            } else {
                "roads.json"
            };
            reply(200, read(file), "application/json")
        }
        _ => reply(404, Vec::new(), "text/plain"),
    }
}

pub async fn mock_upstream(replies: Replies) -> MockUpstream {
    let calls = Arc::new(AtomicUsize::new(0));
    let log = Arc::new(Mutex::new(Vec::new()));
    let state = MockState { replies: Arc::new(replies), calls: calls.clone(), log: log.clone() };
    let app = Router::new().fallback(handle).with_state(state);
    let listener = tokio::net::TcpListener::bind("127.0.0.1:0").await.unwrap();
    let base = format!("http://{}", listener.local_addr().unwrap());
    tokio::spawn(async move { axum::serve(listener, app).await.unwrap() });
    MockUpstream { base, calls, log }
}

pub fn config_for(mock: &MockUpstream) -> Config {
    Config {
        geocoder_url: mock.base.clone(),
        dem_url: mock.base.clone(),
        overpass_url: format!("{}/api/interpreter", mock.base),
        heights: HeightsMode::Http,
        heights_url: Some(format!("{}/heights", mock.base)),
        geocoder_interval_ms: 0,
        retry_base_ms: 1,
        ..Config::default()
    }
}

pub struct Running {
    pub base: String,
    pub state: Arc<AppState>,
}

pub async fn start_service(cfg: &Config) -> Running {
    let state = Arc::new(AppState::from_config(cfg).unwrap());
    let app = router(state.clone());
    let listener = tokio::net::TcpListener::bind("127.0.0.1:0").await.unwrap();
    let base = format!("http://{}", listener.local_addr().unwrap());
    tokio::spawn(async move { axum::serve(listener, app).await.unwrap() });
    Running { base, state }
}

pub struct Reply {
    pub status: u16,
    pub content_type: String,
    pub body: String,
}

pub async fn get(url: &str) -> Reply {
    let resp = reqwest::get(url).await.unwrap();
    let status = resp.status().as_u16();
    let content_type = resp
        .headers()
        .get(reqwest::header::CONTENT_TYPE)
        .map(|v| v.to_str().unwrap().to_string())
        .unwrap_or_default();
    Reply { status, content_type, body: resp.text().await.unwrap() }
}

/// Runs the CLI over the fixture corpus with extra flags.
pub fn run_cli(out: &Path, extra: &[&str]) -> std::process::Output {
    let mut cmd = std::process::Command::new(env!("CARGO_BIN_EXE_urbanscene"));
    cmd.arg("generate")
        .arg("--dem")
        .arg(fixture("dem.tif"))
        .arg("--roads")
        .arg(fixture("roads.json"))
        .arg("--power")
        .arg(fixture("power.json"))
        .arg("--buildings")
        .arg(fixture("buildings.json"))
        .arg("--heights")
        .arg(fixture("heights.geojson"))
        .arg("--title")
        .arg(QUERY)
        .arg("--out")
        .arg(out)
        .args(extra);
    cmd.output().unwrap()
}

/// Number of non-null points in the named line trace.
pub fn line_points(doc: &serde_json::Value, name: &str) -> usize {
    doc["data"]
        .as_array()
        .unwrap()
        .iter()
        .find(|t| t["name"] == name)
        .map(|t| t["x"].as_array().unwrap().iter().filter(|v| !v.is_null()).count())
        .unwrap_or(0)
}
