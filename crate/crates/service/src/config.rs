//! Service configuration: a flat TOML file plus environment overrides.
//!
//! ```toml
//! listen = "127.0.0.1:8080"
//! geocoder_url = "https://nominatim.openstreetmap.org"
//! dem_url = "https://portal.opentopography.org"
//! overpass_url = "https://overpass-api.de/api/interpreter"
//! heights = "file"              # "none", "file" or "http"
//! heights_path = "heights.geojson"
//! spacing = 10.0
//! resolution_m = 30.0           # omit for automatic resolution
//! cache_ttl_secs = 86400
//! ```
//!
//! Every key is optional. `URBANSCENE_LISTEN`, `URBANSCENE_GEOCODER_URL`,
//! `URBANSCENE_DEM_URL`, `URBANSCENE_OVERPASS_URL`, `URBANSCENE_HEIGHTS_URL`
//! and `URBANSCENE_HEIGHTS_PATH` override the file.

use std::path::{Path, PathBuf};
use std::time::Duration;

use serde::Deserialize;
use urbanscene_core::pipeline::{PipelineOptions, DEFAULT_PIXEL_BUDGET};
use urbanscene_core::raster::Resolution;
use urbanscene_core::sources::DEFAULT_POINT_HALF_WIDTH_M;
use urbanscene_sources::{HostPolicy, RetryPolicy, DEFAULT_USER_AGENT};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum HeightsMode {
    None,
    File,
    Http,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Config {
    pub listen: String,
    pub geocoder_url: String,
    pub dem_url: String,
    pub overpass_url: String,
    pub user_agent: String,

    pub heights: HeightsMode,
    pub heights_path: Option<PathBuf>,
    pub heights_url: Option<String>,

    pub spacing: f64,
    pub road_offset: f64,
    pub power_offset: f64,
    pub default_height: f64,
    pub resolution_m: Option<f64>,
    pub pixel_budget: u64,
    pub point_half_width_m: f64,

    pub cache_ttl_secs: u64,
    pub max_concurrent: usize,
    pub geocoder_interval_ms: u64,
    pub dem_concurrency: usize,
    pub overpass_concurrency: usize,
    pub max_retries: u32,
    pub retry_base_ms: u64,
    pub timeout_secs: u64,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            listen: "127.0.0.1:8080".into(),
            geocoder_url: "https://nominatim.openstreetmap.org".into(),
            dem_url: "https://portal.opentopography.org".into(),
            overpass_url: "https://overpass-api.de/api/interpreter".into(),
            user_agent: DEFAULT_USER_AGENT.into(),
            heights: HeightsMode::None,
            heights_path: None,
            heights_url: None,
            spacing: 10.0,
            road_offset: 1.0,
            power_offset: 2.0,
            default_height: 8.0,
            resolution_m: None,
            pixel_budget: DEFAULT_PIXEL_BUDGET,
            point_half_width_m: DEFAULT_POINT_HALF_WIDTH_M,
            cache_ttl_secs: 24 * 60 * 60,
            max_concurrent: 2,
            geocoder_interval_ms: 1000,
            dem_concurrency: 1,
            overpass_concurrency: 1,
            max_retries: 2,
            retry_base_ms: 500,
            timeout_secs: 180,
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read config {path}: {message}")]
    Read { path: String, message: String },
    #[error("invalid config: {0}")]
    Invalid(String),
}

impl Config {
    pub fn from_toml(text: &str) -> Result<Self, ConfigError> {
        let cfg: Config = toml::from_str(text).map_err(|e| ConfigError::Invalid(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ConfigError::Read { path: path.display().to_string(), message: e.to_string() })?;
        Self::from_toml(&text)
    }

    /// Applies `URBANSCENE_*` overrides from `vars`.
    pub fn apply_env<I, K, V>(&mut self, vars: I) -> Result<(), ConfigError>
    where
        I: IntoIterator<Item = (K, V)>,
        K: AsRef<str>,
        V: Into<String>,
    {
        for (k, v) in vars {
            let v = v.into();
            match k.as_ref() {
                "URBANSCENE_LISTEN" => self.listen = v,
                "URBANSCENE_GEOCODER_URL" => self.geocoder_url = v,
                "URBANSCENE_DEM_URL" => self.dem_url = v,
                "URBANSCENE_OVERPASS_URL" => self.overpass_url = v,
                "URBANSCENE_HEIGHTS_URL" => {
                    self.heights_url = Some(v);
                    self.heights = HeightsMode::Http;
                }
                "URBANSCENE_HEIGHTS_PATH" => {
                    self.heights_path = Some(v.into());
                    self.heights = HeightsMode::File;
                }
                _ => {}
            }
        }
        self.validate()
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let positive = [
            ("spacing", self.spacing),
            ("road_offset", self.road_offset),
            ("power_offset", self.power_offset),
            ("default_height", self.default_height),
            ("point_half_width_m", self.point_half_width_m),
            ("resolution_m", self.resolution_m.unwrap_or(1.0)),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(ConfigError::Invalid(format!("{name} must be positive, got {v}")));
            }
        }
        let counts = [
            ("pixel_budget", self.pixel_budget),
            ("cache_ttl_secs", self.cache_ttl_secs),
            ("max_concurrent", self.max_concurrent as u64),
            ("dem_concurrency", self.dem_concurrency as u64),
            ("overpass_concurrency", self.overpass_concurrency as u64),
            ("timeout_secs", self.timeout_secs),
        ];
        for (name, v) in counts {
            if v == 0 {
                return Err(ConfigError::Invalid(format!("{name} must be positive")));
            }
        }
        match self.heights {
            HeightsMode::File if self.heights_path.is_none() => {
                Err(ConfigError::Invalid("heights = \"file\" needs heights_path".into()))
            }
            HeightsMode::Http if self.heights_url.is_none() => {
                Err(ConfigError::Invalid("heights = \"http\" needs heights_url".into()))
            }
            _ => Ok(()),
        }
    }

    pub fn pipeline_options(&self) -> PipelineOptions {
        PipelineOptions {
            spacing: self.spacing,
            road_offset: self.road_offset,
            power_offset: self.power_offset,
            default_height: self.default_height,
            resolution: self.resolution_m.map_or(Resolution::Auto, Resolution::Meters),
            pixel_budget: self.pixel_budget,
        }
    }

    pub fn cache_ttl(&self) -> Duration {
        Duration::from_secs(self.cache_ttl_secs)
    }

    pub fn retry(&self) -> RetryPolicy {
        RetryPolicy { max_retries: self.max_retries, base_delay: Duration::from_millis(self.retry_base_ms) }
    }

    pub fn geocoder_policy(&self) -> HostPolicy {
        HostPolicy::new(Duration::from_millis(self.geocoder_interval_ms), 1)
    }

    pub fn dem_policy(&self) -> HostPolicy {
        HostPolicy::new(Duration::ZERO, self.dem_concurrency)
    }

    pub fn overpass_policy(&self) -> HostPolicy {
        HostPolicy::new(Duration::ZERO, self.overpass_concurrency)
    }
}
