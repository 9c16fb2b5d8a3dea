use std::path::PathBuf;

use async_trait::async_trait;
use urbanscene_core::geomath::{BBox, Crs};
use urbanscene_core::sources::{parse_height_features, HeightFeature};

use crate::error::SourceError;
use crate::limiter::HostPolicy;
use crate::upstream::{ClientSettings, Upstream};

/// Source of building-height polygons.
#[async_trait]
pub trait HeightProvider: Send + Sync {
    /// Features overlapping `bbox` (EPSG:4326).
    async fn heights(&self, bbox: &BBox) -> Result<Vec<HeightFeature>, SourceError>;
}

fn overlapping(features: Vec<HeightFeature>, bbox: &BBox) -> Vec<HeightFeature> {
    let mercator = bbox.to_mercator().ok();
    features
        .into_iter()
        .filter(|f| {
            let Ok(env) = f.ring.envelope() else { return false };
            let b = match f.ring.crs {
                Crs::Wgs84 => bbox,
                Crs::WebMercator => match &mercator {
                    Some(m) => m,
                    None => return true,
                },
            };
            env.west <= b.east && env.east >= b.west && env.south <= b.north && env.north >= b.south
        })
        .collect()
}

/// Always empty: every building gets the default height.
#[derive(Debug, Clone, Copy, Default)]
pub struct NoHeights;

#[async_trait]
impl HeightProvider for NoHeights {
    async fn heights(&self, _bbox: &BBox) -> Result<Vec<HeightFeature>, SourceError> {
        Ok(Vec::new())
    }
}

/// GeoJSON FeatureCollection on disk, re-read on every call.
#[derive(Debug, Clone)]
pub struct FileHeights {
    path: PathBuf,
    crs: Crs,
}

impl FileHeights {
    pub fn new(path: impl Into<PathBuf>, crs: Crs) -> Self {
        FileHeights { path: path.into(), crs }
    }
}

#[async_trait]
impl HeightProvider for FileHeights {
    async fn heights(&self, bbox: &BBox) -> Result<Vec<HeightFeature>, SourceError> {
        let path = self.path.display().to_string();
        let text = tokio::fs::read_to_string(&self.path)
            .await
            .map_err(|e| SourceError::Io { path: path.clone(), message: e.to_string() })?;
        let features = parse_height_features(&text, self.crs)
            .map_err(|source| SourceError::Parse { service: "height file", source })?;
        Ok(overlapping(features, bbox))
    }
}

/// Remote endpoint answering `GET <url>?bbox=west,south,east,north` with
/// a GeoJSON FeatureCollection in EPSG:4326.
#[derive(Debug, Clone)]
pub struct HttpHeights {
    upstream: Upstream,
}

impl HttpHeights {
    pub fn new(url: &str, policy: HostPolicy, settings: &ClientSettings) -> Result<Self, SourceError> {
        Ok(HttpHeights { upstream: Upstream::new("height provider", url, policy, settings)? })
    }
}

#[async_trait]
impl HeightProvider for HttpHeights {
    async fn heights(&self, bbox: &BBox) -> Result<Vec<HeightFeature>, SourceError> {
        let url = self.upstream.base.clone();
        let param = format!("{},{},{},{}", bbox.west, bbox.south, bbox.east, bbox.north);
        let resp = self.upstream.send(|c| c.get(url.clone()).query(&[("bbox", param.as_str())])).await?;
        let body = self.upstream.text(resp).await?;
        let features = parse_height_features(&body, Crs::Wgs84).map_err(|e| self.upstream.parse_error(e))?;
        Ok(overlapping(features, bbox))
    }
}
