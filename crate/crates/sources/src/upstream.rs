use std::sync::Arc;
use std::time::Duration;

use reqwest::{Client, RequestBuilder, Response, StatusCode, Url};

use crate::error::SourceError;
use crate::limiter::{HostLimiter, HostPolicy, RateLimiters, RetryPolicy};

pub const DEFAULT_USER_AGENT: &str =
    concat!("urbanscene/", env!("CARGO_PKG_VERSION"), " (3D urban scene generator; open-data research use)");

/// Settings shared by every client.
#[derive(Debug, Clone)]
pub struct ClientSettings {
    pub user_agent: String,
    pub timeout: Duration,
    pub retry: RetryPolicy,
    pub limiters: RateLimiters,
}

impl Default for ClientSettings {
    fn default() -> Self {
        ClientSettings {
            user_agent: DEFAULT_USER_AGENT.to_string(),
            timeout: Duration::from_secs(120),
            retry: RetryPolicy::default(),
            limiters: RateLimiters::new(),
        }
    }
}

impl ClientSettings {
    pub(crate) fn http_client(&self) -> Result<Client, SourceError> {
        Client::builder()
            .user_agent(&self.user_agent)
            .timeout(self.timeout)
            .build()
            .map_err(|e| SourceError::InvalidInput(format!("HTTP client setup: {e}")))
    }
}

/// One upstream endpoint: base URL, pacing and retry behavior.
#[derive(Debug, Clone)]
pub(crate) struct Upstream {
    pub service: &'static str,
    pub base: Url,
    client: Client,
    limiter: Arc<HostLimiter>,
    retry: RetryPolicy,
}

pub(crate) fn parse_base(service: &'static str, base: &str) -> Result<Url, SourceError> {
    Url::parse(base).map_err(|e| SourceError::InvalidInput(format!("{service} base URL `{base}`: {e}")))
}

fn retryable(status: StatusCode) -> bool {
    status == StatusCode::TOO_MANY_REQUESTS || status.is_server_error()
}

impl Upstream {
    pub fn new(service: &'static str, base: &str, policy: HostPolicy, settings: &ClientSettings) -> Result<Self, SourceError> {
        let base = parse_base(service, base)?;
        Ok(Upstream {
            service,
            limiter: settings.limiters.for_url(&base, policy),
            client: settings.http_client()?,
            retry: settings.retry,
            base,
        })
    }

    /// `base` with `segment` appended as a path suffix.
    pub fn endpoint(&self, segment: &str) -> Url {
        let mut url = self.base.clone();
        let path = format!("{}/{}", url.path().trim_end_matches('/'), segment.trim_start_matches('/'));
        url.set_path(&path);
        url
    }

    /// Sends the request built by `build`, retrying transport errors,
    /// 429 and 5xx responses up to the configured limit.
    pub async fn send(&self, build: impl Fn(&Client) -> RequestBuilder) -> Result<Response, SourceError> {
        let mut attempt = 0;
        loop {
            let outcome = {
                let _permit = self.limiter.acquire().await;
                build(&self.client).send().await
            };
            let err = match outcome {
                Ok(resp) if resp.status().is_success() => return Ok(resp),
                Ok(resp) if retryable(resp.status()) => {
                    SourceError::Status { service: self.service, status: resp.status().as_u16() }
                }
                Ok(resp) => return Err(SourceError::Status { service: self.service, status: resp.status().as_u16() }),
                Err(e) => SourceError::Transport { service: self.service, message: e.to_string() },
            };
            if attempt >= self.retry.max_retries {
                return Err(err);
            }
            let delay = self.retry.delay(attempt);
            tracing::warn!(service = self.service, attempt, ?delay, error = %err, "retrying upstream request");
            tokio::time::sleep(delay).await;
            attempt += 1;
        }
    }

    pub async fn text(&self, resp: Response) -> Result<String, SourceError> {
        resp.text().await.map_err(|e| SourceError::Transport { service: self.service, message: e.to_string() })
    }

    pub async fn bytes(&self, resp: Response) -> Result<Vec<u8>, SourceError> {
        resp.bytes()
            .await
            .map(|b| b.to_vec())
            .map_err(|e| SourceError::Transport { service: self.service, message: e.to_string() })
    }

    pub fn parse_error(&self, source: urbanscene_core::Error) -> SourceError {
        SourceError::Parse { service: self.service, source }
    }
}
