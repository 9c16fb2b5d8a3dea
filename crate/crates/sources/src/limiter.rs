use std::collections::HashMap;
use std::sync::{Arc, Mutex};
use std::time::Duration;

use tokio::sync::{Semaphore, SemaphorePermit};
use tokio::time::Instant;

/// Per-host request pacing.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HostPolicy {
    /// Minimum spacing between the starts of two requests.
    pub min_interval: Duration,
    pub max_concurrent: usize,
}

impl HostPolicy {
    pub const fn new(min_interval: Duration, max_concurrent: usize) -> Self {
        HostPolicy { min_interval, max_concurrent }
    }

    /// One request per second, one at a time.
    pub const GEOCODER: HostPolicy = HostPolicy::new(Duration::from_secs(1), 1);
    /// Unspaced, one at a time.
    pub const SERIAL: HostPolicy = HostPolicy::new(Duration::ZERO, 1);
}

#[derive(Debug)]
pub struct HostLimiter {
    policy: HostPolicy,
    permits: Semaphore,
    next_start: tokio::sync::Mutex<Option<Instant>>,
}

impl HostLimiter {
    pub fn new(policy: HostPolicy) -> Self {
        HostLimiter {
            policy,
            permits: Semaphore::new(policy.max_concurrent.max(1)),
            next_start: tokio::sync::Mutex::new(None),
        }
    }

    pub fn policy(&self) -> HostPolicy {
        self.policy
    }

    /// Waits for a concurrency slot and for the host's next start time.
    /// The request may proceed while the returned permit is held.
    pub async fn acquire(&self) -> SemaphorePermit<'_> {
        let permit = self.permits.acquire().await.expect("limiter semaphore is never closed");
        let mut next = self.next_start.lock().await;
        if let Some(at) = *next {
            tokio::time::sleep_until(at).await;
        }
        *next = Some(Instant::now() + self.policy.min_interval);
        permit
    }
}

/// Shared registry of limiters keyed by `host:port`.
///
/// The first policy registered for a host wins.
#[derive(Debug, Default, Clone)]
pub struct RateLimiters {
    hosts: Arc<Mutex<HashMap<String, Arc<HostLimiter>>>>,
}

impl RateLimiters {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn for_url(&self, url: &reqwest::Url, policy: HostPolicy) -> Arc<HostLimiter> {
        let key = format!("{}:{}", url.host_str().unwrap_or(""), url.port_or_known_default().unwrap_or(0));
        let mut hosts = self.hosts.lock().expect("limiter registry poisoned");
        hosts.entry(key).or_insert_with(|| Arc::new(HostLimiter::new(policy))).clone()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RetryPolicy {
    pub max_retries: u32,
    /// Delay before the first retry; doubled for each further one.
    pub base_delay: Duration,
}

impl Default for RetryPolicy {
    fn default() -> Self {
        RetryPolicy { max_retries: 2, base_delay: Duration::from_millis(500) }
    }
}

impl RetryPolicy {
    pub fn none() -> Self {
        RetryPolicy { max_retries: 0, base_delay: Duration::ZERO }
    }

    pub fn delay(&self, attempt: u32) -> Duration {
        self.base_delay.saturating_mul(1u32 << attempt.min(16))
    }
}
