use std::collections::HashMap;
use std::sync::{Arc, RwLock};
use std::time::{Duration, Instant};

#[derive(Debug, Clone)]
struct Entry {
    body: Arc<String>,
    created: Instant,
}

/// In-memory figure cache with a fixed time-to-live.
#[derive(Debug)]
pub struct SceneCache {
    ttl: Duration,
    entries: RwLock<HashMap<String, Entry>>,
}

impl SceneCache {
    pub fn new(ttl: Duration) -> Self {
        SceneCache { ttl, entries: RwLock::new(HashMap::new()) }
    }

    pub fn get(&self, key: &str) -> Option<Arc<String>> {
        self.get_at(key, Instant::now())
    }

    pub fn insert(&self, key: String, body: Arc<String>) {
        self.insert_at(key, body, Instant::now());
    }

    pub fn len(&self) -> usize {
        self.entries.read().expect("cache lock poisoned").len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn get_at(&self, key: &str, now: Instant) -> Option<Arc<String>> {
        let entries = self.entries.read().expect("cache lock poisoned");
        entries
            .get(key)
            .filter(|e| now.saturating_duration_since(e.created) < self.ttl)
            .map(|e| e.body.clone())
    }

    fn insert_at(&self, key: String, body: Arc<String>, now: Instant) {
        let mut entries = self.entries.write().expect("cache lock poisoned");
        entries.retain(|_, e| now.saturating_duration_since(e.created) < self.ttl);
        entries.insert(key, Entry { body, created: now });
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn expired_entries_are_never_served() {
        let cache = SceneCache::new(Duration::from_secs(10));
        let t0 = Instant::now();
        cache.insert_at("k".into(), Arc::new("v".into()), t0);
        assert_eq!(cache.get_at("k", t0 + Duration::from_secs(9)).as_deref().map(String::as_str), Some("v"));
        assert_eq!(cache.get_at("k", t0 + Duration::from_secs(10)), None);
        assert_eq!(cache.get_at("other", t0), None);
    }

    #[test]
    fn insert_purges_stale() {
        let cache = SceneCache::new(Duration::from_secs(1));
        let t0 = Instant::now();
        cache.insert_at("a".into(), Arc::new("1".into()), t0);
        cache.insert_at("b".into(), Arc::new("2".into()), t0 + Duration::from_secs(5));
        assert_eq!(cache.len(), 1);
    }
}
