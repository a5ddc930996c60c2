//! Sentence-embedding providers and cosine similarity.
//!
//! [`Embedder`] wraps one [`EmbeddingBackend`] with dimension checks, batching and a
//! per-run content-hash cache. Three backends ship: precomputed vectors from a file,
//! a remote HTTP service, and a deterministic hash embedder that needs no model.

mod backends;
mod deterministic;
mod vector;

use std::collections::HashMap;
use std::path::Path;
use std::sync::{Arc, Mutex};
use std::time::Duration;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use backends::{EmbeddingBackend, FileBackend, HttpBackend};
pub use deterministic::DeterministicEmbedder;
pub(crate) use deterministic::fnv1a;
pub use vector::{content_hash, cosine, EmbeddingVector};
pub(crate) use vector::cosine_slices;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EmbedError {
    #[error("embedding service failed after {attempts} attempts: {message}")]
    Transport { attempts: u32, message: String },
    #[error("no embedding for key {0}")]
    Missing(String),
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },
    #[error("provider returned a zero vector for {0}")]
    ZeroVector(String),
    #[error("provider contract violated: {0}")]
    Contract(String),
    #[error("{0}")]
    Io(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BackendKind {
    File,
    Http,
    Deterministic,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EmbeddingProviderConfig {
    pub backend: BackendKind,
    /// File path or URL; unused by the deterministic backend.
    pub location: Option<String>,
    pub dim: usize,
    pub timeout_ms: u64,
    pub max_batch: usize,
    pub attempts: u32,
    pub initial_backoff_ms: u64,
    pub seed: u64,
}

impl Default for EmbeddingProviderConfig {
    fn default() -> Self {
        EmbeddingProviderConfig {
            backend: BackendKind::Deterministic,
            location: None,
            dim: 256,
            timeout_ms: 30_000,
            max_batch: 64,
            attempts: 3,
            initial_backoff_ms: 250,
            seed: 0,
        }
    }
}

impl EmbeddingProviderConfig {
    pub fn validate(&self) -> Result<(), EmbedError> {
        if self.dim == 0 {
            return Err(EmbedError::Contract("dim must be positive".into()));
        }
        if self.max_batch == 0 {
            return Err(EmbedError::Contract("max_batch must be at least 1".into()));
        }
        if matches!(self.backend, BackendKind::File | BackendKind::Http) && self.location.is_none() {
            return Err(EmbedError::Contract(format!(
                "{:?} backend needs a location",
                self.backend
            )));
        }
        Ok(())
    }

    pub fn build(&self) -> Result<Embedder, EmbedError> {
        self.validate()?;
        let backend: Box<dyn EmbeddingBackend> = match self.backend {
            BackendKind::Deterministic => Box::new(DeterministicEmbedder::new(self.dim, self.seed)),
            BackendKind::File => Box::new(FileBackend::load(Path::new(
                self.location.as_deref().unwrap_or_default(),
            ))?),
            BackendKind::Http => Box::new(HttpBackend::new(
                self.location.clone().unwrap_or_default(),
                Duration::from_millis(self.timeout_ms),
                self.attempts,
                Duration::from_millis(self.initial_backoff_ms),
            )),
        };
        Ok(Embedder::new(backend, self.dim, self.max_batch))
    }
}

/// Thread-safe embedding provider with a no-eviction cache keyed by
/// (backend identity, content hash).
pub struct Embedder {
    backend: Box<dyn EmbeddingBackend>,
    identity: String,
    dim: usize,
    max_batch: usize,
    cache: Mutex<HashMap<String, Arc<EmbeddingVector>>>,
}

impl std::fmt::Debug for Embedder {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Embedder")
            .field("identity", &self.identity)
            .field("dim", &self.dim)
            .finish()
    }
}

impl Embedder {
    pub fn new(backend: Box<dyn EmbeddingBackend>, dim: usize, max_batch: usize) -> Self {
        let identity = backend.identity();
        Embedder {
            backend,
            identity,
            dim,
            max_batch: max_batch.max(1),
            cache: Mutex::new(HashMap::new()),
        }
    }

    pub fn deterministic(dim: usize, seed: u64) -> Self {
        Embedder::new(Box::new(DeterministicEmbedder::new(dim, seed)), dim, 64)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn identity(&self) -> &str {
        &self.identity
    }

    pub fn cached_len(&self) -> usize {
        self.cache.lock().expect("cache poisoned").len()
    }

    fn cache_key(&self, text: &str) -> String {
        format!("{}|{}", self.identity, content_hash(text))
    }

    /// One vector per input text, in input order.
    pub fn embed_batch<S: AsRef<str>>(&self, texts: &[S]) -> Result<Vec<EmbeddingVector>, EmbedError> {
        let keys: Vec<String> = texts.iter().map(|t| self.cache_key(t.as_ref())).collect();
        let mut pending: Vec<usize> = Vec::new();
        {
            let cache = self.cache.lock().expect("cache poisoned");
            let mut queued = std::collections::HashSet::new();
            for (i, k) in keys.iter().enumerate() {
                if !cache.contains_key(k) && queued.insert(k.as_str()) {
                    pending.push(i);
                }
            }
        }
        for chunk in pending.chunks(self.max_batch) {
            let batch: Vec<&str> = chunk.iter().map(|&i| texts[i].as_ref()).collect();
            let raw = self.backend.embed_raw(&batch)?;
            if raw.len() != batch.len() {
                return Err(EmbedError::Contract(format!(
                    "backend returned {} vectors for {} texts",
                    raw.len(),
                    batch.len()
                )));
            }
            let mut fresh = Vec::with_capacity(raw.len());
            for (&i, values) in chunk.iter().zip(raw) {
                if values.len() != self.dim {
                    return Err(EmbedError::DimensionMismatch {
                        expected: self.dim,
                        actual: values.len(),
                    });
                }
                let key = content_hash(texts[i].as_ref());
                fresh.push((i, Arc::new(EmbeddingVector::new(key, values)?)));
            }
            let mut cache = self.cache.lock().expect("cache poisoned");
            for (i, v) in fresh {
                cache.insert(keys[i].clone(), v);
            }
        }
        let cache = self.cache.lock().expect("cache poisoned");
        Ok(keys
            .iter()
            .map(|k| cache[k].as_ref().clone())
            .collect())
    }

    pub fn embed_one(&self, text: &str) -> Result<EmbeddingVector, EmbedError> {
        Ok(self.embed_batch(&[text])?.remove(0))
    }
}
