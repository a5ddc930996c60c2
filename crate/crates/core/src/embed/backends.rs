use std::collections::HashMap;
use std::io::{BufRead, BufReader};
use std::path::Path;
use std::time::Duration;

use serde::{Deserialize, Serialize};

use super::deterministic::DeterministicEmbedder;
use super::vector::content_hash;
use super::EmbedError;

/// Raw vector source behind an [`Embedder`](super::Embedder).
pub trait EmbeddingBackend: Send + Sync {
    /// Stable identity used in cache keys.
    fn identity(&self) -> String;
    fn embed_raw(&self, texts: &[&str]) -> Result<Vec<Vec<f64>>, EmbedError>;
}

impl EmbeddingBackend for DeterministicEmbedder {
    fn identity(&self) -> String {
        format!("deterministic:{}:{}", self.dim(), self.seed())
    }

    fn embed_raw(&self, texts: &[&str]) -> Result<Vec<Vec<f64>>, EmbedError> {
        texts.iter().map(|t| self.embed_text(t)).collect()
    }
}

/// Precomputed vectors from a JSONL file of `{key, values}` objects. A text is found
/// either by its own string as key or by its SHA-256 content hash.
#[derive(Debug, Clone, Default)]
pub struct FileBackend {
    origin: String,
    vectors: HashMap<String, Vec<f64>>,
}

#[derive(Serialize, Deserialize)]
struct FileRecord {
    key: String,
    values: Vec<f64>,
}

impl FileBackend {
    pub fn load(path: &Path) -> Result<Self, EmbedError> {
        let file = std::fs::File::open(path)
            .map_err(|e| EmbedError::Io(format!("{}: {e}", path.display())))?;
        let mut vectors = HashMap::new();
        for (i, line) in BufReader::new(file).lines().enumerate() {
            let line = line.map_err(|e| EmbedError::Io(e.to_string()))?;
            if line.trim().is_empty() {
                continue;
            }
            let rec: FileRecord = serde_json::from_str(&line).map_err(|e| {
                EmbedError::Io(format!("{} line {}: {e}", path.display(), i + 1))
            })?;
            vectors.insert(rec.key, rec.values);
        }
        Ok(FileBackend {
            origin: path.display().to_string(),
            vectors,
        })
    }

    pub fn from_map(origin: impl Into<String>, vectors: HashMap<String, Vec<f64>>) -> Self {
        FileBackend {
            origin: origin.into(),
            vectors,
        }
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }
}

impl EmbeddingBackend for FileBackend {
    fn identity(&self) -> String {
        format!("file:{}", self.origin)
    }

    fn embed_raw(&self, texts: &[&str]) -> Result<Vec<Vec<f64>>, EmbedError> {
        texts
            .iter()
            .map(|t| {
                self.vectors
                    .get(*t)
                    .or_else(|| self.vectors.get(&content_hash(t)))
                    .cloned()
                    .ok_or_else(|| EmbedError::Missing(content_hash(t)))
            })
            .collect()
    }
}

/// Remote embedding service: `POST {texts: [..]}` answered by `{vectors: [[..]]}`.
#[derive(Debug, Clone)]
pub struct HttpBackend {
    url: String,
    timeout: Duration,
    attempts: u32,
    initial_backoff: Duration,
}

#[derive(Serialize)]
struct EmbedRequest<'a> {
    texts: &'a [&'a str],
}

#[derive(Deserialize)]
struct EmbedResponse {
    vectors: Vec<Vec<f64>>,
}

impl HttpBackend {
    pub fn new(url: impl Into<String>, timeout: Duration, attempts: u32, initial_backoff: Duration) -> Self {
        HttpBackend {
            url: url.into(),
            timeout,
            attempts: attempts.max(1),
            initial_backoff,
        }
    }

    fn post_once(&self, texts: &[&str]) -> Result<Vec<Vec<f64>>, String> {
        let agent: ureq::Agent = ureq::Agent::config_builder()
            .timeout_global(Some(self.timeout))
            .http_status_as_error(false)
            .build()
            .into();
        let mut resp = agent
            .post(&self.url)
            .send_json(EmbedRequest { texts })
            .map_err(|e| e.to_string())?;
        if resp.status() != 200 {
            return Err(format!("HTTP {}", resp.status()));
        }
        let body: EmbedResponse = resp.body_mut().read_json().map_err(|e| e.to_string())?;
        if body.vectors.len() != texts.len() {
            return Err(format!(
                "expected {} vectors, got {}",
                texts.len(),
                body.vectors.len()
            ));
        }
        Ok(body.vectors)
    }
}

impl EmbeddingBackend for HttpBackend {
    fn identity(&self) -> String {
        format!("http:{}", self.url)
    }

    fn embed_raw(&self, texts: &[&str]) -> Result<Vec<Vec<f64>>, EmbedError> {
        let mut last = String::new();
        for attempt in 1..=self.attempts {
            match self.post_once(texts) {
                Ok(v) => return Ok(v),
                Err(e) => last = e,
            }
            if attempt < self.attempts {
                std::thread::sleep(self.initial_backoff * 2u32.pow(attempt - 1));
            }
        }
        Err(EmbedError::Transport {
            attempts: self.attempts,
            message: last,
        })
    }
}
