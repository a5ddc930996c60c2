use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::EmbedError;

/// A finite, non-zero embedding.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawVector")]
pub struct EmbeddingVector {
    pub key: String,
    values: Vec<f64>,
}

#[derive(Deserialize)]
struct RawVector {
    key: String,
    values: Vec<f64>,
}

impl TryFrom<RawVector> for EmbeddingVector {
    type Error = EmbedError;

    fn try_from(raw: RawVector) -> Result<Self, Self::Error> {
        EmbeddingVector::new(raw.key, raw.values)
    }
}

impl EmbeddingVector {
    pub fn new(key: impl Into<String>, values: Vec<f64>) -> Result<Self, EmbedError> {
        let key = key.into();
        if values.is_empty() {
            return Err(EmbedError::Contract(format!("{key}: empty vector")));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(EmbedError::Contract(format!("{key}: non-finite component")));
        }
        if values.iter().all(|&v| v == 0.0) {
            return Err(EmbedError::ZeroVector(key));
        }
        Ok(EmbeddingVector { key, values })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn dim(&self) -> usize {
        self.values.len()
    }

    pub fn norm(&self) -> f64 {
        norm(&self.values)
    }

    /// Same direction, rescaled by `factor > 0`.
    pub fn scaled(&self, factor: f64) -> Result<Self, EmbedError> {
        EmbeddingVector::new(
            self.key.clone(),
            self.values.iter().map(|v| v * factor).collect(),
        )
    }
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Cosine similarity clamped to `[-1, 1]`.
pub fn cosine(a: &EmbeddingVector, b: &EmbeddingVector) -> Result<f64, EmbedError> {
    if a.dim() != b.dim() {
        return Err(EmbedError::DimensionMismatch {
            expected: a.dim(),
            actual: b.dim(),
        });
    }
    Ok(cosine_slices(&a.values, &b.values))
}

/// Unchecked variant for callers that already hold validated vectors of equal length.
pub(crate) fn cosine_slices(a: &[f64], b: &[f64]) -> f64 {
    let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
    // symmetric in (a, b) because the product of norms commutes exactly
    let denom = norm(a) * norm(b);
    (dot / denom).clamp(-1.0, 1.0)
}

/// Hex SHA-256 of the text, used as cache and lookup key.
pub fn content_hash(text: &str) -> String {
    let digest = Sha256::digest(text.as_bytes());
    digest.iter().map(|b| format!("{b:02x}")).collect()
}
