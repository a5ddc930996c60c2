//! Semantic dispersion and semantic shift over per-sentence embeddings.

use serde::{Deserialize, Serialize};

use crate::embed::{cosine_slices, EmbedError, EmbeddingVector};
use crate::Score;

/// Which quantity is averaged: raw cosine similarity or cosine distance `1 - cos`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Polarity {
    Similarity,
    #[default]
    Distance,
}

impl Polarity {
    fn apply(self, cos: f64) -> f64 {
        match self {
            Polarity::Similarity => cos,
            Polarity::Distance => 1.0 - cos,
        }
    }
}

impl std::str::FromStr for Polarity {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "similarity" => Ok(Polarity::Similarity),
            "distance" => Ok(Polarity::Distance),
            other => Err(format!("unknown polarity {other:?}")),
        }
    }
}

/// Ordered sentence embeddings of one writing (coarse-filtered sentences only).
#[derive(Debug, Clone, PartialEq)]
pub struct EssayEmbedding {
    pub writing_id: String,
    vectors: Vec<EmbeddingVector>,
}

impl EssayEmbedding {
    pub fn new(writing_id: impl Into<String>, vectors: Vec<EmbeddingVector>) -> Result<Self, EmbedError> {
        if let Some(first) = vectors.first() {
            if let Some(bad) = vectors.iter().find(|v| v.dim() != first.dim()) {
                return Err(EmbedError::DimensionMismatch {
                    expected: first.dim(),
                    actual: bad.dim(),
                });
            }
        }
        Ok(EssayEmbedding {
            writing_id: writing_id.into(),
            vectors,
        })
    }

    pub fn vectors(&self) -> &[EmbeddingVector] {
        &self.vectors
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoherenceScores {
    pub sc_dis: f64,
    pub sc_shift: f64,
    pub polarity: Polarity,
}

/// Mean over all ordered pairs `i != j`.
pub fn semantic_dispersion(e: &EssayEmbedding, polarity: Polarity) -> Score {
    let v = &e.vectors;
    let n = v.len();
    if n < 2 {
        return Score::degenerate();
    }
    let mut total = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                total += polarity.apply(cosine_slices(v[i].values(), v[j].values()));
            }
        }
    }
    Score::new(total / (n * (n - 1)) as f64)
}

/// Mean over adjacent pairs `(i, i+1)`.
pub fn semantic_shift(e: &EssayEmbedding, polarity: Polarity) -> Score {
    let v = &e.vectors;
    let n = v.len();
    if n < 2 {
        return Score::degenerate();
    }
    let total: f64 = v
        .windows(2)
        .map(|w| polarity.apply(cosine_slices(w[0].values(), w[1].values())))
        .sum();
    Score::new(total / (n - 1) as f64)
}

pub fn coherence(e: &EssayEmbedding, polarity: Polarity) -> CoherenceScores {
    CoherenceScores {
        sc_dis: semantic_dispersion(e, polarity).value,
        sc_shift: semantic_shift(e, polarity).value,
        polarity,
    }
}
