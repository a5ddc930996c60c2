use serde::{Deserialize, Serialize};

use super::sequence::sequence_similarity;
use super::UptakeError;
use crate::corpus::{Sentence, Suggestion, SuggestionSet};
use crate::embed::{cosine, Embedder, EmbeddingVector};

/// Who a finalized suggestion is credited to: retained model output or the teacher.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum OriginLabel {
    L,
    T,
}

/// `L` iff the best cosine against the initial set is strictly above `delta_m`.
/// An empty initial set counts as best cosine -1.
pub fn origin_from_vectors(
    v: &EmbeddingVector,
    initial: &[EmbeddingVector],
    delta_m: f64,
) -> Result<(OriginLabel, f64), UptakeError> {
    let mut best = -1.0f64;
    for u in initial {
        best = best.max(cosine(v, u)?);
    }
    let label = if !initial.is_empty() && best > delta_m { OriginLabel::L } else { OriginLabel::T };
    Ok((label, best))
}

pub fn classify_origin(
    s_final: &Suggestion,
    s_initial: &SuggestionSet,
    delta_m: f64,
    embedder: &Embedder,
) -> Result<OriginLabel, UptakeError> {
    let mut texts: Vec<&str> = vec![s_final.text.as_str()];
    texts.extend(s_initial.suggestions.iter().map(|s| s.text.as_str()));
    let mut vectors = embedder.embed_batch(&texts)?;
    let rest = vectors.split_off(1);
    Ok(origin_from_vectors(&vectors[0], &rest, delta_m)?.0)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RevisionCandidate {
    pub sentence: Sentence,
    pub max_similarity: f64,
}

/// Post-draft sentences that are active revisions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RevisionCandidateSet {
    pub writing_id: String,
    pub candidates: Vec<RevisionCandidate>,
    pub threshold_used: f64,
}

impl RevisionCandidateSet {
    pub fn texts(&self) -> Vec<&str> {
        self.candidates.iter().map(|c| c.sentence.text.as_str()).collect()
    }

    pub fn len(&self) -> usize {
        self.candidates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.candidates.is_empty()
    }
}

/// Post sentences whose best similarity to any pre sentence is strictly below
/// `delta_r`. With no pre sentences the best similarity is 0.
pub fn revision_candidates(d_pre: &[Sentence], d_post: &[Sentence], delta_r: f64) -> RevisionCandidateSet {
    let writing_id = d_post.first().map(|s| s.writing_id.clone()).unwrap_or_default();
    let candidates = d_post
        .iter()
        .filter_map(|post| {
            let best = d_pre
                .iter()
                .map(|pre| sequence_similarity(&pre.text, &post.text))
                .fold(0.0f64, f64::max);
            (best < delta_r).then(|| RevisionCandidate { sentence: post.clone(), max_similarity: best })
        })
        .collect();
    RevisionCandidateSet { writing_id, candidates, threshold_used: delta_r }
}

/// Softmax of `cosines / tau`, computed with the maximum subtracted.
pub fn attention_weights(cosines: &[f64], tau: f64) -> Vec<f64> {
    let Some(max) = cosines.iter().copied().reduce(f64::max) else {
        return Vec::new();
    };
    let exps: Vec<f64> = cosines.iter().map(|c| ((c - max) / tau).exp()).collect();
    let sum: f64 = exps.iter().sum();
    exps.into_iter().map(|e| e / sum).collect()
}

/// Attention-weighted mean of the cosines; 0 with no candidates.
pub fn match_score(cosines: &[f64], tau: f64) -> f64 {
    if cosines.is_empty() {
        return 0.0;
    }
    let m: f64 = attention_weights(cosines, tau).iter().zip(cosines).map(|(a, c)| a * c).sum();
    let lo = cosines.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = cosines.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    m.clamp(lo, hi)
}

pub fn attention_match(
    s_j: &Suggestion,
    candidates: &RevisionCandidateSet,
    tau: f64,
    embedder: &Embedder,
) -> Result<f64, UptakeError> {
    if !(tau > 0.0) {
        return Err(UptakeError::Contract(format!("temperature must be positive, got {tau}")));
    }
    if candidates.is_empty() {
        return Ok(0.0);
    }
    let mut texts = vec![s_j.text.as_str()];
    texts.extend(candidates.texts());
    let mut vectors = embedder.embed_batch(&texts)?;
    let rest = vectors.split_off(1);
    let cosines = rest.iter().map(|c| cosine(&vectors[0], c)).collect::<Result<Vec<_>, _>>()?;
    Ok(match_score(&cosines, tau))
}
