//! Tracing which finalized suggestions were taken up in the revised draft, who
//! authored them, and how much the teacher changed.

mod dimension;
mod matching;
mod record;
mod sequence;
mod summary;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::embed::EmbedError;

pub use dimension::{classify_dimension, scan_keywords, DimensionLabel, KEYWORDS};
pub use matching::{
    attention_match, attention_weights, classify_origin, match_score, origin_from_vectors, revision_candidates,
    OriginLabel, RevisionCandidate, RevisionCandidateSet,
};
pub use record::{
    compute_uptake, effort_from_parts, teacher_effort, EffortScenario, SuggestionOutcome, TeacherEffort, UptakeInput,
    UptakeRecord, WritingUptake,
};
pub use sequence::{matched_chars, sequence_similarity};
pub use summary::{effort_table, share_table, Direction, EffortRow, ShareRow};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum UptakeError {
    #[error(transparent)]
    Embed(#[from] EmbedError),
    #[error("contract violation: {0}")]
    Contract(String),
}

/// Origin, revision, adoption thresholds and the attention temperature.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Thresholds {
    pub delta_m: f64,
    pub delta_r: f64,
    pub delta_a: f64,
    pub tau: f64,
}

impl Default for Thresholds {
    fn default() -> Self {
        Thresholds { delta_m: 0.75, delta_r: 0.95, delta_a: 0.5, tau: 0.1 }
    }
}

impl Thresholds {
    pub fn validate(&self) -> Result<(), UptakeError> {
        let cosine_range = -1.0..=1.0;
        if !cosine_range.contains(&self.delta_m) {
            return Err(UptakeError::Contract(format!("delta_m {} outside [-1, 1]", self.delta_m)));
        }
        if !(0.0..=1.0).contains(&self.delta_r) {
            return Err(UptakeError::Contract(format!("delta_r {} outside [0, 1]", self.delta_r)));
        }
        if !cosine_range.contains(&self.delta_a) {
            return Err(UptakeError::Contract(format!("delta_a {} outside [-1, 1]", self.delta_a)));
        }
        if !(self.tau > 0.0 && self.tau.is_finite()) {
            return Err(UptakeError::Contract(format!("tau must be positive, got {}", self.tau)));
        }
        Ok(())
    }
}
