//! Canonical data model, JSONL ingestion, sentence segmentation, outlier trimming
//! and grade normalization.

mod io;
mod model;
mod segment;
mod trim;

use thiserror::Error;

pub use io::{load_corpus, load_corpus_with, read_corpus, CorpusBundle, DraftPair, GradeScale, LoadOptions};
pub use model::{EssayDraft, Grade, Grader, Phase, Sentence, Stage, Suggestion, SuggestionSet};
pub use segment::{
    coarse_filter, is_han, keep_text, segment_sentences, segment_with, tokenize, SegmentConfig,
    DEFAULT_TERMINATORS,
};
pub use trim::{nearest_rank, normalize_grade, trim_bands, trim_outliers, Band, LengthStats, TrimBands};

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("invariant violated: {0}")]
    Invariant(String),
    #[error("referential integrity: no draft with writing_id {0}")]
    DanglingReference(String),
    #[error("grade {raw} outside scale [{min}, {max}]")]
    GradeOutOfRange { raw: f64, min: f64, max: f64 },
    #[error("degenerate grade scale [{min}, {max}]")]
    DegenerateScale { min: f64, max: f64 },
    #[error("trim fraction {0} outside [0, 0.5)")]
    InvalidTrimFraction(f64),
}
