//! Subcommand implementations and the helpers they share.

pub mod annotate;
pub mod ingest;
pub mod metrics;
pub mod report;
pub mod stats;
pub mod synth;
pub mod uptake;

use anyhow::{Context, Result};
use revisio_core::corpus::{coarse_filter, load_corpus, segment_with, CorpusBundle, EssayDraft, SegmentConfig, Sentence};
use revisio_core::interpersonal::Task;
use serde::de::DeserializeOwned;

use crate::config::RunConfig;
use crate::output::OutDir;

/// Canonical corpus written by `ingest` and read by every later stage.
pub const CORPUS_FILE: &str = "corpus.jsonl";
pub const METRICS_FILE: &str = "metrics.jsonl";
pub const UPTAKE_FILE: &str = "uptake.jsonl";

pub fn labels_file(task: Task) -> String {
    format!("labels_{task}.tsv")
}

pub fn segment_config(cfg: &RunConfig) -> SegmentConfig {
    if cfg.extended_terminators {
        SegmentConfig::extended()
    } else {
        SegmentConfig::default()
    }
}

/// Sentences of a draft that survive the rule-based pre-filter. These are the
/// units that get annotated, embedded and matched.
pub fn analysed_sentences(cfg: &RunConfig, draft: &EssayDraft) -> Vec<Sentence> {
    segment_with(&draft.writing_id, &draft.text, &segment_config(cfg))
        .into_iter()
        .filter(coarse_filter)
        .collect()
}

pub fn load_bundle(out: &OutDir) -> Result<CorpusBundle> {
    let p = out.path(CORPUS_FILE);
    load_corpus(&p).with_context(|| format!("loading {} (run ingest first)", p.display()))
}

pub fn read_jsonl<T: DeserializeOwned>(out: &OutDir, name: &str) -> Result<Vec<T>> {
    let p = out.path(name);
    let raw = std::fs::read_to_string(&p).with_context(|| format!("reading {}", p.display()))?;
    raw.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| serde_json::from_str(l).with_context(|| format!("{} line {}", p.display(), i + 1)))
        .collect()
}

/// Thread pool sized by `worker_count`.
pub fn pool(cfg: &RunConfig) -> Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.worker_count)
        .build()
        .context("building worker pool")
}
