//! Sentence-level emotion and moral annotation with an annotate, critique, revise
//! agent loop: relevance filtering, strict TSV validation, retries, batch
//! splitting, completeness accounting and agreement statistics.

mod aba;
mod agreement;
mod calibration;
mod client;
mod completeness;
mod filter;
mod ledger;
mod mock;
mod prompts;
mod tsv;
mod types;

use std::path::PathBuf;

use thiserror::Error;

pub use aba::{call_validated, run_aba_batch, AbaClients, AbaRecord, AbaRunner, Agree, Critique, Judgement};
pub use agreement::{cohen_kappa, fleiss_kappa, stream_fleiss};
pub use calibration::{
    calibration_converged, calibration_round, CalibrationRound, CalibrationSampler, CALIBRATION_KAPPA,
    CALIBRATION_SAMPLE, CALIBRATION_WINDOW,
};
pub use client::{HttpLlmClient, LlmClient, LlmClientConfig, LlmError, LlmRequest, Role};
pub use completeness::{
    completeness_loop, final_labels_tsv, BatchOutcome, BatchRunner, LoopConfig, LoopSummary, RecordSink, StreamFile,
};
pub use filter::{relevance_filter, FilterDecision, FilterPartition};
pub use ledger::{read_events, LedgerEvent, RunLedger};
pub use mock::{FailureMode, LabelRule, MockLlm, ScriptedLlm};
pub use prompts::{PromptSet, PROMPT_FILES};
pub use tsv::{sanitize_cell, validate_tsv, ColumnSet, Schema, TsvRow, Violation, ViolationClass};
pub use types::{Confidence, SentenceKey};

#[derive(Debug, Error)]
pub enum AnnotateError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("contract violation: {0}")]
    Contract(String),
}
