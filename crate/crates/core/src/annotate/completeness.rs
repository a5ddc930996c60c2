use std::collections::{BTreeMap, HashMap};
use std::fs::{File, OpenOptions};
use std::io::{Read, Seek, SeekFrom, Write};
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicBool, AtomicUsize, Ordering};
use std::sync::mpsc;

use super::aba::AbaRecord;
use super::ledger::{LedgerEvent, RunLedger};
use super::types::SentenceKey;
use super::AnnotateError;
use crate::corpus::Sentence;

/// Result of one batch attempt, with everything worth logging.
#[derive(Debug, Default)]
pub struct BatchOutcome {
    pub records: Option<Vec<AbaRecord>>,
    pub events: Vec<LedgerEvent>,
}

pub trait BatchRunner: Sync {
    fn run(&self, batch: &[Sentence]) -> BatchOutcome;
}

/// Destination for validated records; each call is one batch.
pub trait RecordSink {
    fn append(&mut self, records: &[AbaRecord]) -> Result<(), AnnotateError>;
}

impl RecordSink for Vec<AbaRecord> {
    fn append(&mut self, records: &[AbaRecord]) -> Result<(), AnnotateError> {
        self.extend_from_slice(records);
        Ok(())
    }
}

/// Append-only JSONL file of records, one write per batch.
pub struct StreamFile {
    path: PathBuf,
    file: File,
}

impl StreamFile {
    /// Opens for appending and returns the records already present. A torn final
    /// line left by an interrupted write is cut off first.
    pub fn open(path: &Path) -> Result<(Self, Vec<AbaRecord>), AnnotateError> {
        let io = |source| AnnotateError::Io { path: path.to_path_buf(), source };
        let mut file = OpenOptions::new().create(true).read(true).append(true).open(path).map_err(io)?;
        let mut content = String::new();
        file.read_to_string(&mut content).map_err(io)?;
        let complete = content.rfind('\n').map_or(0, |i| i + 1);
        if complete < content.len() {
            file.set_len(complete as u64).map_err(io)?;
            file.seek(SeekFrom::End(0)).map_err(io)?;
        }
        let mut records = Vec::new();
        for (i, line) in content[..complete].lines().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let r: AbaRecord = serde_json::from_str(line)
                .map_err(|e| AnnotateError::Parse { line: i + 1, message: e.to_string() })?;
            records.push(r);
        }
        Ok((StreamFile { path: path.to_path_buf(), file }, records))
    }
}

impl RecordSink for StreamFile {
    fn append(&mut self, records: &[AbaRecord]) -> Result<(), AnnotateError> {
        let mut buf = String::new();
        for r in records {
            buf.push_str(&serde_json::to_string(r).expect("records serialize"));
            buf.push('\n');
        }
        self.file
            .write_all(buf.as_bytes())
            .and_then(|_| self.file.flush())
            .map_err(|source| AnnotateError::Io { path: self.path.clone(), source })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LoopConfig {
    pub batch_size: usize,
    pub workers: usize,
    pub max_rounds: u32,
    /// Stop as if the process died after this many committed batches.
    pub stop_after_commits: Option<usize>,
}

impl Default for LoopConfig {
    fn default() -> Self {
        LoopConfig { batch_size: 30, workers: 5, max_rounds: 10, stop_after_commits: None }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LoopSummary {
    pub rounds: u32,
    pub commits: usize,
    pub interrupted: bool,
}

enum Step {
    Commit(Vec<AbaRecord>),
    Event(LedgerEvent),
    FinalFailure(SentenceKey),
}

/// Runs a batch; in splitting rounds a failed batch is halved (larger half first)
/// until single sentences, and a single sentence that still fails is final.
fn process(batch: &[Sentence], split: bool, runner: &dyn BatchRunner, steps: &mut Vec<Step>) {
    let outcome = runner.run(batch);
    steps.extend(outcome.events.into_iter().map(Step::Event));
    if let Some(records) = outcome.records {
        steps.push(Step::Event(LedgerEvent::BatchCommitted { size: batch.len(), first_key: SentenceKey::of(&batch[0]) }));
        steps.push(Step::Commit(records));
        return;
    }
    if !split {
        return;
    }
    if batch.len() == 1 {
        steps.push(Step::FinalFailure(SentenceKey::of(&batch[0])));
        return;
    }
    let mid = batch.len().div_ceil(2);
    steps.push(Step::Event(LedgerEvent::Split {
        size: batch.len(),
        into: [mid, batch.len() - mid],
        first_key: SentenceKey::of(&batch[0]),
    }));
    process(&batch[..mid], split, runner, steps);
    process(&batch[mid..], split, runner, steps);
}

/// Repeats rounds over the missing set until nothing is missing. The first round
/// runs plain batches; later rounds split failing batches. Workers run batches in
/// parallel while one committer applies their results in batch order, so the
/// stream and the log do not depend on thread timing.
pub fn completeness_loop(
    ledger: &mut RunLedger,
    sentences: &HashMap<SentenceKey, Sentence>,
    runner: &dyn BatchRunner,
    sink: &mut dyn RecordSink,
    cfg: &LoopConfig,
) -> Result<LoopSummary, AnnotateError> {
    if cfg.batch_size == 0 || cfg.workers == 0 {
        return Err(AnnotateError::Config("batch size and worker count must be positive".into()));
    }
    for k in &ledger.target {
        if !sentences.contains_key(k) {
            return Err(AnnotateError::Contract(format!("no sentence text for target key {k}")));
        }
    }
    ledger.record(LedgerEvent::RunStarted {
        target: ledger.target.len(),
        done: ledger.done.len(),
        final_failures: ledger.final_failures.len(),
    })?;
    let mut summary = LoopSummary { rounds: 0, commits: 0, interrupted: false };
    for round in 1..=cfg.max_rounds {
        let missing = ledger.missing();
        if missing.is_empty() {
            break;
        }
        summary.rounds = round;
        let split = round > 1;
        ledger.record(LedgerEvent::RoundStarted { round, missing: missing.len(), splitting: split })?;
        let items: Vec<Sentence> = missing.iter().map(|k| sentences[k].clone()).collect();
        let batches: Vec<&[Sentence]> = items.chunks(cfg.batch_size).collect();

        let next = AtomicUsize::new(0);
        let cancel = AtomicBool::new(false);
        let result = std::thread::scope(|scope| -> Result<(), AnnotateError> {
            let (tx, rx) = mpsc::channel::<(usize, Vec<Step>)>();
            for _ in 0..cfg.workers.min(batches.len()) {
                let tx = tx.clone();
                let (next, cancel, batches) = (&next, &cancel, &batches);
                scope.spawn(move || loop {
                    if cancel.load(Ordering::SeqCst) {
                        break;
                    }
                    let i = next.fetch_add(1, Ordering::SeqCst);
                    let Some(batch) = batches.get(i) else { break };
                    let mut steps = Vec::new();
                    process(batch, split, runner, &mut steps);
                    if tx.send((i, steps)).is_err() {
                        break;
                    }
                });
            }
            drop(tx);
            let mut pending: BTreeMap<usize, Vec<Step>> = BTreeMap::new();
            let mut expected = 0usize;
            let commit_result = (|| {
                for (i, steps) in rx.iter() {
                    pending.insert(i, steps);
                    while let Some(steps) = pending.remove(&expected) {
                        expected += 1;
                        for step in steps {
                            match step {
                                Step::Event(e) => ledger.record(e)?,
                                Step::FinalFailure(key) => {
                                    ledger.final_failures.insert(key.clone());
                                    ledger.record(LedgerEvent::FinalFailure { key })?;
                                }
                                Step::Commit(records) => {
                                    sink.append(&records)?;
                                    ledger.done.extend(records.iter().map(|r| r.key.clone()));
                                    summary.commits += 1;
                                    if cfg.stop_after_commits.is_some_and(|n| summary.commits >= n) {
                                        summary.interrupted = true;
                                        return Ok(());
                                    }
                                }
                            }
                        }
                    }
                }
                Ok(())
            })();
            cancel.store(true, Ordering::SeqCst);
            commit_result
        });
        if let Err(e) = result {
            cancel.store(true, Ordering::SeqCst);
            return Err(e);
        }
        if summary.interrupted {
            ledger.record(LedgerEvent::Interrupted { commits: summary.commits })?;
            return Ok(summary);
        }
        ledger.record(LedgerEvent::RoundFinished {
            round,
            done: ledger.done.len(),
            missing: ledger.missing().len(),
            final_failures: ledger.final_failures.len(),
        })?;
    }
    Ok(summary)
}

/// Final decisions as TSV sorted by key, so any run that ends with the same records
/// writes the same bytes.
pub fn final_labels_tsv(records: &[AbaRecord]) -> String {
    let mut sorted: Vec<&AbaRecord> = records.iter().collect();
    sorted.sort_by(|a, b| a.key.cmp(&b.key));
    let mut out = String::from("writing_id\tsentence_id\tlabel\tconfidence\n");
    for r in sorted {
        out.push_str(&format!("{}\t{}\t{}\t{}\n", r.key.writing_id, r.key.sentence_id, r.a2.label, r.a2.confidence));
    }
    out
}
