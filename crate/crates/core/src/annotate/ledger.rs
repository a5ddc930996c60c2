use std::collections::BTreeSet;
use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::tsv::Violation;
use super::types::SentenceKey;
use super::AnnotateError;

/// One entry of the append-only run log.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "event", rename_all = "snake_case")]
pub enum LedgerEvent {
    RunStarted { target: usize, done: usize, final_failures: usize },
    RoundStarted { round: u32, missing: usize, splitting: bool },
    CallError { stage: String, size: usize, first_key: SentenceKey, attempt: u32, message: String },
    ValidationFailure { stage: String, size: usize, first_key: SentenceKey, attempt: u32, violations: Vec<Violation> },
    Retry { stage: String, size: usize, first_key: SentenceKey, attempt: u32 },
    RetryExhausted { stage: String, size: usize, first_key: SentenceKey },
    Split { size: usize, into: [usize; 2], first_key: SentenceKey },
    BatchCommitted { size: usize, first_key: SentenceKey },
    FinalFailure { key: SentenceKey },
    RoundFinished { round: u32, done: usize, missing: usize, final_failures: usize },
    Interrupted { commits: usize },
}

/// Set-difference bookkeeping: `missing = target - done - final_failures`.
#[derive(Debug, Default)]
pub struct RunLedger {
    pub target: BTreeSet<SentenceKey>,
    pub done: BTreeSet<SentenceKey>,
    pub final_failures: BTreeSet<SentenceKey>,
    pub log: Vec<LedgerEvent>,
    file: Option<(PathBuf, File)>,
}

impl RunLedger {
    pub fn new(target: impl IntoIterator<Item = SentenceKey>) -> Self {
        RunLedger { target: target.into_iter().collect(), ..Default::default() }
    }

    /// Opens (or creates) a persisted event log. Final failures recorded by an
    /// earlier run are restored; `done` is left for the caller to fill from the
    /// stream file.
    pub fn open(path: &Path, target: impl IntoIterator<Item = SentenceKey>) -> Result<Self, AnnotateError> {
        let mut ledger = RunLedger::new(target);
        if path.exists() {
            for event in read_events(path)? {
                if let LedgerEvent::FinalFailure { key } = &event {
                    if ledger.target.contains(key) {
                        ledger.final_failures.insert(key.clone());
                    }
                }
                ledger.log.push(event);
            }
        }
        let file = OpenOptions::new()
            .create(true)
            .append(true)
            .open(path)
            .map_err(|source| AnnotateError::Io { path: path.to_path_buf(), source })?;
        ledger.file = Some((path.to_path_buf(), file));
        Ok(ledger)
    }

    pub fn missing(&self) -> BTreeSet<SentenceKey> {
        self.target
            .iter()
            .filter(|k| !self.done.contains(*k) && !self.final_failures.contains(*k))
            .cloned()
            .collect()
    }

    pub fn record(&mut self, event: LedgerEvent) -> Result<(), AnnotateError> {
        if let Some((path, file)) = &mut self.file {
            let mut line = serde_json::to_string(&event).expect("ledger events serialize");
            line.push('\n');
            file.write_all(line.as_bytes())
                .and_then(|_| file.flush())
                .map_err(|source| AnnotateError::Io { path: path.clone(), source })?;
        }
        self.log.push(event);
        Ok(())
    }

    pub fn count(&self, pred: impl Fn(&LedgerEvent) -> bool) -> usize {
        self.log.iter().filter(|e| pred(e)).count()
    }
}

/// Complete lines of a JSONL event log; a torn final line is ignored.
pub fn read_events(path: &Path) -> Result<Vec<LedgerEvent>, AnnotateError> {
    let f = File::open(path).map_err(|source| AnnotateError::Io { path: path.to_path_buf(), source })?;
    let mut out = Vec::new();
    for (i, line) in BufReader::new(f).lines().enumerate() {
        let line = line.map_err(|source| AnnotateError::Io { path: path.to_path_buf(), source })?;
        if line.trim().is_empty() {
            continue;
        }
        match serde_json::from_str(&line) {
            Ok(e) => out.push(e),
            Err(e) if e.is_eof() => break,
            Err(e) => return Err(AnnotateError::Parse { line: i + 1, message: e.to_string() }),
        }
    }
    Ok(out)
}
