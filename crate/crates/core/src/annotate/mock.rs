use std::collections::{HashMap, HashSet, VecDeque};
use std::sync::atomic::{AtomicU32, AtomicU64, Ordering};
use std::sync::Mutex;

use super::client::{LlmClient, LlmError, LlmRequest, Role};
use crate::embed::fnv1a;
use crate::interpersonal::Task;

/// How a mock picks its first label.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LabelRule {
    /// From a hash of the sentence text.
    Hashed,
    /// Always the same label.
    Fixed(String),
    /// From a text-to-label table, hashed for unknown texts.
    Lookup(HashMap<String, String>),
}

/// Which multi-sentence batches come back malformed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FailureMode {
    Never,
    /// A deterministic fraction of distinct multi-sentence payloads.
    Rate(f64),
    /// Every payload with more than one sentence.
    AnyMulti,
}

/// Deterministic stand-in for every model role. Answers depend only on the seed,
/// the role and the sentence text, never on batch composition, so reruns and
/// resumed runs give identical labels.
#[derive(Debug)]
pub struct MockLlm {
    task: Task,
    seed: u64,
    label_rule: LabelRule,
    failure: FailureMode,
    all_agree: bool,
    reject_rate: f64,
    poisoned: HashSet<String>,
    transient: AtomicU32,
    calls: AtomicU64,
}

impl MockLlm {
    pub fn new(task: Task, seed: u64) -> Self {
        MockLlm {
            task,
            seed,
            label_rule: LabelRule::Hashed,
            failure: FailureMode::Never,
            all_agree: false,
            reject_rate: 0.0,
            poisoned: HashSet::new(),
            transient: AtomicU32::new(0),
            calls: AtomicU64::new(0),
        }
    }

    pub fn with_labels(mut self, rule: LabelRule) -> Self {
        self.label_rule = rule;
        self
    }

    pub fn with_failures(mut self, mode: FailureMode) -> Self {
        self.failure = mode;
        self
    }

    /// The reviewer always agrees and the final label repeats the first.
    pub fn all_agree(mut self) -> Self {
        self.all_agree = true;
        self
    }

    /// Fraction of sentences the relevance filter rejects.
    pub fn with_reject_rate(mut self, rate: f64) -> Self {
        self.reject_rate = rate;
        self
    }

    /// Any payload containing this text is answered malformed.
    pub fn poison(mut self, text: impl Into<String>) -> Self {
        self.poisoned.insert(text.into());
        self
    }

    /// The next `n` calls fail at the transport level.
    pub fn fail_next(self, n: u32) -> Self {
        self.transient.store(n, Ordering::SeqCst);
        self
    }

    pub fn calls(&self) -> u64 {
        self.calls.load(Ordering::SeqCst)
    }

    fn hash(&self, parts: &[&[u8]]) -> u64 {
        fnv1a(self.seed, parts)
    }

    fn first_label(&self, text: &str) -> String {
        let cats = self.task.categories();
        let hashed = || cats[(self.hash(&[b"a1", text.as_bytes()]) % cats.len() as u64) as usize].to_string();
        match &self.label_rule {
            LabelRule::Hashed => hashed(),
            LabelRule::Fixed(l) => l.clone(),
            LabelRule::Lookup(m) => m.get(text).cloned().unwrap_or_else(hashed),
        }
    }

    fn confidence(&self, stage: &[u8], text: &str) -> String {
        format!("0.{:02}", 50 + self.hash(&[stage, text.as_bytes()]) % 50)
    }

    fn answer_row(&self, role: Role, cells: &[&str]) -> String {
        let (id, text) = (cells[0], cells.get(1).copied().unwrap_or(""));
        match role {
            Role::Filter => {
                let draw = (self.hash(&[b"filter", text.as_bytes()]) % 10_000) as f64 / 10_000.0;
                format!("{id}\t{}", if draw < self.reject_rate { "no" } else { "yes" })
            }
            Role::AgentB => {
                let given = cells.get(2).copied().unwrap_or("");
                let agree = self.all_agree || self.hash(&[b"b", text.as_bytes()]) % 10 != 0;
                if agree {
                    format!("{id}\ty\tthe label fits\t{given}")
                } else {
                    let cats = self.task.categories();
                    let i = self.task.category_index(given).unwrap_or(0);
                    format!("{id}\tn\tanother reading fits better\t{}", cats[(i + 1) % cats.len()])
                }
            }
            Role::AgentA if cells.len() >= 8 => {
                format!("{id}\t{}\t{}\tsettled after review", cells[7], self.confidence(b"a2", text))
            }
            Role::AgentA => {
                format!("{id}\t{}\t{}\tcue words in the sentence", self.first_label(text), self.confidence(b"a1", text))
            }
        }
    }
}

impl LlmClient for MockLlm {
    fn call(&self, request: &LlmRequest) -> Result<String, LlmError> {
        self.calls.fetch_add(1, Ordering::SeqCst);
        if self
            .transient
            .fetch_update(Ordering::SeqCst, Ordering::SeqCst, |n| n.checked_sub(1))
            .is_ok()
        {
            return Err(LlmError("injected transport failure".into()));
        }
        let rows: Vec<Vec<&str>> = request
            .payload_tsv
            .lines()
            .filter(|l| !l.is_empty())
            .map(|l| l.split('\t').collect())
            .collect();
        let mut out: Vec<String> = rows.iter().map(|cells| self.answer_row(request.role, cells)).collect();
        let poisoned = rows.iter().any(|c| c.get(1).is_some_and(|t| self.poisoned.contains(*t)));
        let injected = rows.len() > 1
            && match self.failure {
                FailureMode::Never => false,
                FailureMode::AnyMulti => true,
                FailureMode::Rate(r) => {
                    let role = format!("{:?}", request.role);
                    let h = self.hash(&[role.as_bytes(), request.payload_tsv.as_bytes()]);
                    ((h % 10_000) as f64) < r * 10_000.0
                }
            };
        if poisoned || injected {
            // a truncated answer, as from a cut-off generation
            out.pop();
        }
        Ok(out.join("\n"))
    }
}

/// Replays queued answers in order and records every request.
#[derive(Debug, Default)]
pub struct ScriptedLlm {
    replies: Mutex<VecDeque<Result<String, LlmError>>>,
    requests: Mutex<Vec<LlmRequest>>,
}

impl ScriptedLlm {
    pub fn new(replies: impl IntoIterator<Item = Result<String, LlmError>>) -> Self {
        ScriptedLlm { replies: Mutex::new(replies.into_iter().collect()), requests: Mutex::default() }
    }

    pub fn ok(replies: &[&str]) -> Self {
        Self::new(replies.iter().map(|r| Ok(r.to_string())))
    }

    pub fn requests(&self) -> Vec<LlmRequest> {
        self.requests.lock().unwrap().clone()
    }
}

impl LlmClient for ScriptedLlm {
    fn call(&self, request: &LlmRequest) -> Result<String, LlmError> {
        self.requests.lock().unwrap().push(request.clone());
        self.replies
            .lock()
            .unwrap()
            .pop_front()
            .unwrap_or_else(|| Err(LlmError("script exhausted".into())))
    }
}
