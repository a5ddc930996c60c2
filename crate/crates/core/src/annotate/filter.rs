use serde::{Deserialize, Serialize};

use super::aba::call_validated;
use super::client::{LlmClient, Role};
use super::ledger::LedgerEvent;
use super::tsv::{sanitize_cell, Schema};
use super::types::SentenceKey;
use crate::corpus::Sentence;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FilterDecision {
    pub key: SentenceKey,
    pub pass: bool,
}

/// Every input sentence lands in exactly one of the three lists. Sentences whose
/// calls keep failing are `pending` for a later run, never rejected.
#[derive(Debug, Default, Clone, PartialEq, Eq)]
pub struct FilterPartition {
    pub pass: Vec<Sentence>,
    pub reject: Vec<Sentence>,
    pub pending: Vec<Sentence>,
    pub decisions: Vec<FilterDecision>,
}

fn filter_batch(
    batch: &[Sentence],
    client: &dyn LlmClient,
    prompt: &str,
    max_retries: u32,
    out: &mut FilterPartition,
    events: &mut Vec<LedgerEvent>,
) {
    let ids: Vec<String> = batch.iter().map(|s| s.sentence_id.to_string()).collect();
    let payload = batch
        .iter()
        .zip(&ids)
        .map(|(s, id)| format!("{id}\t{}", sanitize_cell(&s.text)))
        .collect::<Vec<_>>()
        .join("\n");
    let first = SentenceKey::of(&batch[0]);
    match call_validated(client, Role::Filter, "filter", prompt, payload, &ids, &first, &Schema::filter(), max_retries, events) {
        Some(rows) => {
            for (s, row) in batch.iter().zip(rows) {
                let pass = row.field(1) == "yes";
                out.decisions.push(FilterDecision { key: SentenceKey::of(s), pass });
                if pass {
                    out.pass.push(s.clone());
                } else {
                    out.reject.push(s.clone());
                }
            }
        }
        None if batch.len() > 1 => {
            let mid = batch.len().div_ceil(2);
            events.push(LedgerEvent::Split { size: batch.len(), into: [mid, batch.len() - mid], first_key: first });
            filter_batch(&batch[..mid], client, prompt, max_retries, out, events);
            filter_batch(&batch[mid..], client, prompt, max_retries, out, events);
        }
        None => out.pending.push(batch[0].clone()),
    }
}

/// Binary relevance decision for coarse-filtered sentences, in batches.
pub fn relevance_filter(
    sentences: &[Sentence],
    client: &dyn LlmClient,
    prompt: &str,
    batch_size: usize,
    max_retries: u32,
    events: &mut Vec<LedgerEvent>,
) -> FilterPartition {
    let mut out = FilterPartition::default();
    for batch in sentences.chunks(batch_size.max(1)) {
        filter_batch(batch, client, prompt, max_retries, &mut out, events);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::annotate::mock::MockLlm;
    use crate::interpersonal::Task;

    fn sentences(n: u32) -> Vec<Sentence> {
        (1..=n).map(|i| Sentence { writing_id: "w".into(), sentence_id: i, text: format!("text {i}") }).collect()
    }

    #[test]
    fn empty_input() {
        let m = MockLlm::new(Task::Emotion, 0);
        let p = relevance_filter(&[], &m, "p", 30, 3, &mut Vec::new());
        assert_eq!(p, FilterPartition::default());
        assert_eq!(m.calls(), 0);
    }

    #[test]
    fn pass_all() {
        let m = MockLlm::new(Task::Emotion, 0);
        let input = sentences(12);
        let p = relevance_filter(&input, &m, "p", 5, 3, &mut Vec::new());
        assert_eq!(p.pass, input);
        assert!(p.reject.is_empty() && p.pending.is_empty());
    }

    #[test]
    fn two_transient_failures_then_success() {
        let m = MockLlm::new(Task::Emotion, 0).with_reject_rate(0.5).fail_next(2);
        let input = sentences(3);
        let mut events = Vec::new();
        let p = relevance_filter(&input, &m, "p", 30, 3, &mut events);
        assert_eq!(p.pass.len() + p.reject.len(), 3);
        assert!(p.pending.is_empty());
        assert_eq!(events.iter().filter(|e| matches!(e, LedgerEvent::Retry { .. })).count(), 2);
    }

    #[test]
    fn persistent_failure_goes_pending() {
        let m = MockLlm::new(Task::Emotion, 0).poison("text 2");
        let p = relevance_filter(&sentences(3), &m, "p", 30, 1, &mut Vec::new());
        assert_eq!(p.pending.len(), 1);
        assert_eq!(p.pending[0].sentence_id, 2);
        assert_eq!(p.pass.len(), 2);
    }
}
