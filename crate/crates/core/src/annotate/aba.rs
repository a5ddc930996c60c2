use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::client::{LlmClient, LlmRequest, Role};
use super::completeness::{BatchOutcome, BatchRunner};
use super::ledger::LedgerEvent;
use super::prompts::PromptSet;
use super::tsv::{sanitize_cell, validate_tsv, Schema, TsvRow};
use super::types::{Confidence, SentenceKey};
use crate::corpus::Sentence;
use crate::interpersonal::Task;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Agree {
    Y,
    N,
}

/// A labelling decision with its confidence and justification.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Judgement {
    pub label: String,
    pub confidence: Confidence,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Critique {
    pub agree: Agree,
    pub critique: String,
    pub suggested_label: String,
}

/// The three stages for one sentence; the decision is `a2`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AbaRecord {
    pub key: SentenceKey,
    pub task: Task,
    pub a1: Judgement,
    pub b: Critique,
    pub a2: Judgement,
}

impl AbaRecord {
    pub fn final_label(&self) -> &str {
        &self.a2.label
    }
}

/// Agents and retry policy for the three-stage loop.
#[derive(Clone)]
pub struct AbaClients {
    pub agent_a: Arc<dyn LlmClient>,
    pub agent_b: Arc<dyn LlmClient>,
    pub max_retries: u32,
}

/// Calls `client` until its answer validates, at most `1 + max_retries` times.
#[allow(clippy::too_many_arguments)]
pub fn call_validated(
    client: &dyn LlmClient,
    role: Role,
    stage: &str,
    prompt: &str,
    payload_tsv: String,
    ids: &[String],
    first_key: &SentenceKey,
    schema: &Schema,
    max_retries: u32,
    events: &mut Vec<LedgerEvent>,
) -> Option<Vec<TsvRow>> {
    let request = LlmRequest { role, prompt: prompt.to_string(), payload_tsv };
    let attempts = max_retries + 1;
    let size = ids.len();
    for attempt in 1..=attempts {
        match client.call(&request) {
            Err(e) => events.push(LedgerEvent::CallError {
                stage: stage.into(),
                size,
                first_key: first_key.clone(),
                attempt,
                message: e.0,
            }),
            Ok(raw) => match validate_tsv(&raw, ids, schema) {
                Ok(rows) => return Some(rows),
                Err(violations) => events.push(LedgerEvent::ValidationFailure {
                    stage: stage.into(),
                    size,
                    first_key: first_key.clone(),
                    attempt,
                    violations,
                }),
            },
        }
        if attempt < attempts {
            events.push(LedgerEvent::Retry { stage: stage.into(), size, first_key: first_key.clone(), attempt });
        }
    }
    events.push(LedgerEvent::RetryExhausted { stage: stage.into(), size, first_key: first_key.clone() });
    None
}

fn payload(rows: impl Iterator<Item = Vec<String>>) -> String {
    rows.map(|cells| cells.iter().map(|c| sanitize_cell(c)).collect::<Vec<_>>().join("\t"))
        .collect::<Vec<_>>()
        .join("\n")
}

/// Runs A1, B and A2 over one batch. `None` when any stage fails validation after
/// its retries; the events explain why.
pub fn run_aba_batch(
    batch: &[Sentence],
    task: Task,
    clients: &AbaClients,
    prompts: &PromptSet,
    events: &mut Vec<LedgerEvent>,
) -> Option<Vec<AbaRecord>> {
    let first = SentenceKey::of(batch.first()?);
    let ids: Vec<String> = batch.iter().map(|s| s.sentence_id.to_string()).collect();

    let a1_payload = payload(batch.iter().zip(&ids).map(|(s, id)| vec![id.clone(), s.text.clone()]));
    let a1 = call_validated(
        clients.agent_a.as_ref(), Role::AgentA, "a1", &prompts.a1, a1_payload, &ids, &first,
        &Schema::a1(task), clients.max_retries, events,
    )?;

    let b_payload = payload(batch.iter().zip(&a1).map(|(s, r)| {
        let mut cells = vec![r.field(0).to_string(), s.text.clone()];
        cells.extend(r.fields[1..].iter().cloned());
        cells
    }));
    let b = call_validated(
        clients.agent_b.as_ref(), Role::AgentB, "b", &prompts.b, b_payload, &ids, &first,
        &Schema::b(task), clients.max_retries, events,
    )?;

    let a2_payload = payload(batch.iter().zip(a1.iter().zip(&b)).map(|(s, (r1, rb))| {
        let mut cells = vec![r1.field(0).to_string(), s.text.clone()];
        cells.extend(r1.fields[1..].iter().cloned());
        cells.extend(rb.fields[1..].iter().cloned());
        cells
    }));
    let a2 = call_validated(
        clients.agent_a.as_ref(), Role::AgentA, "a2", &prompts.a2, a2_payload, &ids, &first,
        &Schema::a2(task), clients.max_retries, events,
    )?;

    Some(
        batch
            .iter()
            .zip(a1.iter().zip(b.iter().zip(&a2)))
            .map(|(s, (r1, (rb, r2)))| AbaRecord {
                key: SentenceKey::of(s),
                task,
                a1: Judgement { label: r1.field(1).into(), confidence: r1.confidence(2), reason: r1.field(3).into() },
                b: Critique {
                    agree: if rb.field(1) == "y" { Agree::Y } else { Agree::N },
                    critique: rb.field(2).into(),
                    suggested_label: rb.field(3).into(),
                },
                a2: Judgement { label: r2.field(1).into(), confidence: r2.confidence(2), reason: r2.field(3).into() },
            })
            .collect(),
    )
}

/// [`BatchRunner`] over the three-stage loop.
pub struct AbaRunner {
    pub task: Task,
    pub clients: AbaClients,
    pub prompts: PromptSet,
}

impl BatchRunner for AbaRunner {
    fn run(&self, batch: &[Sentence]) -> BatchOutcome {
        let mut events = Vec::new();
        let records = run_aba_batch(batch, self.task, &self.clients, &self.prompts, &mut events);
        BatchOutcome { records, events }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::annotate::mock::{MockLlm, ScriptedLlm};

    fn sentence(id: u32, text: &str) -> Sentence {
        Sentence { writing_id: "w1".into(), sentence_id: id, text: text.into() }
    }

    fn clients(a: Arc<dyn LlmClient>, b: Arc<dyn LlmClient>) -> AbaClients {
        AbaClients { agent_a: a, agent_b: b, max_retries: 3 }
    }

    #[test]
    fn scripted_transcript() {
        let a = Arc::new(ScriptedLlm::ok(&[
            "1\tjoy\t0.80\tbright wording",
            "1\ttrust\t0.74\treliance outweighs delight",
        ]));
        let b = Arc::new(ScriptedLlm::ok(&["1\tn\tthe sentence is about relying on someone\ttrust"]));
        let mut events = Vec::new();
        let recs = run_aba_batch(
            &[sentence(1, "I knew she would help me.")],
            Task::Emotion,
            &clients(a.clone(), b.clone()),
            &PromptSet::builtin(Task::Emotion),
            &mut events,
        )
        .unwrap();
        assert_eq!(recs[0].final_label(), "trust");
        assert_eq!(recs[0].a1.label, "joy");
        assert_eq!(recs[0].b.agree, Agree::N);
        assert_eq!(recs[0].a2.confidence.to_string(), "0.74");
        assert!(events.is_empty());
        assert_eq!(b.requests()[0].payload_tsv, "1\tI knew she would help me.\tjoy\t0.80\tbright wording");
        assert_eq!(a.requests()[1].payload_tsv.split('\t').count(), 8);
    }

    #[test]
    fn agreement_path_keeps_first_label() {
        let mock: Arc<dyn LlmClient> = Arc::new(MockLlm::new(Task::Emotion, 3).all_agree());
        let batch: Vec<Sentence> = (1..=5).map(|i| sentence(i, &format!("sentence number {i}"))).collect();
        let recs = run_aba_batch(&batch, Task::Emotion, &clients(mock.clone(), mock), &PromptSet::builtin(Task::Emotion), &mut Vec::new()).unwrap();
        for r in recs {
            assert_eq!(r.a1.label, r.a2.label);
            assert_eq!(r.b.suggested_label, r.a1.label);
        }
    }

    #[test]
    fn out_of_set_final_label_is_retried() {
        let a = Arc::new(ScriptedLlm::ok(&["1\tjoy\t0.80\tr", "1\tglee\t0.70\tr", "1\tjoy\t0.70\tr"]));
        let b = Arc::new(ScriptedLlm::ok(&["1\ty\tfine\tjoy"]));
        let mut events = Vec::new();
        let recs = run_aba_batch(&[sentence(1, "x")], Task::Emotion, &clients(a, b), &PromptSet::builtin(Task::Emotion), &mut events).unwrap();
        assert_eq!(recs[0].final_label(), "joy");
        assert!(matches!(&events[0], LedgerEvent::ValidationFailure { stage, .. } if stage == "a2"));
        assert!(matches!(&events[1], LedgerEvent::Retry { .. }));
    }

    #[test]
    fn exhausted_retries_fail_the_batch() {
        let a = Arc::new(ScriptedLlm::ok(&["bad", "bad", "bad", "bad"]));
        let b = Arc::new(ScriptedLlm::ok(&[]));
        let mut events = Vec::new();
        assert!(run_aba_batch(&[sentence(1, "x")], Task::Emotion, &clients(a, b), &PromptSet::builtin(Task::Emotion), &mut events).is_none());
        assert!(matches!(events.last(), Some(LedgerEvent::RetryExhausted { .. })));
        assert_eq!(events.iter().filter(|e| matches!(e, LedgerEvent::Retry { .. })).count(), 3);
    }
}
