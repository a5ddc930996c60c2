use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::aba::{run_aba_batch, AbaClients, AbaRecord};
use super::agreement::cohen_kappa;
use super::ledger::LedgerEvent;
use super::prompts::PromptSet;
use super::AnnotateError;
use crate::corpus::Sentence;
use crate::interpersonal::Task;

pub const CALIBRATION_SAMPLE: usize = 20;
pub const CALIBRATION_KAPPA: f64 = 0.6;
pub const CALIBRATION_WINDOW: usize = 3;

#[derive(Debug, Clone)]
pub struct CalibrationRound {
    pub kappa: f64,
    pub transcript: Vec<AbaRecord>,
    pub events: Vec<LedgerEvent>,
    pub warnings: Vec<String>,
}

/// Labels the sample once and scores the final labels against human labels.
pub fn calibration_round(
    sample: &[Sentence],
    human_labels: &[String],
    task: Task,
    clients: &AbaClients,
    prompts: &PromptSet,
) -> Result<CalibrationRound, AnnotateError> {
    if sample.len() != human_labels.len() {
        return Err(AnnotateError::Contract(format!(
            "{} sentences but {} human labels",
            sample.len(),
            human_labels.len()
        )));
    }
    let mut warnings = Vec::new();
    if sample.len() != CALIBRATION_SAMPLE {
        warnings.push(format!("calibration sample has {} sentences, expected {CALIBRATION_SAMPLE}", sample.len()));
    }
    let human: Vec<&str> = human_labels
        .iter()
        .map(|l| task.canonical(l).map_err(|e| AnnotateError::Contract(e.to_string())))
        .collect::<Result<_, _>>()?;
    let mut events = Vec::new();
    let transcript = run_aba_batch(sample, task, clients, prompts, &mut events)
        .ok_or_else(|| AnnotateError::Contract("calibration batch failed validation after retries".into()))?;
    let model: Vec<&str> = transcript.iter().map(AbaRecord::final_label).collect();
    let kappa = cohen_kappa(&human, &model)?;
    Ok(CalibrationRound { kappa, transcript, events, warnings })
}

/// True once the mean kappa of the latest three rounds exceeds 0.6.
pub fn calibration_converged(history: &[f64]) -> bool {
    if history.len() < CALIBRATION_WINDOW {
        return false;
    }
    let tail = &history[history.len() - CALIBRATION_WINDOW..];
    tail.iter().sum::<f64>() / CALIBRATION_WINDOW as f64 > CALIBRATION_KAPPA
}

/// Seeded draws without replacement across rounds.
#[derive(Debug, Clone)]
pub struct CalibrationSampler<T> {
    pool: Vec<T>,
    cursor: usize,
}

impl<T: Clone> CalibrationSampler<T> {
    pub fn new(mut pool: Vec<T>, seed: u64) -> Self {
        pool.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
        CalibrationSampler { pool, cursor: 0 }
    }

    pub fn remaining(&self) -> usize {
        self.pool.len() - self.cursor
    }

    /// The next `n` unseen items, or `None` when fewer remain.
    pub fn draw(&mut self, n: usize) -> Option<Vec<T>> {
        if self.remaining() < n {
            return None;
        }
        let out = self.pool[self.cursor..self.cursor + n].to_vec();
        self.cursor += n;
        Some(out)
    }
}

#[cfg(test)]
mod tests {
    use std::collections::{HashMap, HashSet};
    use std::sync::Arc;

    use super::*;
    use crate::annotate::client::LlmClient;
    use crate::annotate::mock::{LabelRule, MockLlm};

    fn sample(n: u32) -> (Vec<Sentence>, Vec<String>) {
        let s: Vec<Sentence> = (1..=n)
            .map(|i| Sentence { writing_id: format!("w{i}"), sentence_id: 1, text: format!("pilot sentence {i}") })
            .collect();
        let labels = (0..n).map(|i| Task::Emotion.categories()[i as usize % 8].to_string()).collect();
        (s, labels)
    }

    fn clients(m: MockLlm) -> AbaClients {
        let m: Arc<dyn LlmClient> = Arc::new(m.all_agree());
        AbaClients { agent_a: m.clone(), agent_b: m, max_retries: 3 }
    }

    #[test]
    fn echoing_model_scores_one() {
        let (s, human) = sample(20);
        let table: HashMap<String, String> = s.iter().map(|x| x.text.clone()).zip(human.iter().cloned()).collect();
        let c = clients(MockLlm::new(Task::Emotion, 0).with_labels(LabelRule::Lookup(table)));
        let r = calibration_round(&s, &human, Task::Emotion, &c, &PromptSet::builtin(Task::Emotion)).unwrap();
        assert_eq!(r.kappa, 1.0);
        assert!(r.warnings.is_empty());
    }

    #[test]
    fn constant_model_and_size_warning() {
        let (s, human) = sample(12);
        let c = clients(MockLlm::new(Task::Emotion, 0).with_labels(LabelRule::Fixed("joy".into())));
        let r = calibration_round(&s, &human, Task::Emotion, &c, &PromptSet::builtin(Task::Emotion)).unwrap();
        assert!(r.kappa <= 0.0);
        assert_eq!(r.warnings.len(), 1);
    }

    #[test]
    fn stop_rule() {
        assert!(!calibration_converged(&[0.9, 0.9]));
        assert!(calibration_converged(&[0.2, 0.7, 0.6, 0.65]));
        assert!(!calibration_converged(&[0.9, 0.6, 0.6, 0.6]));
    }

    #[test]
    fn sampler_never_repeats() {
        let mut s = CalibrationSampler::new((0..65).collect::<Vec<u32>>(), 9);
        let mut seen = HashSet::new();
        while let Some(batch) = s.draw(20) {
            for x in batch {
                assert!(seen.insert(x));
            }
        }
        assert_eq!(seen.len(), 60);
        assert_eq!(s.remaining(), 5);
    }
}
