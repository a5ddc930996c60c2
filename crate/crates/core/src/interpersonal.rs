//! Writing-level emotion and moral label distributions and their Shannon entropy.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum InterpersonalError {
    #[error("label {label:?} is not a {task} category")]
    UnknownLabel { label: String, task: Task },
    #[error("writing {0}: total sentence count is zero")]
    ZeroTotal(String),
    #[error("writing {writing_id}: {labeled} labels exceed {total} sentences")]
    TooManyLabels {
        writing_id: String,
        labeled: usize,
        total: usize,
    },
    #[error("entropy base must be greater than 1, got {0}")]
    InvalidBase(f64),
}

/// Annotation task; fixes the closed label set and its canonical order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Task {
    Emotion,
    Moral,
}

/// Plutchik's eight primary emotions, canonical order.
pub const EMOTIONS: [&str; 8] = [
    "anger",
    "anticipation",
    "disgust",
    "fear",
    "joy",
    "sadness",
    "surprise",
    "trust",
];

/// Moral foundations: five virtues, then their five vices in matching order.
pub const MORALS: [&str; 10] = [
    "care",
    "fairness",
    "loyalty",
    "authority",
    "sanctity",
    "harm",
    "cheating",
    "betrayal",
    "subversion",
    "degradation",
];

/// Emotions grouped by motivational direction for reporting.
pub const APPROACH_EMOTIONS: [&str; 4] = ["anticipation", "joy", "trust", "fear"];
pub const AVOIDANCE_EMOTIONS: [&str; 4] = ["surprise", "sadness", "disgust", "anger"];

impl Task {
    pub fn categories(self) -> &'static [&'static str] {
        match self {
            Task::Emotion => &EMOTIONS,
            Task::Moral => &MORALS,
        }
    }

    /// Canonical index of `label`. Moral labels are also accepted in the
    /// `<foundation>_pos` / `<foundation>_neg` spelling (`care_neg` is `harm`).
    pub fn category_index(self, label: &str) -> Option<usize> {
        let label = label.trim().to_ascii_lowercase();
        if let Some(i) = self.categories().iter().position(|c| *c == label) {
            return Some(i);
        }
        if self == Task::Moral {
            if let Some((base, polarity)) = label.rsplit_once('_') {
                let i = MORALS[..5].iter().position(|c| *c == base)?;
                return match polarity {
                    "pos" => Some(i),
                    "neg" => Some(i + 5),
                    _ => None,
                };
            }
        }
        None
    }

    /// Canonical spelling of `label`, or an error if it is outside the closed set.
    pub fn canonical(self, label: &str) -> Result<&'static str, InterpersonalError> {
        self.category_index(label)
            .map(|i| self.categories()[i])
            .ok_or_else(|| InterpersonalError::UnknownLabel {
                label: label.to_string(),
                task: self,
            })
    }
}

impl fmt::Display for Task {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Task::Emotion => "emotion",
            Task::Moral => "moral",
        })
    }
}

impl std::str::FromStr for Task {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "emotion" => Ok(Task::Emotion),
            "moral" => Ok(Task::Moral),
            other => Err(format!("unknown task {other:?}")),
        }
    }
}

/// Category counts of one writing over its total sentence count.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CategoryDistribution {
    pub writing_id: String,
    pub task: Task,
    pub counts: Vec<u64>,
    /// Total sentences in the writing, labelled or not.
    pub n: u64,
}

impl CategoryDistribution {
    pub fn proportions(&self) -> Vec<f64> {
        self.counts
            .iter()
            .map(|&c| c as f64 / self.n as f64)
            .collect()
    }

    pub fn labeled(&self) -> u64 {
        self.counts.iter().sum()
    }

    /// Add the counts of another annotation set of the same writing.
    pub fn merge(&mut self, other: &CategoryDistribution) {
        assert_eq!(self.task, other.task, "merging distributions of different tasks");
        for (a, b) in self.counts.iter_mut().zip(&other.counts) {
            *a += b;
        }
    }
}

pub fn aggregate_labels<S: AsRef<str>>(
    writing_id: &str,
    labels: &[S],
    n_total: usize,
    task: Task,
) -> Result<CategoryDistribution, InterpersonalError> {
    if n_total == 0 {
        return Err(InterpersonalError::ZeroTotal(writing_id.to_string()));
    }
    if labels.len() > n_total {
        return Err(InterpersonalError::TooManyLabels {
            writing_id: writing_id.to_string(),
            labeled: labels.len(),
            total: n_total,
        });
    }
    let mut counts = vec![0u64; task.categories().len()];
    for label in labels {
        let i = task
            .category_index(label.as_ref())
            .ok_or_else(|| InterpersonalError::UnknownLabel {
                label: label.as_ref().to_string(),
                task,
            })?;
        counts[i] += 1;
    }
    Ok(CategoryDistribution {
        writing_id: writing_id.to_string(),
        task,
        counts,
        n: n_total as u64,
    })
}

/// `-Σ p log_base p` over categories with `p = count / n > 0`, without renormalising
/// when the labelled mass is below one.
pub fn spectrum_entropy(dist: &CategoryDistribution, base: f64) -> Result<f64, InterpersonalError> {
    if !(base > 1.0) || !base.is_finite() {
        return Err(InterpersonalError::InvalidBase(base));
    }
    let ln_base = base.ln();
    let h: f64 = dist
        .counts
        .iter()
        .filter(|&&c| c > 0)
        .map(|&c| {
            let p = c as f64 / dist.n as f64;
            -p * p.ln() / ln_base
        })
        .sum();
    Ok(h.max(0.0))
}

/// JSONL output row.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistributionRow {
    pub writing_id: String,
    pub task: Task,
    pub counts: Vec<u64>,
    pub n: u64,
    pub entropy: f64,
}

impl DistributionRow {
    pub fn new(dist: &CategoryDistribution, base: f64) -> Result<Self, InterpersonalError> {
        Ok(DistributionRow {
            writing_id: dist.writing_id.clone(),
            task: dist.task,
            counts: dist.counts.clone(),
            n: dist.n,
            entropy: spectrum_entropy(dist, base)?,
        })
    }
}
