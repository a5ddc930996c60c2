use serde::{Deserialize, Serialize};

use super::matching::OriginLabel;
use super::record::{EffortScenario, SuggestionOutcome, TeacherEffort, UptakeRecord};
use crate::sfl::SflDimension;
use crate::stats::{mann_whitney_u, wilcoxon_signed_rank, TestResult};

/// One row of the share/adoption summary. Percentages are `None` when undefined.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShareRow {
    pub label: String,
    pub n_l: usize,
    pub n_t: usize,
    pub share_l: Option<f64>,
    pub share_t: Option<f64>,
    pub share_test: Option<TestResult>,
    pub fur_l: Option<f64>,
    pub fur_t: Option<f64>,
    pub fur_test: Option<TestResult>,
}

fn pct(num: usize, den: usize) -> Option<f64> {
    (den > 0).then(|| 100.0 * num as f64 / den as f64)
}

fn share_row(label: &str, records: &[UptakeRecord], keep: impl Fn(&SuggestionOutcome) -> bool) -> ShareRow {
    let (mut n_l, mut n_t, mut a_l, mut a_t) = (0, 0, 0, 0);
    let mut paired_counts = Vec::new();
    let (mut fur_l_values, mut fur_t_values) = (Vec::new(), Vec::new());
    for r in records {
        let subset: Vec<&SuggestionOutcome> = r.per_suggestion.iter().filter(|s| keep(s)).collect();
        let l: Vec<_> = subset.iter().filter(|s| s.origin == OriginLabel::L).collect();
        let t: Vec<_> = subset.iter().filter(|s| s.origin == OriginLabel::T).collect();
        let (al, at) = (l.iter().filter(|s| s.adopted).count(), t.iter().filter(|s| s.adopted).count());
        if !subset.is_empty() {
            paired_counts.push((l.len() as f64, t.len() as f64));
        }
        if !l.is_empty() {
            fur_l_values.push(al as f64 / l.len() as f64);
        }
        if !t.is_empty() {
            fur_t_values.push(at as f64 / t.len() as f64);
        }
        n_l += l.len();
        n_t += t.len();
        a_l += al;
        a_t += at;
    }
    let share_test = wilcoxon_signed_rank(&paired_counts).ok();
    let fur_test = mann_whitney_u(&fur_l_values, &fur_t_values).ok();
    ShareRow {
        label: label.to_string(),
        n_l,
        n_t,
        share_l: pct(n_l, n_l + n_t),
        share_t: pct(n_t, n_l + n_t),
        share_test,
        fur_l: pct(a_l, n_l),
        fur_t: pct(a_t, n_t),
        fur_test,
    }
}

/// Per-dimension rows (a suggestion counts once in each of its dimensions), then an
/// overall row over every suggestion including unclassified ones.
pub fn share_table(records: &[UptakeRecord]) -> Vec<ShareRow> {
    let mut rows: Vec<ShareRow> = SflDimension::ALL
        .iter()
        .map(|&d| share_row(d.title(), records, |s| s.has_dimension(d)))
        .collect();
    rows.push(share_row("Overall", records, |_| true));
    rows
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Direction {
    #[serde(rename = "↑")]
    Up,
    #[serde(rename = "↓")]
    Down,
    #[serde(rename = "=")]
    Flat,
}

impl Direction {
    pub fn arrow(self) -> &'static str {
        match self {
            Direction::Up => "↑",
            Direction::Down => "↓",
            Direction::Flat => "=",
        }
    }
}

/// Mean effort per writing in each scenario and the creation-vs-modification test.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EffortRow {
    pub label: String,
    pub creation: Option<f64>,
    pub modification: Option<f64>,
    pub test: Option<TestResult>,
    pub direction: Option<Direction>,
}

fn mean(v: &[f64]) -> Option<f64> {
    (!v.is_empty()).then(|| v.iter().sum::<f64>() / v.len() as f64)
}

fn effort_row(label: &str, efforts: &[TeacherEffort], value: impl Fn(&TeacherEffort) -> f64) -> EffortRow {
    let pick = |sc: EffortScenario| -> Vec<f64> {
        efforts.iter().filter(|e| e.scenario == sc).map(&value).collect()
    };
    let (c, m) = (pick(EffortScenario::Creation), pick(EffortScenario::Modification));
    let (creation, modification) = (mean(&c), mean(&m));
    let direction = match (creation, modification) {
        (Some(a), Some(b)) if b > a => Some(Direction::Up),
        (Some(a), Some(b)) if b < a => Some(Direction::Down),
        (Some(_), Some(_)) => Some(Direction::Flat),
        _ => None,
    };
    EffortRow { label: label.to_string(), creation, modification, test: mann_whitney_u(&c, &m).ok(), direction }
}

pub fn effort_table(efforts: &[TeacherEffort]) -> Vec<EffortRow> {
    let mut rows: Vec<EffortRow> = SflDimension::ALL
        .iter()
        .map(|&d| effort_row(d.title(), efforts, |e| e.per_dimension[d.index()]))
        .collect();
    rows.push(effort_row("Overall", efforts, |e| e.total));
    rows
}
