use std::fmt;

use serde::{Deserialize, Serialize};

use super::types::Confidence;
use crate::interpersonal::Task;

/// The five output conditions, in order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ViolationClass {
    /// (i) row count differs from the batch size.
    RowCount,
    /// (ii) a row has the wrong number of fields.
    FieldCount,
    /// (iii) the id column does not follow the batch order.
    IdOrder,
    /// (iv) a label is outside its closed set.
    Label,
    /// (v) a confidence is outside `[0, 1]` or not written with two decimals.
    Confidence,
}

impl ViolationClass {
    pub fn numeral(self) -> &'static str {
        match self {
            ViolationClass::RowCount => "i",
            ViolationClass::FieldCount => "ii",
            ViolationClass::IdOrder => "iii",
            ViolationClass::Label => "iv",
            ViolationClass::Confidence => "v",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub class: ViolationClass,
    /// 1-based data row, when the violation is row-specific.
    pub row: Option<usize>,
    pub detail: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.row {
            Some(r) => write!(f, "({}) row {r}: {}", self.class.numeral(), self.detail),
            None => write!(f, "({}) {}", self.class.numeral(), self.detail),
        }
    }
}

/// Closed vocabulary for one column.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ColumnSet {
    Labels(Task),
    Agree,
    YesNo,
}

impl ColumnSet {
    /// Canonical spelling, or `None` if outside the set.
    pub fn canonical(self, v: &str) -> Option<&'static str> {
        match self {
            ColumnSet::Labels(task) => task.canonical(v).ok(),
            ColumnSet::Agree => match v.trim() {
                "y" | "Y" => Some("y"),
                "n" | "N" => Some("n"),
                _ => None,
            },
            ColumnSet::YesNo => match v.trim().to_ascii_lowercase().as_str() {
                "yes" => Some("yes"),
                "no" => Some("no"),
                _ => None,
            },
        }
    }
}

/// Shape of one stage's TSV output.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Schema {
    pub name: &'static str,
    pub fields: usize,
    pub closed: Vec<(usize, ColumnSet)>,
    pub confidence: Option<usize>,
}

impl Schema {
    /// `id, label, confidence, reason`
    pub fn a1(task: Task) -> Self {
        Schema { name: "a1", fields: 4, closed: vec![(1, ColumnSet::Labels(task))], confidence: Some(2) }
    }

    /// `id, agree, critique, suggested_label`
    pub fn b(task: Task) -> Self {
        Schema {
            name: "b",
            fields: 4,
            closed: vec![(1, ColumnSet::Agree), (3, ColumnSet::Labels(task))],
            confidence: None,
        }
    }

    /// `id, final_label, final_confidence, final_reason`
    pub fn a2(task: Task) -> Self {
        Schema { name: "a2", fields: 4, closed: vec![(1, ColumnSet::Labels(task))], confidence: Some(2) }
    }

    /// `id, yes|no`
    pub fn filter() -> Self {
        Schema { name: "filter", fields: 2, closed: vec![(1, ColumnSet::YesNo)], confidence: None }
    }
}

/// A validated row with closed-set columns in canonical spelling.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TsvRow {
    pub fields: Vec<String>,
}

impl TsvRow {
    pub fn field(&self, i: usize) -> &str {
        &self.fields[i]
    }

    pub fn confidence(&self, i: usize) -> Confidence {
        self.fields[i].parse().expect("validated confidence")
    }
}

/// Data lines of a raw model answer: trailing `\r` stripped, blank lines and a
/// leading header (first field `sentence_id`) dropped.
fn data_lines(raw: &str) -> Vec<&str> {
    let mut lines: Vec<&str> = raw
        .split('\n')
        .map(|l| l.strip_suffix('\r').unwrap_or(l))
        .filter(|l| !l.trim().is_empty())
        .collect();
    if lines.first().is_some_and(|l| l.split('\t').next().map(str::trim) == Some("sentence_id")) {
        lines.remove(0);
    }
    lines
}

/// Checks a raw answer against the batch ids (in order) and the schema. Every
/// violated condition is reported; the answer is accepted only with none.
pub fn validate_tsv(raw: &str, ids: &[String], schema: &Schema) -> Result<Vec<TsvRow>, Vec<Violation>> {
    let lines = data_lines(raw);
    let mut violations = Vec::new();
    if lines.len() != ids.len() {
        violations.push(Violation {
            class: ViolationClass::RowCount,
            row: None,
            detail: format!("{} rows for a batch of {}", lines.len(), ids.len()),
        });
    }
    let mut rows = Vec::with_capacity(lines.len());
    for (r, line) in lines.iter().enumerate() {
        let row = r + 1;
        let mut fields: Vec<String> = line.split('\t').map(|f| f.trim().to_string()).collect();
        if fields.len() != schema.fields {
            violations.push(Violation {
                class: ViolationClass::FieldCount,
                row: Some(row),
                detail: format!("{} fields, expected {}", fields.len(), schema.fields),
            });
            continue;
        }
        if let Some(expected) = ids.get(r) {
            if fields[0] != *expected {
                violations.push(Violation {
                    class: ViolationClass::IdOrder,
                    row: Some(row),
                    detail: format!("id {:?}, expected {:?}", fields[0], expected),
                });
            }
        }
        for &(col, set) in &schema.closed {
            match set.canonical(&fields[col]) {
                Some(c) => fields[col] = c.to_string(),
                None => violations.push(Violation {
                    class: ViolationClass::Label,
                    row: Some(row),
                    detail: format!("{:?} in column {} is outside the closed set", fields[col], col + 1),
                }),
            }
        }
        if let Some(col) = schema.confidence {
            if let Err(e) = fields[col].parse::<Confidence>() {
                violations.push(Violation { class: ViolationClass::Confidence, row: Some(row), detail: e });
            }
        }
        rows.push(TsvRow { fields });
    }
    if violations.is_empty() {
        Ok(rows)
    } else {
        Err(violations)
    }
}

/// Replaces characters that would break a TSV cell.
pub fn sanitize_cell(s: &str) -> String {
    s.chars().map(|c| if matches!(c, '\t' | '\n' | '\r') { ' ' } else { c }).collect()
}
