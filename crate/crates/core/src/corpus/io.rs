//! JSONL corpus ingestion.
//!
//! A corpus file mixes three record kinds, one JSON object per line. The kind is
//! recognised by its discriminating field: `stage` marks a suggestion set, `grader`
//! marks a grade, anything else must be a draft.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use serde::de::DeserializeOwned;
use serde_json::Value;

use super::model::{EssayDraft, Grade, Grader, Phase, Stage, SuggestionSet};
use super::CorpusError;

/// Validated, cross-referenced corpus.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct CorpusBundle {
    pub drafts: Vec<EssayDraft>,
    pub suggestion_sets: Vec<SuggestionSet>,
    pub grades: Vec<Grade>,
    draft_index: HashMap<String, usize>,
}

/// Pre-draft and post-draft of one student on one task.
#[derive(Debug, Clone, Copy)]
pub struct DraftPair<'a> {
    pub pre: &'a EssayDraft,
    pub post: &'a EssayDraft,
}

impl CorpusBundle {
    pub fn new(
        drafts: Vec<EssayDraft>,
        suggestion_sets: Vec<SuggestionSet>,
        grades: Vec<Grade>,
    ) -> Result<Self, CorpusError> {
        let mut bundle = CorpusBundle {
            drafts,
            suggestion_sets,
            grades,
            draft_index: HashMap::new(),
        };
        bundle.validate()?;
        Ok(bundle)
    }

    fn validate(&mut self) -> Result<(), CorpusError> {
        self.draft_index.clear();
        let mut slots = HashSet::new();
        for (i, d) in self.drafts.iter().enumerate() {
            validate_draft(d)?;
            if self.draft_index.insert(d.writing_id.clone(), i).is_some() {
                return Err(CorpusError::Invariant(format!(
                    "duplicate writing_id {}",
                    d.writing_id
                )));
            }
            if !slots.insert((d.student_id.as_str(), d.task_id.as_str(), d.phase)) {
                return Err(CorpusError::Invariant(format!(
                    "writing {}: student {} already has a {} draft for task {}",
                    d.writing_id, d.student_id, d.phase, d.task_id
                )));
            }
        }
        let mut set_slots = HashSet::new();
        for set in &self.suggestion_sets {
            validate_suggestion_set(set)?;
            if !self.draft_index.contains_key(&set.writing_id) {
                return Err(CorpusError::DanglingReference(set.writing_id.clone()));
            }
            if !set_slots.insert((set.writing_id.as_str(), set.stage)) {
                return Err(CorpusError::Invariant(format!(
                    "writing {}: duplicate {:?} suggestion set",
                    set.writing_id, set.stage
                )));
            }
        }
        for g in &self.grades {
            validate_grade(g)?;
            if !self.draft_index.contains_key(&g.writing_id) {
                return Err(CorpusError::DanglingReference(g.writing_id.clone()));
            }
        }
        Ok(())
    }

    pub fn is_empty(&self) -> bool {
        self.drafts.is_empty() && self.suggestion_sets.is_empty() && self.grades.is_empty()
    }

    pub fn draft(&self, writing_id: &str) -> Option<&EssayDraft> {
        self.draft_index.get(writing_id).map(|&i| &self.drafts[i])
    }

    pub fn suggestion_set(&self, writing_id: &str, stage: Stage) -> Option<&SuggestionSet> {
        self.suggestion_sets
            .iter()
            .find(|s| s.writing_id == writing_id && s.stage == stage)
    }

    pub fn grade(&self, writing_id: &str, grader: Grader) -> Option<f64> {
        self.grades
            .iter()
            .find(|g| g.writing_id == writing_id && g.grader == grader)
            .map(|g| g.value)
    }

    /// Complete pre/post pairs keyed by (student_id, task_id), in key order.
    pub fn pairs(&self) -> Vec<DraftPair<'_>> {
        let mut slots: BTreeMap<(&str, &str), (Option<&EssayDraft>, Option<&EssayDraft>)> =
            BTreeMap::new();
        for d in &self.drafts {
            let slot = slots
                .entry((d.student_id.as_str(), d.task_id.as_str()))
                .or_default();
            match d.phase {
                Phase::Pre => slot.0 = Some(d),
                Phase::Post => slot.1 = Some(d),
            }
        }
        slots
            .into_values()
            .filter_map(|slot| match slot {
                (Some(pre), Some(post)) => Some(DraftPair { pre, post }),
                _ => None,
            })
            .collect()
    }

    /// Keep only the drafts in `keep` (by writing_id), along with their grades and
    /// suggestion sets.
    pub fn retain_drafts(&self, keep: &HashSet<String>) -> CorpusBundle {
        let drafts = self
            .drafts
            .iter()
            .filter(|d| keep.contains(&d.writing_id))
            .cloned()
            .collect();
        let suggestion_sets = self
            .suggestion_sets
            .iter()
            .filter(|s| keep.contains(&s.writing_id))
            .cloned()
            .collect();
        let grades = self
            .grades
            .iter()
            .filter(|g| keep.contains(&g.writing_id))
            .cloned()
            .collect();
        CorpusBundle::new(drafts, suggestion_sets, grades).expect("subset of a valid bundle")
    }

    /// Write drafts, then suggestion sets, then grades, one JSON object per line.
    pub fn write_jsonl<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        for d in &self.drafts {
            serde_json::to_writer(&mut out, d)?;
            out.write_all(b"\n")?;
        }
        for s in &self.suggestion_sets {
            serde_json::to_writer(&mut out, s)?;
            out.write_all(b"\n")?;
        }
        for g in &self.grades {
            serde_json::to_writer(&mut out, g)?;
            out.write_all(b"\n")?;
        }
        Ok(())
    }

    pub fn to_jsonl_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_jsonl(&mut buf).expect("writing to a Vec cannot fail");
        String::from_utf8(buf).expect("serde_json emits UTF-8")
    }
}

/// How raw grade values are brought onto the `[0, 100]` scale while loading.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum GradeScale {
    /// Values are already on `[0, 100]`.
    #[default]
    Normalized,
    /// Values are on `[min, max]` and are mapped affinely.
    Raw { min: f64, max: f64 },
}

#[derive(Debug, Clone, Default)]
pub struct LoadOptions {
    pub grade_scale: GradeScale,
}

pub fn load_corpus(path: &Path) -> Result<CorpusBundle, CorpusError> {
    load_corpus_with(path, &LoadOptions::default())
}

pub fn load_corpus_with(path: &Path, options: &LoadOptions) -> Result<CorpusBundle, CorpusError> {
    let file = std::fs::File::open(path).map_err(|e| CorpusError::Io {
        path: path.display().to_string(),
        source: e,
    })?;
    read_corpus(BufReader::new(file), options)
}

pub fn read_corpus<R: BufRead>(reader: R, options: &LoadOptions) -> Result<CorpusBundle, CorpusError> {
    let mut drafts = Vec::new();
    let mut sets = Vec::new();
    let mut grades = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line_no = i + 1;
        let line = line.map_err(|e| CorpusError::Parse {
            line: line_no,
            message: e.to_string(),
        })?;
        if line.trim().is_empty() {
            continue;
        }
        let value: Value = serde_json::from_str(&line).map_err(|e| CorpusError::Parse {
            line: line_no,
            message: e.to_string(),
        })?;
        let Some(obj) = value.as_object() else {
            return Err(CorpusError::Parse {
                line: line_no,
                message: "record is not a JSON object".into(),
            });
        };
        if obj.contains_key("stage") {
            sets.push(decode::<SuggestionSet>(value, line_no)?);
        } else if obj.contains_key("grader") {
            let mut grade = decode::<Grade>(value, line_no)?;
            if let GradeScale::Raw { min, max } = options.grade_scale {
                grade.value = super::normalize_grade(grade.value, min, max).map_err(|e| {
                    CorpusError::Parse {
                        line: line_no,
                        message: e.to_string(),
                    }
                })?;
            }
            validate_grade(&grade).map_err(|e| at_line(e, line_no))?;
            grades.push(grade);
        } else {
            let draft = decode::<EssayDraft>(value, line_no)?;
            validate_draft(&draft).map_err(|e| at_line(e, line_no))?;
            drafts.push(draft);
        }
    }
    CorpusBundle::new(drafts, sets, grades)
}

fn decode<T: DeserializeOwned>(value: Value, line: usize) -> Result<T, CorpusError> {
    serde_json::from_value(value).map_err(|e| CorpusError::Parse {
        line,
        message: e.to_string(),
    })
}

fn at_line(e: CorpusError, line: usize) -> CorpusError {
    match e {
        CorpusError::Invariant(m) => CorpusError::Invariant(format!("line {line}: {m}")),
        other => other,
    }
}

fn validate_draft(d: &EssayDraft) -> Result<(), CorpusError> {
    for (name, v) in [
        ("writing_id", &d.writing_id),
        ("student_id", &d.student_id),
        ("teacher_id", &d.teacher_id),
        ("task_id", &d.task_id),
    ] {
        if v.trim().is_empty() {
            return Err(CorpusError::Invariant(format!("draft has empty {name}")));
        }
    }
    if d.text.trim().is_empty() {
        return Err(CorpusError::Invariant(format!(
            "writing {}: text is empty",
            d.writing_id
        )));
    }
    Ok(())
}

fn validate_grade(g: &Grade) -> Result<(), CorpusError> {
    if !(0.0..=100.0).contains(&g.value) {
        return Err(CorpusError::Invariant(format!(
            "writing {}: {} {} grade {} outside [0, 100]",
            g.writing_id, g.grader, g.phase, g.value
        )));
    }
    Ok(())
}

fn validate_suggestion_set(set: &SuggestionSet) -> Result<(), CorpusError> {
    let mut seen = HashSet::new();
    for s in &set.suggestions {
        if !seen.insert(s.suggestion_id.as_str()) {
            return Err(CorpusError::Invariant(format!(
                "writing {}: duplicate suggestion_id {}",
                set.writing_id, s.suggestion_id
            )));
        }
        if s.text.trim().is_empty() {
            return Err(CorpusError::Invariant(format!(
                "writing {}: suggestion {} has empty text",
                set.writing_id, s.suggestion_id
            )));
        }
    }
    Ok(())
}
