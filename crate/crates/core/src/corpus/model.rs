use std::fmt;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Phase {
    Pre,
    Post,
}

impl fmt::Display for Phase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Phase::Pre => "pre",
            Phase::Post => "post",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Grader {
    Llm,
    Teacher,
}

impl fmt::Display for Grader {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Grader::Llm => "llm",
            Grader::Teacher => "teacher",
        })
    }
}

/// Whether a suggestion set is the raw model output or the teacher-finalized one.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Stage {
    Initial,
    Final,
}

/// One student draft of one task.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EssayDraft {
    pub writing_id: String,
    pub student_id: String,
    pub teacher_id: String,
    pub task_id: String,
    pub school_id: String,
    pub phase: Phase,
    pub text: String,
    pub timestamp: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Sentence {
    pub writing_id: String,
    /// 1-based ordinal within the writing.
    pub sentence_id: u32,
    pub text: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Grade {
    pub writing_id: String,
    pub grader: Grader,
    pub phase: Phase,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Suggestion {
    pub suggestion_id: String,
    pub text: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub direction_tag: Option<String>,
}

impl Suggestion {
    pub fn new(id: impl Into<String>, text: impl Into<String>) -> Self {
        Suggestion {
            suggestion_id: id.into(),
            text: text.into(),
            direction_tag: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SuggestionSet {
    pub writing_id: String,
    pub stage: Stage,
    pub suggestions: Vec<Suggestion>,
}

impl SuggestionSet {
    pub fn len(&self) -> usize {
        self.suggestions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.suggestions.is_empty()
    }
}
