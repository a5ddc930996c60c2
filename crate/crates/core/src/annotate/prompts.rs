use std::path::Path;

use super::AnnotateError;
use crate::interpersonal::Task;

const ANNOTATOR_INITIAL: &str = include_str!("../../resources/prompts/annotator_initial.txt");
const REVIEWER: &str = include_str!("../../resources/prompts/reviewer.txt");
const ANNOTATOR_FINAL: &str = include_str!("../../resources/prompts/annotator_final.txt");
const RELEVANCE: &str = include_str!("../../resources/prompts/relevance.txt");

pub const PROMPT_FILES: [&str; 4] = ["annotator_initial.txt", "reviewer.txt", "annotator_final.txt", "relevance.txt"];

/// Rendered instructions for every stage of one task.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PromptSet {
    pub a1: String,
    pub b: String,
    pub a2: String,
    pub filter: String,
}

fn render(template: &str, task: Task) -> String {
    template
        .replace("{task}", &task.to_string())
        .replace("{labels}", &task.categories().join(", "))
}

impl PromptSet {
    pub fn builtin(task: Task) -> Self {
        PromptSet {
            a1: render(ANNOTATOR_INITIAL, task),
            b: render(REVIEWER, task),
            a2: render(ANNOTATOR_FINAL, task),
            filter: render(RELEVANCE, task),
        }
    }

    /// Templates from a directory; files that are absent fall back to the built-ins.
    pub fn load(dir: &Path, task: Task) -> Result<Self, AnnotateError> {
        let read = |name: &str, fallback: &str| -> Result<String, AnnotateError> {
            let path = dir.join(name);
            if path.exists() {
                let t = std::fs::read_to_string(&path).map_err(|source| AnnotateError::Io { path: path.clone(), source })?;
                Ok(render(&t, task))
            } else {
                Ok(render(fallback, task))
            }
        };
        Ok(PromptSet {
            a1: read(PROMPT_FILES[0], ANNOTATOR_INITIAL)?,
            b: read(PROMPT_FILES[1], REVIEWER)?,
            a2: read(PROMPT_FILES[2], ANNOTATOR_FINAL)?,
            filter: read(PROMPT_FILES[3], RELEVANCE)?,
        })
    }
}
