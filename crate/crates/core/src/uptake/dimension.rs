use std::fmt;

use serde::{Deserialize, Serialize};

use crate::corpus::Suggestion;
use crate::sfl::SflDimension;

/// Pedagogical focus of a suggestion.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DimensionLabel {
    LexicalRichness,
    SyntacticDiversity,
    SemanticDispersion,
    SemanticShift,
    EmotionSpectrum,
    MoralAlignment,
    Other,
}

impl DimensionLabel {
    pub fn sfl(self) -> Option<SflDimension> {
        match self {
            DimensionLabel::LexicalRichness => Some(SflDimension::LexicalRichness),
            DimensionLabel::SyntacticDiversity => Some(SflDimension::SyntacticDiversity),
            DimensionLabel::SemanticDispersion => Some(SflDimension::SemanticDispersion),
            DimensionLabel::SemanticShift => Some(SflDimension::SemanticShift),
            DimensionLabel::EmotionSpectrum => Some(SflDimension::EmotionSpectrum),
            DimensionLabel::MoralAlignment => Some(SflDimension::MoralAlignment),
            DimensionLabel::Other => None,
        }
    }

    pub fn key(self) -> &'static str {
        self.sfl().map_or("other", SflDimension::key)
    }
}

impl From<SflDimension> for DimensionLabel {
    fn from(d: SflDimension) -> Self {
        match d {
            SflDimension::LexicalRichness => DimensionLabel::LexicalRichness,
            SflDimension::SyntacticDiversity => DimensionLabel::SyntacticDiversity,
            SflDimension::SemanticDispersion => DimensionLabel::SemanticDispersion,
            SflDimension::SemanticShift => DimensionLabel::SemanticShift,
            SflDimension::EmotionSpectrum => DimensionLabel::EmotionSpectrum,
            SflDimension::MoralAlignment => DimensionLabel::MoralAlignment,
        }
    }
}

impl fmt::Display for DimensionLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.key())
    }
}

/// Keyword table: lowercase keyword and the dimension it maps to.
pub const KEYWORDS: &[(&str, SflDimension)] = &[
    ("language", SflDimension::LexicalRichness),
    ("description", SflDimension::LexicalRichness),
    ("details", SflDimension::LexicalRichness),
    ("detail", SflDimension::LexicalRichness),
    ("语言", SflDimension::LexicalRichness),
    ("描写", SflDimension::LexicalRichness),
    ("细节", SflDimension::LexicalRichness),
    ("expression", SflDimension::SyntacticDiversity),
    ("transition", SflDimension::SyntacticDiversity),
    ("表达", SflDimension::SyntacticDiversity),
    ("过渡", SflDimension::SyntacticDiversity),
    ("content", SflDimension::SemanticDispersion),
    ("structure", SflDimension::SemanticDispersion),
    ("persona", SflDimension::SemanticDispersion),
    ("内容", SflDimension::SemanticDispersion),
    ("结构", SflDimension::SemanticDispersion),
    ("人物", SflDimension::SemanticDispersion),
    ("plot", SflDimension::SemanticShift),
    ("opening", SflDimension::SemanticShift),
    ("ending", SflDimension::SemanticShift),
    ("情节", SflDimension::SemanticShift),
    ("开头", SflDimension::SemanticShift),
    ("结尾", SflDimension::SemanticShift),
    ("psychology", SflDimension::EmotionSpectrum),
    ("emotion", SflDimension::EmotionSpectrum),
    ("environment", SflDimension::EmotionSpectrum),
    ("action", SflDimension::EmotionSpectrum),
    ("心理", SflDimension::EmotionSpectrum),
    ("情感", SflDimension::EmotionSpectrum),
    ("环境", SflDimension::EmotionSpectrum),
    ("动作", SflDimension::EmotionSpectrum),
    ("morals", SflDimension::MoralAlignment),
    ("moral", SflDimension::MoralAlignment),
    ("material selection", SflDimension::MoralAlignment),
    ("title", SflDimension::MoralAlignment),
    ("off-topic", SflDimension::MoralAlignment),
    ("off topic", SflDimension::MoralAlignment),
    ("立意", SflDimension::MoralAlignment),
    ("选材", SflDimension::MoralAlignment),
    ("标题", SflDimension::MoralAlignment),
    ("题目", SflDimension::MoralAlignment),
    ("跑题", SflDimension::MoralAlignment),
    ("离题", SflDimension::MoralAlignment),
];

const TAG_DELIMITERS: [char; 2] = [':', '：'];

/// Longest keyword starting at byte offset `at` of the lowercased text. ASCII
/// keywords need a non-alphanumeric character (or the start) before them; any
/// suffix is allowed.
fn keyword_at(lower: &str, at: usize) -> Option<(&'static str, SflDimension)> {
    let rest = &lower[at..];
    let prev_is_word = lower[..at].chars().next_back().is_some_and(|c| c.is_ascii_alphanumeric());
    KEYWORDS
        .iter()
        .filter(|(k, _)| rest.starts_with(k))
        .filter(|(k, _)| !(k.is_ascii() && prev_is_word))
        .max_by_key(|(k, _)| k.len())
        .copied()
}

/// Dimensions of keywords in reading order, repeats included.
pub fn scan_keywords(text: &str) -> Vec<SflDimension> {
    let lower = text.to_lowercase();
    let mut out = Vec::new();
    let mut idx = 0;
    while idx < lower.len() {
        if let Some((k, d)) = keyword_at(&lower, idx) {
            out.push(d);
            idx += k.len();
        } else {
            idx += lower[idx..].chars().next().map_or(1, char::len_utf8);
        }
    }
    out
}

/// Dimension of a tag like `Language` or `语言描写`: the first keyword, provided it
/// starts the tag.
fn tag_dimension(tag: &str) -> Option<SflDimension> {
    let lower = tag.trim().to_lowercase();
    if lower.is_empty() {
        return None;
    }
    keyword_at(&lower, 0).map(|(_, d)| d)
}

/// Splits a leading `Tag:` off the text, if the tag maps to a dimension.
fn leading_tag(text: &str) -> Option<(SflDimension, &str)> {
    let trimmed = text.trim_start();
    let pos = trimmed.find(TAG_DELIMITERS)?;
    let head = &trimmed[..pos];
    if head.chars().count() > 24 {
        return None;
    }
    let d = tag_dimension(head)?;
    let delim_len = trimmed[pos..].chars().next().map_or(1, char::len_utf8);
    Some((d, &trimmed[pos + delim_len..]))
}

/// Up to two distinct dimensions: an explicit tag (the `direction_tag` field, else a
/// leading `Tag:` in the text) comes first, then keywords in reading order. No
/// keyword at all yields `[Other]`.
pub fn classify_dimension(s: &Suggestion) -> Vec<DimensionLabel> {
    let mut dims: Vec<SflDimension> = Vec::with_capacity(2);
    let mut body = s.text.as_str();
    if let Some(d) = s.direction_tag.as_deref().and_then(tag_dimension) {
        dims.push(d);
    } else if let Some((d, rest)) = leading_tag(&s.text) {
        dims.push(d);
        body = rest;
    }
    for d in scan_keywords(body) {
        if dims.len() == 2 {
            break;
        }
        if !dims.contains(&d) {
            dims.push(d);
        }
    }
    if dims.is_empty() {
        vec![DimensionLabel::Other]
    } else {
        dims.into_iter().map(DimensionLabel::from).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use DimensionLabel::*;

    fn dims(text: &str) -> Vec<DimensionLabel> {
        classify_dimension(&Suggestion::new("s", text))
    }

    #[test]
    fn mapping_examples() {
        assert_eq!(dims("Language: use more vivid verbs"), vec![LexicalRichness]);
        assert_eq!(
            dims("Improve the Plot and show Emotion in the climax"),
            vec![SemanticShift, EmotionSpectrum]
        );
        assert_eq!(dims("great work overall"), vec![Other]);
    }

    #[test]
    fn leading_tag_precedes_earlier_body_keywords() {
        assert_eq!(
            dims("Ending: the plot twist needs more emotion"),
            vec![SemanticShift, EmotionSpectrum]
        );
        assert_eq!(dims("Title: a title that fits the content"), vec![MoralAlignment, SemanticDispersion]);
    }

    #[test]
    fn at_most_two_distinct() {
        assert_eq!(
            dims("language, language, structure, plot and emotion"),
            vec![LexicalRichness, SemanticDispersion]
        );
    }

    #[test]
    fn word_start_boundary() {
        assert_eq!(dims("a transaction happened"), vec![Other]);
        assert_eq!(dims("more emotional depth"), vec![EmotionSpectrum]);
        assert_eq!(dims("check the material selection"), vec![MoralAlignment]);
        assert_eq!(dims("this drifts off-topic"), vec![MoralAlignment]);
    }

    #[test]
    fn chinese_tags() {
        assert_eq!(dims("语言：多用生动的动词"), vec![LexicalRichness]);
        assert_eq!(dims("结尾部分可以加入心理描写"), vec![SemanticShift, EmotionSpectrum]);
    }

    #[test]
    fn direction_tag_field() {
        let mut s = Suggestion::new("s", "add details to the opening");
        s.direction_tag = Some("Morals".into());
        assert_eq!(classify_dimension(&s), vec![MoralAlignment, LexicalRichness]);
    }

    #[test]
    fn non_keyword_tag_is_scanned_as_text() {
        assert_eq!(dims("Note: the opening is slow"), vec![SemanticShift]);
    }
}
