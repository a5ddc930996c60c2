//! Sentence segmentation, coarse filtering and tokenization.

use super::model::Sentence;

/// Terminators recognised by default. Newline always splits.
pub const DEFAULT_TERMINATORS: [char; 3] = ['。', '？', '！'];

/// Delimiter configuration for [`segment_with`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SegmentConfig {
    pub terminators: Vec<char>,
}

impl Default for SegmentConfig {
    fn default() -> Self {
        SegmentConfig {
            terminators: DEFAULT_TERMINATORS.to_vec(),
        }
    }
}

impl SegmentConfig {
    /// Default terminators plus Western `.`, `?`, `!` and the ellipsis `…`.
    pub fn extended() -> Self {
        let mut terminators = DEFAULT_TERMINATORS.to_vec();
        terminators.extend(['.', '?', '!', '…']);
        SegmentConfig { terminators }
    }

    fn is_delimiter(&self, c: char) -> bool {
        c == '\n' || c == '\r' || self.terminators.contains(&c)
    }
}

/// Split `text` into sentences using the default terminator set.
pub fn segment_sentences(writing_id: &str, text: &str) -> Vec<Sentence> {
    segment_with(writing_id, text, &SegmentConfig::default())
}

pub fn segment_with(writing_id: &str, text: &str, config: &SegmentConfig) -> Vec<Sentence> {
    text.split(|c| config.is_delimiter(c))
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .enumerate()
        .map(|(i, s)| Sentence {
            writing_id: writing_id.to_string(),
            sentence_id: i as u32 + 1,
            text: s.to_string(),
        })
        .collect()
}

/// True for CJK unified ideographs (all extension blocks) and compatibility ideographs.
pub fn is_han(c: char) -> bool {
    matches!(c as u32,
        0x3400..=0x4DBF
        | 0x4E00..=0x9FFF
        | 0xF900..=0xFAFF
        | 0x20000..=0x2A6DF
        | 0x2A700..=0x2EBEF
        | 0x2F800..=0x2FA1F
        | 0x30000..=0x323AF)
}

/// Rule-based pre-filter: `false` for symbol-only fragments and for fragments made of
/// at most four Han characters with no other word characters.
pub fn coarse_filter(sentence: &Sentence) -> bool {
    keep_text(&sentence.text)
}

pub fn keep_text(text: &str) -> bool {
    let mut han = 0usize;
    let mut other_word = 0usize;
    for c in text.chars() {
        if is_han(c) {
            han += 1;
        } else if c.is_alphanumeric() {
            other_word += 1;
        }
    }
    if han == 0 && other_word == 0 {
        return false;
    }
    !(other_word == 0 && han <= 4)
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Run {
    None,
    Letters,
    Digits,
}

/// Script-boundary tokenizer.
///
/// Contiguous letters form one token, contiguous digits form one token, every Han
/// ideograph is its own token, and everything else (punctuation, whitespace, symbols)
/// separates tokens and is discarded.
pub fn tokenize(text: &str) -> Vec<String> {
    let mut tokens = Vec::new();
    let mut current = String::new();
    let mut run = Run::None;
    let flush = |current: &mut String, tokens: &mut Vec<String>| {
        if !current.is_empty() {
            tokens.push(std::mem::take(current));
        }
    };
    for c in text.chars() {
        if is_han(c) {
            flush(&mut current, &mut tokens);
            run = Run::None;
            tokens.push(c.to_string());
        } else if c.is_numeric() {
            if run != Run::Digits {
                flush(&mut current, &mut tokens);
                run = Run::Digits;
            }
            current.push(c);
        } else if c.is_alphabetic() || (run == Run::Letters && is_word_joiner(c)) {
            if run != Run::Letters {
                flush(&mut current, &mut tokens);
                run = Run::Letters;
            }
            current.push(c);
        } else {
            flush(&mut current, &mut tokens);
            run = Run::None;
        }
    }
    flush(&mut current, &mut tokens);
    tokens
}

// Combining marks and underscores stay inside a letter run ("naïve" written with U+0308).
fn is_word_joiner(c: char) -> bool {
    c == '_' || matches!(c as u32, 0x0300..=0x036F)
}
