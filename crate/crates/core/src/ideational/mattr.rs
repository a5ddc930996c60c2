use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::IdeationalError;

/// Token stream of one writing.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TokenSequence {
    pub writing_id: String,
    pub tokens: Vec<String>,
}

impl TokenSequence {
    pub fn new(writing_id: impl Into<String>, tokens: Vec<String>) -> Self {
        TokenSequence {
            writing_id: writing_id.into(),
            tokens,
        }
    }

    pub fn from_text(writing_id: impl Into<String>, text: &str) -> Self {
        TokenSequence::new(writing_id, crate::corpus::tokenize(text))
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }
}

/// Moving-average type–token ratio with window `w`.
///
/// When the sequence is shorter than the window, the plain type–token ratio is
/// returned instead.
pub fn mattr<S: AsRef<str>>(tokens: &[S], w: usize) -> Result<f64, IdeationalError> {
    if w == 0 {
        return Err(IdeationalError::Contract("MATTR window must be at least 1".into()));
    }
    let n = tokens.len();
    if n == 0 {
        return Err(IdeationalError::Contract("MATTR of an empty token sequence".into()));
    }
    let mut counts: HashMap<&str, usize> = HashMap::new();
    if n < w {
        for t in tokens {
            *counts.entry(t.as_ref()).or_default() += 1;
        }
        return Ok(counts.len() as f64 / n as f64);
    }
    for t in &tokens[..w] {
        *counts.entry(t.as_ref()).or_default() += 1;
    }
    // sum distinct counts as integers; divide once at the end
    let mut distinct_total = counts.len() as u64;
    for i in w..n {
        let out = tokens[i - w].as_ref();
        let c = counts.get_mut(out).expect("token leaving the window was counted");
        *c -= 1;
        if *c == 0 {
            counts.remove(out);
        }
        *counts.entry(tokens[i].as_ref()).or_default() += 1;
        distinct_total += counts.len() as u64;
    }
    let windows = (n - w + 1) as f64;
    Ok(distinct_total as f64 / (windows * w as f64))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::collections::HashSet;

    // Oracle: recount every window from scratch.
    fn brute(tokens: &[String], w: usize) -> f64 {
        let n = tokens.len();
        if n < w {
            return tokens.iter().collect::<HashSet<_>>().len() as f64 / n as f64;
        }
        let mut sum = 0.0;
        for i in 0..=n - w {
            sum += tokens[i..i + w].iter().collect::<HashSet<_>>().len() as f64 / w as f64;
        }
        sum / (n - w + 1) as f64
    }

    #[test]
    fn worked_examples() {
        assert_eq!(mattr(&["a", "a", "a", "a"], 2).unwrap(), 0.5);
        assert_eq!(mattr(&["a", "b", "c", "d", "e"], 3).unwrap(), 1.0);
        let v = mattr(&["a", "b", "a", "c", "b"], 3).unwrap();
        assert!((v - 8.0 / 9.0).abs() < 1e-15);
    }

    #[test]
    fn short_sequence_falls_back_to_ttr() {
        assert_eq!(mattr(&["a", "b", "a"], 50).unwrap(), 2.0 / 3.0);
    }

    #[test]
    fn contract_errors() {
        assert!(mattr(&["a"], 0).is_err());
        assert!(mattr::<&str>(&[], 3).is_err());
    }

    proptest! {
        #[test]
        fn matches_window_recount(tokens in proptest::collection::vec("[a-e]", 1..60), w in 1usize..15) {
            let got = mattr(&tokens, w).unwrap();
            prop_assert!((got - brute(&tokens, w)).abs() < 1e-12);
            if tokens.len() >= w {
                prop_assert!(got >= 1.0 / w as f64 - 1e-12 && got <= 1.0 + 1e-12);
            }
        }

        #[test]
        fn invariant_under_renaming(tokens in proptest::collection::vec("[a-e]", 1..40), w in 1usize..10) {
            let renamed: Vec<String> = tokens.iter().map(|t| format!("{t}_{}", t.len() * 7)).collect();
            prop_assert_eq!(mattr(&tokens, w).unwrap(), mattr(&renamed, w).unwrap());
        }
    }
}
