use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::corpus::Sentence;

/// Composite primary key of a sentence within a run.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct SentenceKey {
    pub writing_id: String,
    pub sentence_id: u32,
}

impl SentenceKey {
    pub fn new(writing_id: impl Into<String>, sentence_id: u32) -> Self {
        SentenceKey { writing_id: writing_id.into(), sentence_id }
    }

    pub fn of(s: &Sentence) -> Self {
        SentenceKey::new(s.writing_id.clone(), s.sentence_id)
    }
}

impl fmt::Display for SentenceKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}#{}", self.writing_id, self.sentence_id)
    }
}

/// Confidence in hundredths; always rendered with two decimals.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Confidence(u8);

impl Confidence {
    pub fn from_hundredths(h: u8) -> Option<Self> {
        (h <= 100).then_some(Confidence(h))
    }

    pub fn hundredths(self) -> u8 {
        self.0
    }

    pub fn value(self) -> f64 {
        f64::from(self.0) / 100.0
    }
}

impl FromStr for Confidence {
    type Err = String;

    /// Accepts exactly `d.dd` with a value in `[0, 1]`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let b = s.as_bytes();
        let shaped = b.len() == 4 && b[1] == b'.' && [b[0], b[2], b[3]].iter().all(u8::is_ascii_digit);
        if !shaped {
            return Err(format!("confidence {s:?} is not written with two decimals"));
        }
        let h = (b[0] - b'0') * 100 + (b[2] - b'0') * 10 + (b[3] - b'0');
        Confidence::from_hundredths(h).ok_or_else(|| format!("confidence {s} exceeds 1"))
    }
}

impl fmt::Display for Confidence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}.{:02}", self.0 / 100, self.0 % 100)
    }
}

impl Serialize for Confidence {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Confidence {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn confidence_format() {
        assert_eq!("0.80".parse::<Confidence>().unwrap().to_string(), "0.80");
        assert_eq!("1.00".parse::<Confidence>().unwrap().hundredths(), 100);
        for bad in ["0.8", "1.01", "0.800", ".80", "-0.10", "a.bc", ""] {
            assert!(bad.parse::<Confidence>().is_err(), "{bad}");
        }
        let json = serde_json::to_string(&Confidence(7)).unwrap();
        assert_eq!(json, "\"0.07\"");
    }
}
