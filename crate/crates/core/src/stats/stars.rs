use std::fmt;

use serde::{Deserialize, Serialize};

/// Significance label on the conventional ladder.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Stars {
    #[serde(rename = "***")]
    Three,
    #[serde(rename = "**")]
    Two,
    #[serde(rename = "*")]
    One,
    #[serde(rename = "†")]
    Dagger,
    #[serde(rename = "ns")]
    NotSignificant,
}

impl Stars {
    pub fn as_str(self) -> &'static str {
        match self {
            Stars::Three => "***",
            Stars::Two => "**",
            Stars::One => "*",
            Stars::Dagger => "†",
            Stars::NotSignificant => "ns",
        }
    }

    /// Suffix for table cells: empty for `ns`.
    pub fn suffix(self) -> &'static str {
        match self {
            Stars::NotSignificant => "",
            s => s.as_str(),
        }
    }
}

impl fmt::Display for Stars {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Strict thresholds 0.001, 0.01, 0.05, 0.1.
pub fn star_label(p: f64) -> Stars {
    if p < 0.001 {
        Stars::Three
    } else if p < 0.01 {
        Stars::Two
    } else if p < 0.05 {
        Stars::One
    } else if p < 0.1 {
        Stars::Dagger
    } else {
        Stars::NotSignificant
    }
}
