use serde::{Deserialize, Serialize};

/// A metric value plus a flag marking inputs too small for the metric to be defined.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Score {
    pub value: f64,
    pub degenerate: bool,
}

impl Score {
    pub fn new(value: f64) -> Self {
        Score { value, degenerate: false }
    }

    pub fn degenerate() -> Self {
        Score { value: 0.0, degenerate: true }
    }
}
