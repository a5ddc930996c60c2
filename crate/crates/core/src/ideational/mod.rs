//! Ideational metrics: lexical richness (MATTR) and syntactic diversity
//! (Weisfeiler-Lehman kernel over dependency parses).

mod conllu;
mod mattr;
mod wl;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use conllu::{parse_conllu, DependencyGraph, Edge, Node, ParsedConllu, StructuralWarning};
pub use mattr::{mattr, TokenSequence};
pub use wl::{
    kernel_matrix, normalized_similarity, syntactic_diversity, wl_features, wl_kernel, WlFeatures,
    WlLabeler,
};

pub const DEFAULT_MATTR_WINDOW: usize = 50;
pub const DEFAULT_WL_ITERATIONS: usize = 3;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum IdeationalError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("{0}")]
    Contract(String),
}

/// MATTR window and WL depth.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct WlParams {
    pub iterations: usize,
    pub window: usize,
}

impl Default for WlParams {
    fn default() -> Self {
        WlParams {
            iterations: DEFAULT_WL_ITERATIONS,
            window: DEFAULT_MATTR_WINDOW,
        }
    }
}
