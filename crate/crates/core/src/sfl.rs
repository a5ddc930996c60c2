//! The six linguistic dimensions and the per-essay metric profile.

use std::fmt;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SflDimension {
    LexicalRichness,
    SyntacticDiversity,
    SemanticDispersion,
    SemanticShift,
    EmotionSpectrum,
    MoralAlignment,
}

impl SflDimension {
    pub const ALL: [SflDimension; 6] = [
        SflDimension::LexicalRichness,
        SflDimension::SyntacticDiversity,
        SflDimension::SemanticDispersion,
        SflDimension::SemanticShift,
        SflDimension::EmotionSpectrum,
        SflDimension::MoralAlignment,
    ];

    pub fn key(self) -> &'static str {
        match self {
            SflDimension::LexicalRichness => "lexical_richness",
            SflDimension::SyntacticDiversity => "syntactic_diversity",
            SflDimension::SemanticDispersion => "semantic_dispersion",
            SflDimension::SemanticShift => "semantic_shift",
            SflDimension::EmotionSpectrum => "emotion_spectrum",
            SflDimension::MoralAlignment => "moral_alignment",
        }
    }

    pub fn title(self) -> &'static str {
        match self {
            SflDimension::LexicalRichness => "Lexical Richness",
            SflDimension::SyntacticDiversity => "Syntactic Diversity",
            SflDimension::SemanticDispersion => "Semantic Dispersion",
            SflDimension::SemanticShift => "Semantic Shift",
            SflDimension::EmotionSpectrum => "Emotional Spectrum",
            SflDimension::MoralAlignment => "Moral Alignment",
        }
    }

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_key(key: &str) -> Option<Self> {
        SflDimension::ALL.into_iter().find(|d| d.key() == key)
    }
}

impl fmt::Display for SflDimension {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.key())
    }
}

/// Six-metric profile of one essay, indexed by [`SflDimension`].
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct SflVector {
    pub lexical_richness: f64,
    pub syntactic_diversity: f64,
    pub semantic_dispersion: f64,
    pub semantic_shift: f64,
    pub emotion_spectrum: f64,
    pub moral_alignment: f64,
}

impl SflVector {
    pub fn from_array(v: [f64; 6]) -> Self {
        SflVector {
            lexical_richness: v[0],
            syntactic_diversity: v[1],
            semantic_dispersion: v[2],
            semantic_shift: v[3],
            emotion_spectrum: v[4],
            moral_alignment: v[5],
        }
    }

    pub fn to_array(&self) -> [f64; 6] {
        [
            self.lexical_richness,
            self.syntactic_diversity,
            self.semantic_dispersion,
            self.semantic_shift,
            self.emotion_spectrum,
            self.moral_alignment,
        ]
    }

    pub fn get(&self, d: SflDimension) -> f64 {
        self.to_array()[d.index()]
    }

    /// Component-wise `self - earlier`.
    pub fn delta_from(&self, earlier: &SflVector) -> SflVector {
        let (a, b) = (self.to_array(), earlier.to_array());
        SflVector::from_array(std::array::from_fn(|i| a[i] - b[i]))
    }
}
