use super::model::EssayDraft;
use super::segment::{segment_sentences, tokenize};
use super::CorpusError;

/// Nearest-rank quantile of an ascending slice: the value at rank `ceil(p * n)`,
/// clamped to `[1, n]`.
pub fn nearest_rank(sorted: &[usize], p: f64) -> usize {
    let n = sorted.len();
    let rank = ((p * n as f64).ceil() as usize).clamp(1, n);
    sorted[rank - 1]
}

/// Sentence and token counts used for trimming.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LengthStats {
    pub sentences: usize,
    pub tokens: usize,
}

impl LengthStats {
    pub fn of(draft: &EssayDraft) -> Self {
        LengthStats {
            sentences: segment_sentences(&draft.writing_id, &draft.text).len(),
            tokens: tokenize(&draft.text).len(),
        }
    }
}

/// Closed acceptance band `[lo, hi]` for one statistic.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Band {
    pub lo: usize,
    pub hi: usize,
}

impl Band {
    pub fn contains(&self, v: usize) -> bool {
        self.lo <= v && v <= self.hi
    }

    fn from_values(mut values: Vec<usize>, fraction: f64) -> Band {
        values.sort_unstable();
        Band {
            lo: nearest_rank(&values, fraction),
            hi: nearest_rank(&values, 1.0 - fraction),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TrimBands {
    pub sentences: Band,
    pub tokens: Band,
}

pub fn trim_bands(stats: &[LengthStats], fraction: f64) -> Result<Option<TrimBands>, CorpusError> {
    if !(0.0..0.5).contains(&fraction) {
        return Err(CorpusError::InvalidTrimFraction(fraction));
    }
    if stats.is_empty() {
        return Ok(None);
    }
    Ok(Some(TrimBands {
        sentences: Band::from_values(stats.iter().map(|s| s.sentences).collect(), fraction),
        tokens: Band::from_values(stats.iter().map(|s| s.tokens).collect(), fraction),
    }))
}

/// Drop essays whose sentence count or token count lies strictly outside the
/// nearest-rank `[fraction, 1 - fraction]` band. Survivors keep input order.
pub fn trim_outliers(corpus: &[EssayDraft], fraction: f64) -> Result<Vec<EssayDraft>, CorpusError> {
    let stats: Vec<LengthStats> = corpus.iter().map(LengthStats::of).collect();
    let Some(bands) = trim_bands(&stats, fraction)? else {
        return Ok(Vec::new());
    };
    Ok(corpus
        .iter()
        .zip(&stats)
        .filter(|(_, s)| bands.sentences.contains(s.sentences) && bands.tokens.contains(s.tokens))
        .map(|(d, _)| d.clone())
        .collect())
}

/// Affine map of `raw` from `[raw_min, raw_max]` onto `[0, 100]`.
pub fn normalize_grade(raw: f64, raw_min: f64, raw_max: f64) -> Result<f64, CorpusError> {
    if !(raw_min < raw_max) {
        return Err(CorpusError::DegenerateScale { min: raw_min, max: raw_max });
    }
    if !(raw_min..=raw_max).contains(&raw) {
        return Err(CorpusError::GradeOutOfRange { raw, min: raw_min, max: raw_max });
    }
    Ok(((raw - raw_min) / (raw_max - raw_min) * 100.0).clamp(0.0, 100.0))
}
