use serde::{Deserialize, Serialize};

use super::dimension::{classify_dimension, DimensionLabel};
use super::matching::{match_score, origin_from_vectors, revision_candidates, OriginLabel, RevisionCandidateSet};
use super::{Thresholds, UptakeError};
use crate::corpus::{Sentence, SuggestionSet};
use crate::embed::{cosine, Embedder};
use crate::sfl::SflDimension;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuggestionOutcome {
    pub suggestion_id: String,
    pub origin: OriginLabel,
    pub origin_similarity: f64,
    pub dimensions: Vec<DimensionLabel>,
    pub match_score: f64,
    pub adopted: bool,
}

impl SuggestionOutcome {
    pub fn has_dimension(&self, d: SflDimension) -> bool {
        self.dimensions.contains(&DimensionLabel::from(d))
    }
}

/// Adoption outcome of one writing's finalized suggestions. Rates are `None` when
/// their denominator is zero.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UptakeRecord {
    pub writing_id: String,
    pub per_suggestion: Vec<SuggestionOutcome>,
    pub fua: u32,
    pub fur: Option<f64>,
    pub fua_l: u32,
    pub fua_t: u32,
    pub fur_l: Option<f64>,
    pub fur_t: Option<f64>,
    pub thresholds: Thresholds,
}

fn ratio(num: u32, den: usize) -> Option<f64> {
    (den > 0).then(|| num as f64 / den as f64)
}

impl UptakeRecord {
    /// Aggregates per-suggestion outcomes.
    pub fn from_outcomes(writing_id: impl Into<String>, per_suggestion: Vec<SuggestionOutcome>, thresholds: Thresholds) -> Self {
        let count = |o: OriginLabel| per_suggestion.iter().filter(|s| s.origin == o).count();
        let adopted = |o: OriginLabel| per_suggestion.iter().filter(|s| s.origin == o && s.adopted).count() as u32;
        let (fua_l, fua_t) = (adopted(OriginLabel::L), adopted(OriginLabel::T));
        let fua = fua_l + fua_t;
        UptakeRecord {
            writing_id: writing_id.into(),
            fur: ratio(fua, per_suggestion.len()),
            fur_l: ratio(fua_l, count(OriginLabel::L)),
            fur_t: ratio(fua_t, count(OriginLabel::T)),
            fua,
            fua_l,
            fua_t,
            per_suggestion,
            thresholds,
        }
    }

    /// Suggestions of one origin carrying `d`, and how many of them were adopted.
    pub fn dimension_counts(&self, d: SflDimension, origin: OriginLabel) -> (usize, usize) {
        let subset: Vec<_> = self
            .per_suggestion
            .iter()
            .filter(|s| s.origin == origin && s.has_dimension(d))
            .collect();
        (subset.len(), subset.iter().filter(|s| s.adopted).count())
    }
}

/// Everything needed to trace uptake for one writing.
#[derive(Debug, Clone)]
pub struct UptakeInput<'a> {
    pub writing_id: &'a str,
    pub d_pre: &'a [Sentence],
    pub d_post: &'a [Sentence],
    pub s_initial: Option<&'a SuggestionSet>,
    pub s_final: &'a SuggestionSet,
}

/// Per-writing result of the full tracing pipeline.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WritingUptake {
    pub record: UptakeRecord,
    pub effort: TeacherEffort,
    pub candidates: RevisionCandidateSet,
}

/// Origins and dimensions for each finalized suggestion, candidate extraction and
/// attention matching, all over a single embedding batch.
pub fn compute_uptake(input: &UptakeInput<'_>, thresholds: &Thresholds, embedder: &Embedder) -> Result<WritingUptake, UptakeError> {
    thresholds.validate()?;
    let candidates = revision_candidates(input.d_pre, input.d_post, thresholds.delta_r);
    let initial = input.s_initial.map_or(&[][..], |s| s.suggestions.as_slice());
    let finals = &input.s_final.suggestions;

    let mut texts: Vec<&str> = finals.iter().map(|s| s.text.as_str()).collect();
    texts.extend(initial.iter().map(|s| s.text.as_str()));
    texts.extend(candidates.texts());
    let vectors = embedder.embed_batch(&texts)?;
    let (final_v, rest) = vectors.split_at(finals.len());
    let (initial_v, cand_v) = rest.split_at(initial.len());

    let mut outcomes = Vec::with_capacity(finals.len());
    for (s, v) in finals.iter().zip(final_v) {
        let (origin, origin_similarity) = origin_from_vectors(v, initial_v, thresholds.delta_m)?;
        let cosines = cand_v.iter().map(|c| cosine(v, c)).collect::<Result<Vec<_>, _>>()?;
        let m = match_score(&cosines, thresholds.tau);
        outcomes.push(SuggestionOutcome {
            suggestion_id: s.suggestion_id.clone(),
            origin,
            origin_similarity,
            dimensions: classify_dimension(s),
            match_score: m,
            adopted: m > thresholds.delta_a,
        });
    }

    // initial suggestions with no retained counterpart
    let mut retained = vec![false; initial.len()];
    for v in final_v {
        let mut best: Option<(usize, f64)> = None;
        for (i, u) in initial_v.iter().enumerate() {
            let c = cosine(v, u)?;
            if best.is_none_or(|(_, b)| c > b) {
                best = Some((i, c));
            }
        }
        if let Some((i, c)) = best {
            if c > thresholds.delta_m {
                retained[i] = true;
            }
        }
    }
    let s_l = outcomes.iter().filter(|o| o.origin == OriginLabel::L).count();
    let dropped: Vec<Vec<DimensionLabel>> = initial
        .iter()
        .zip(&retained)
        .filter(|(_, r)| !**r)
        .map(|(s, _)| classify_dimension(s))
        .collect();
    let teacher_added: Vec<Vec<DimensionLabel>> = outcomes
        .iter()
        .filter(|o| o.origin == OriginLabel::T)
        .map(|o| o.dimensions.clone())
        .collect();
    let effort = effort_from_parts(input.writing_id, initial.len(), s_l, &dropped, &teacher_added)?;

    Ok(WritingUptake {
        record: UptakeRecord::from_outcomes(input.writing_id, outcomes, *thresholds),
        effort,
        candidates,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EffortScenario {
    Creation,
    Modification,
}

/// Volume of teacher changes for one writing. Each counted suggestion spreads a unit
/// weight evenly over its dimensions; `Other` suggestions go to `unclassified`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TeacherEffort {
    pub writing_id: String,
    pub scenario: EffortScenario,
    pub per_dimension: [f64; 6],
    pub unclassified: f64,
    pub total: f64,
}

/// Effort from counts: `(|S_initial| - |S_L|) + |S_T|`. `dropped` holds the dimension
/// labels of initial suggestions that were not retained; its length need not equal
/// the count difference when several finals map onto one initial suggestion.
pub fn effort_from_parts(
    writing_id: &str,
    initial_count: usize,
    s_l_count: usize,
    dropped: &[Vec<DimensionLabel>],
    teacher_added: &[Vec<DimensionLabel>],
) -> Result<TeacherEffort, UptakeError> {
    if s_l_count > initial_count {
        return Err(UptakeError::Contract(format!(
            "{writing_id}: {s_l_count} retained suggestions exceed {initial_count} initial ones"
        )));
    }
    let total = (initial_count - s_l_count + teacher_added.len()) as f64;
    let mut per_dimension = [0.0; 6];
    let mut attributed = 0.0;
    let dropped_weight = if dropped.is_empty() {
        0.0
    } else {
        (initial_count - s_l_count) as f64 / dropped.len() as f64
    };
    let weighted = dropped
        .iter()
        .map(|d| (d, dropped_weight))
        .chain(teacher_added.iter().map(|d| (d, 1.0)));
    for (labels, weight) in weighted {
        let dims: Vec<SflDimension> = labels.iter().filter_map(|l| l.sfl()).collect();
        for d in &dims {
            let share = weight / dims.len() as f64;
            per_dimension[d.index()] += share;
            attributed += share;
        }
    }
    Ok(TeacherEffort {
        writing_id: writing_id.to_string(),
        scenario: if initial_count == 0 { EffortScenario::Creation } else { EffortScenario::Modification },
        per_dimension,
        unclassified: total - attributed,
        total,
    })
}

/// Count-level effort for sets whose dimensions are computed from the texts.
pub fn teacher_effort(
    s_initial: &SuggestionSet,
    s_l_count: usize,
    s_t: &[crate::corpus::Suggestion],
) -> Result<TeacherEffort, UptakeError> {
    let added: Vec<Vec<DimensionLabel>> = s_t.iter().map(classify_dimension).collect();
    effort_from_parts(&s_initial.writing_id, s_initial.len(), s_l_count, &[], &added)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{Stage, Suggestion};

    fn outcome(id: &str, origin: OriginLabel, m: f64) -> SuggestionOutcome {
        SuggestionOutcome {
            suggestion_id: id.into(),
            origin,
            origin_similarity: 0.0,
            dimensions: vec![DimensionLabel::Other],
            match_score: m,
            adopted: m > 0.5,
        }
    }

    #[test]
    fn counting() {
        let o: Vec<_> = [0.9, 0.6, 0.51, 0.5, 0.1]
            .iter()
            .enumerate()
            .map(|(i, m)| outcome(&i.to_string(), if i % 2 == 0 { OriginLabel::L } else { OriginLabel::T }, *m))
            .collect();
        let r = UptakeRecord::from_outcomes("w", o, Thresholds::default());
        assert_eq!(r.fua, 3);
        assert_eq!(r.fur, Some(0.6));
        assert_eq!(r.fua, r.fua_l + r.fua_t);
    }

    #[test]
    fn empty_denominators() {
        let o = vec![outcome("a", OriginLabel::L, 0.1), outcome("b", OriginLabel::L, 0.2)];
        let r = UptakeRecord::from_outcomes("w", o, Thresholds::default());
        assert_eq!(r.fua_l, 0);
        assert_eq!(r.fur_l, Some(0.0));
        assert_eq!(r.fur_t, None);
        let r = UptakeRecord::from_outcomes("w", vec![], Thresholds::default());
        assert_eq!(r.fur, None);
    }

    #[test]
    fn effort_arithmetic() {
        let initial = SuggestionSet {
            writing_id: "w".into(),
            stage: Stage::Initial,
            suggestions: (0..10).map(|i| Suggestion::new(format!("i{i}"), "x")).collect(),
        };
        let added: Vec<Suggestion> = (0..3).map(|i| Suggestion::new(format!("t{i}"), "Plot: more tension")).collect();
        let e = teacher_effort(&initial, 8, &added).unwrap();
        assert_eq!(e.total, 5.0);
        assert_eq!(e.scenario, EffortScenario::Modification);
        assert_eq!(e.per_dimension[SflDimension::SemanticShift.index()], 3.0);
        assert_eq!(e.unclassified, 2.0);

        let empty = SuggestionSet { suggestions: vec![], ..initial.clone() };
        let e = teacher_effort(&empty, 0, &added[..1].iter().cycle().take(4).cloned().collect::<Vec<_>>()).unwrap();
        assert_eq!(e.total, 4.0);
        assert_eq!(e.scenario, EffortScenario::Creation);

        assert!(teacher_effort(&empty, 1, &[]).is_err());
    }

    #[test]
    fn effort_total_is_dimension_sum_plus_remainder() {
        let dropped = vec![
            vec![DimensionLabel::LexicalRichness, DimensionLabel::SemanticShift],
            vec![DimensionLabel::Other],
        ];
        let added = vec![vec![DimensionLabel::MoralAlignment], vec![DimensionLabel::Other]];
        let e = effort_from_parts("w", 5, 3, &dropped, &added).unwrap();
        assert_eq!(e.total, 4.0);
        let sum: f64 = e.per_dimension.iter().sum();
        assert!((sum + e.unclassified - e.total).abs() < 1e-12);
        assert_eq!(e.per_dimension[SflDimension::LexicalRichness.index()], 0.5);
    }
}
