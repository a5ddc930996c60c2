//! Seeded generators for planted-truth fixtures: revision triads with known
//! adoptions, fixed-effects panels with known coefficients, and annotation corpora.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use rand::seq::{IndexedRandom, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::corpus::{segment_sentences, tokenize, CorpusBundle, EssayDraft, Grade, Grader, Phase, Sentence, Stage, Suggestion, SuggestionSet};
use crate::embed::{cosine_slices, DeterministicEmbedder};
use crate::sfl::SflDimension;
use crate::stats::{PanelRow, Regressor};
use crate::uptake::sequence_similarity;

const ONSETS: [&str; 16] = ["b", "d", "f", "g", "h", "k", "l", "m", "n", "p", "r", "s", "t", "v", "w", "z"];
const NUCLEI: [&str; 5] = ["a", "e", "i", "o", "u"];
const GREEK_ONSETS: [&str; 8] = ["β", "γ", "δ", "θ", "λ", "π", "σ", "φ"];
const GREEK_NUCLEI: [&str; 3] = ["α", "ε", "ο"];
const TAGS: [&str; 6] = ["Language", "Expression", "Structure", "Plot", "Emotion", "Details"];
const CJK_TAGS: [&str; 6] = ["语言", "结构", "情节", "情感", "细节", "立意"];

/// Character inventories with disjoint n-grams, so text drawn from different
/// scripts embeds near-orthogonally under hashed n-gram embeddings.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Script {
    Latin,
    Greek,
    Cjk,
}

fn word(rng: &mut ChaCha8Rng, script: Script) -> String {
    let syllables = rng.random_range(2..=3);
    match script {
        Script::Latin => (0..syllables)
            .map(|_| format!("{}{}", ONSETS.choose(rng).unwrap(), NUCLEI.choose(rng).unwrap()))
            .collect(),
        Script::Greek => (0..syllables)
            .map(|_| format!("{}{}", GREEK_ONSETS.choose(rng).unwrap(), GREEK_NUCLEI.choose(rng).unwrap()))
            .collect(),
        // skip the block's first rows, which hold the common characters used as keywords
        Script::Cjk => (0..syllables)
            .map(|_| char::from_u32(rng.random_range(0x5E00..0x6E00)).unwrap())
            .collect(),
    }
}

/// A random sentence of pseudo-words without terminators.
pub fn random_sentence(rng: &mut ChaCha8Rng, script: Script, words: std::ops::RangeInclusive<usize>) -> String {
    let n = rng.random_range(words);
    let sep = if script == Script::Cjk { "" } else { " " };
    (0..n).map(|_| word(rng, script)).collect::<Vec<_>>().join(sep)
}

#[derive(Debug, Clone)]
pub struct TriadConfig {
    pub essays: usize,
    pub seed: u64,
    /// Embedder the cosine margins are enforced under.
    pub embed_dim: usize,
    pub embed_seed: u64,
    pub students: usize,
    pub teachers: usize,
    /// Share of essays whose teacher wrote feedback from scratch.
    pub creation_share: f64,
    /// Upper bound on a decoy's cosine to any revision candidate.
    pub decoy_margin: f64,
}

impl Default for TriadConfig {
    fn default() -> Self {
        TriadConfig {
            essays: 500,
            seed: 7,
            embed_dim: 512,
            embed_seed: 0,
            students: 50,
            teachers: 10,
            creation_share: 0.2,
            decoy_margin: 0.1,
        }
    }
}

/// A generated corpus with the generator's own adoption truth.
#[derive(Debug, Clone)]
pub struct PlantedTriad {
    pub bundle: CorpusBundle,
    /// `(pre writing_id, suggestion_id) -> adopted`.
    pub truth: BTreeMap<(String, String), bool>,
    pub conllu: String,
}

struct Fresh<'a> {
    rng: ChaCha8Rng,
    embedder: &'a DeterministicEmbedder,
}

impl Fresh<'_> {
    fn vector(&self, text: &str) -> Vec<f64> {
        self.embedder.embed_text(text).expect("pseudo-words embed to non-zero vectors")
    }

    /// A sentence whose cosine to every vector in `avoid` is at most `margin`.
    fn sentence(&mut self, script: Script, avoid: &[Vec<f64>], margin: f64, tagged: bool) -> (String, Vec<f64>) {
        loop {
            let body = random_sentence(&mut self.rng, script, 5..=9);
            let text = match (tagged && self.rng.random_bool(0.7), script) {
                (false, _) => body,
                (true, Script::Cjk) => format!("{}：{body}", CJK_TAGS.choose(&mut self.rng).unwrap()),
                (true, _) => format!("{}: {body}", TAGS.choose(&mut self.rng).unwrap()),
            };
            let v = self.vector(&text);
            if avoid.iter().all(|u| cosine_slices(&v, u) <= margin) {
                return (text, v);
            }
        }
    }
}

fn draft(writing_id: String, student: usize, teacher: usize, task: usize, phase: Phase, text: String) -> EssayDraft {
    EssayDraft {
        writing_id,
        student_id: format!("s{student:03}"),
        teacher_id: format!("t{teacher:02}"),
        task_id: format!("k{task:02}"),
        school_id: "sch01".into(),
        phase,
        text,
        timestamp: match phase {
            Phase::Pre => "2024-03-01T08:00:00Z".into(),
            Phase::Post => "2024-03-08T08:00:00Z".into(),
        },
    }
}

/// Builds essays whose post-drafts copy some finalized suggestions verbatim into new
/// sentences (adopted) while other suggestions share nothing with any revision
/// (decoys, cosine at most `decoy_margin` to every candidate).
pub fn planted_triad(cfg: &TriadConfig) -> PlantedTriad {
    let embedder = DeterministicEmbedder::new(cfg.embed_dim, cfg.embed_seed);
    let mut fresh = Fresh { rng: ChaCha8Rng::seed_from_u64(cfg.seed), embedder: &embedder };
    let mut drafts = Vec::new();
    let mut sets = Vec::new();
    let mut grades = Vec::new();
    let mut truth = BTreeMap::new();

    for e in 0..cfg.essays {
        let (student, task) = (e % cfg.students, e / cfg.students);
        let teacher = fresh.rng.random_range(0..cfg.teachers);
        let pre_id = format!("w{e:05}a");
        let post_id = format!("w{e:05}b");

        let pre: Vec<String> = (0..fresh.rng.random_range(3..=6))
            .map(|_| random_sentence(&mut fresh.rng, Script::Latin, 5..=10))
            .collect();
        let planted_n = fresh.rng.random_range(1..=3);
        let decoy_n = fresh.rng.random_range(1..=3);
        let own_n = fresh.rng.random_range(0..=1);

        // new post sentences: planted copies and the student's own additions
        let mut candidates: Vec<(String, Vec<f64>)> = Vec::new();
        for _ in 0..planted_n + own_n {
            let (t, v) = fresh.sentence(Script::Latin, &[], 1.0, candidates.len() < planted_n);
            if pre.iter().all(|p| sequence_similarity(p, &t) < 0.9) {
                candidates.push((t, v));
            }
        }
        let planted: Vec<(String, Vec<f64>)> = candidates.iter().take(planted_n).cloned().collect();
        let cand_vecs: Vec<Vec<f64>> = candidates.iter().map(|c| c.1.clone()).collect();
        let decoys: Vec<(String, Vec<f64>)> =
            (0..decoy_n).map(|_| fresh.sentence(Script::Cjk, &cand_vecs, cfg.decoy_margin, true)).collect();

        let mut finals: Vec<(Suggestion, Vec<f64>, bool)> = planted
            .iter()
            .map(|(t, v)| (t.clone(), v.clone(), true))
            .chain(decoys.iter().map(|(t, v)| (t.clone(), v.clone(), false)))
            .enumerate()
            .map(|(i, (t, v, adopted))| (Suggestion::new(format!("f{}", i + 1), t), v, adopted))
            .collect();
        finals.shuffle(&mut fresh.rng);

        let creation = fresh.rng.random_bool(cfg.creation_share);
        if !creation {
            let mut initial: Vec<Suggestion> = Vec::new();
            let mut kept_vecs: Vec<Vec<f64>> = Vec::new();
            for (s, v, _) in &finals {
                if fresh.rng.random_bool(0.6) {
                    initial.push(Suggestion::new(format!("i{}", initial.len() + 1), s.text.clone()));
                    kept_vecs.push(v.clone());
                }
            }
            let final_vecs: Vec<Vec<f64>> = finals.iter().map(|f| f.1.clone()).collect();
            for _ in 0..fresh.rng.random_range(0..=2) {
                let (t, _) = fresh.sentence(Script::Greek, &final_vecs, 0.5, false);
                initial.push(Suggestion::new(format!("i{}", initial.len() + 1), t));
            }
            initial.shuffle(&mut fresh.rng);
            for (i, s) in initial.iter_mut().enumerate() {
                s.suggestion_id = format!("i{}", i + 1);
            }
            sets.push(SuggestionSet { writing_id: pre_id.clone(), stage: Stage::Initial, suggestions: initial });
        }
        for (s, _, adopted) in &finals {
            truth.insert((pre_id.clone(), s.suggestion_id.clone()), *adopted);
        }
        sets.push(SuggestionSet {
            writing_id: pre_id.clone(),
            stage: Stage::Final,
            suggestions: finals.iter().map(|f| f.0.clone()).collect(),
        });

        let mut post = pre.clone();
        for (t, _) in &candidates {
            let at = fresh.rng.random_range(0..=post.len());
            post.insert(at, t.clone());
        }
        let join = |v: &[String]| v.iter().map(|s| format!("{s}。")).collect::<String>();
        drafts.push(draft(pre_id.clone(), student, teacher, task, Phase::Pre, join(&pre)));
        drafts.push(draft(post_id.clone(), student, teacher, task, Phase::Post, join(&post)));

        let base: f64 = fresh.rng.random_range(55.0..85.0);
        let gain = 2.0 * planted_n as f64 + fresh.rng.random_range(-1.5..1.5);
        for (grader, shift) in [(Grader::Teacher, 0.0), (Grader::Llm, fresh.rng.random_range(-3.0..3.0))] {
            let pre_grade = ((base + shift) * 100.0).round() / 100.0;
            let post_grade = ((base + shift + gain).clamp(0.0, 100.0) * 100.0).round() / 100.0;
            grades.push(Grade { writing_id: pre_id.clone(), grader, phase: Phase::Pre, value: pre_grade });
            grades.push(Grade { writing_id: post_id.clone(), grader, phase: Phase::Post, value: post_grade });
        }
    }

    let bundle = CorpusBundle::new(drafts, sets, grades).expect("generated corpus is valid");
    let conllu = synthetic_conllu(&bundle, cfg.seed ^ 0x5eed);
    PlantedTriad { bundle, truth, conllu }
}

const POS: [&str; 8] = ["NOUN", "VERB", "ADJ", "ADV", "PRON", "ADP", "DET", "PROPN"];
const RELS: [&str; 6] = ["nsubj", "obj", "amod", "advmod", "case", "det"];

/// Random dependency trees for every segmented sentence of every draft, with
/// `# writing_id` and `# sent_id` comments. Tree shape and tags depend on the
/// sentence text, so identical sentences get identical parses.
pub fn synthetic_conllu(bundle: &CorpusBundle, seed: u64) -> String {
    let mut out = String::new();
    for d in &bundle.drafts {
        for s in segment_sentences(&d.writing_id, &d.text) {
            let tokens = tokenize(&s.text);
            if tokens.is_empty() {
                continue;
            }
            let text_seed = crate::embed::fnv1a(seed, &[s.text.as_bytes()]);
            let mut rng = ChaCha8Rng::seed_from_u64(text_seed);
            let n = tokens.len();
            let mut order: Vec<usize> = (1..=n).collect();
            order.shuffle(&mut rng);
            let mut head = vec![0usize; n + 1];
            for i in 1..n {
                head[order[i]] = order[rng.random_range(0..i)];
            }
            let _ = writeln!(out, "# writing_id = {}", d.writing_id);
            let _ = writeln!(out, "# sent_id = {}", s.sentence_id);
            for (i, tok) in tokens.iter().enumerate() {
                let id = i + 1;
                let rel = if head[id] == 0 { "root" } else { RELS.choose(&mut rng).unwrap() };
                let _ = writeln!(
                    out,
                    "{id}\t{tok}\t{tok}\t{}\t_\t_\t{}\t{rel}\t_\t_",
                    POS.choose(&mut rng).unwrap(),
                    head[id]
                );
            }
            out.push('\n');
        }
    }
    out
}

#[derive(Debug, Clone)]
pub struct PanelConfig {
    pub students: usize,
    pub teachers: usize,
    pub tasks: usize,
    pub noise_sd: f64,
    pub seed: u64,
}

impl Default for PanelConfig {
    fn default() -> Self {
        PanelConfig { students: 50, teachers: 10, tasks: 20, noise_sd: 0.0, seed: 1 }
    }
}

/// Planted model: coefficients by regressor name, in Model 2 order.
pub fn planted_coefficients() -> Vec<(Regressor, f64)> {
    let values = [0.8, 1.6, 0.35, 4.0, -2.5, 1.2, 3.1, -0.7, 2.2];
    Regressor::model2().into_iter().zip(values).collect()
}

/// One row per (student, task) with a randomly assigned teacher, regressors drawn
/// independently and `dependent = x'beta + student + teacher + task + noise`.
pub fn synthetic_panel(cfg: &PanelConfig) -> Vec<PanelRow> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let coefs = planted_coefficients();
    let effect = Normal::new(0.0, 5.0).unwrap();
    let std_normal = Normal::new(0.0, 1.0).unwrap();
    let student_fx: Vec<f64> = (0..cfg.students).map(|_| effect.sample(&mut rng)).collect();
    let teacher_fx: Vec<f64> = (0..cfg.teachers).map(|_| effect.sample(&mut rng)).collect();
    let task_fx: Vec<f64> = (0..cfg.tasks).map(|_| effect.sample(&mut rng)).collect();
    let mut rows = Vec::with_capacity(cfg.students * cfg.tasks);
    for s in 0..cfg.students {
        for k in 0..cfg.tasks {
            let t = rng.random_range(0..cfg.teachers);
            let mut row = PanelRow {
                student_id: format!("s{s:03}"),
                teacher_id: format!("t{t:02}"),
                task_id: format!("k{k:02}"),
                dependent: 0.0,
                fua_l: rng.random_range(0..8),
                fua_t: rng.random_range(0..6),
                sfl_delta: [0.0; 6],
                baseline_score: rng.random_range(40.0..95.0),
            };
            for d in SflDimension::ALL {
                row.sfl_delta[d.index()] = 0.05 * std_normal.sample(&mut rng);
            }
            let signal: f64 = coefs.iter().map(|(r, b)| b * row.value(*r)).sum();
            let noise = if cfg.noise_sd > 0.0 { cfg.noise_sd * std_normal.sample(&mut rng) } else { 0.0 };
            row.dependent = signal + student_fx[s] + teacher_fx[t] + task_fx[k] + noise;
            rows.push(row);
        }
    }
    rows
}

/// `n` sentences spread over writings of ten sentences each.
pub fn annotation_sentences(n: usize, seed: u64) -> Vec<Sentence> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|i| Sentence {
            writing_id: format!("a{:05}", i / 10),
            sentence_id: (i % 10) as u32 + 1,
            text: format!("{} {i}", random_sentence(&mut rng, Script::Latin, 4..=8)),
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ideational::parse_conllu;

    #[test]
    fn triad_is_reproducible_and_valid() {
        let cfg = TriadConfig { essays: 20, ..Default::default() };
        let a = planted_triad(&cfg);
        let b = planted_triad(&cfg);
        assert_eq!(a.bundle.to_jsonl_string(), b.bundle.to_jsonl_string());
        assert_eq!(a.bundle.pairs().len(), 20);
        assert!(a.truth.values().any(|v| *v) && a.truth.values().any(|v| !*v));
        let parsed = parse_conllu(&a.conllu).unwrap();
        assert!(parsed.warnings.is_empty());
        assert!(parsed.graphs.iter().all(|g| g.writing_id.is_some()));
    }

    #[test]
    fn planted_truth_is_recovered() {
        let cfg = TriadConfig { essays: 40, ..Default::default() };
        let t = planted_triad(&cfg);
        let embedder = crate::embed::Embedder::deterministic(cfg.embed_dim, cfg.embed_seed);
        let thresholds = crate::uptake::Thresholds::default();
        for pair in t.bundle.pairs() {
            let pre = segment_sentences(&pair.pre.writing_id, &pair.pre.text);
            let post = segment_sentences(&pair.post.writing_id, &pair.post.text);
            let input = crate::uptake::UptakeInput {
                writing_id: &pair.pre.writing_id,
                d_pre: &pre,
                d_post: &post,
                s_initial: t.bundle.suggestion_set(&pair.pre.writing_id, Stage::Initial),
                s_final: t.bundle.suggestion_set(&pair.pre.writing_id, Stage::Final).unwrap(),
            };
            let out = crate::uptake::compute_uptake(&input, &thresholds, &embedder).unwrap();
            for o in &out.record.per_suggestion {
                let expected = t.truth[&(pair.pre.writing_id.clone(), o.suggestion_id.clone())];
                assert_eq!(o.adopted, expected, "{} {}", pair.pre.writing_id, o.suggestion_id);
            }
        }
    }

    #[test]
    fn panel_shape() {
        let rows = synthetic_panel(&PanelConfig::default());
        assert_eq!(rows.len(), 1000);
        let teachers: std::collections::BTreeSet<_> = rows.iter().map(|r| &r.teacher_id).collect();
        assert_eq!(teachers.len(), 10);
    }
}
