//! `metrics`: the six per-draft measures, then pre/post growth and label-shift tables.

use std::collections::{BTreeMap, HashMap};

use anyhow::{Context, Result};
use rayon::prelude::*;
use revisio_core::corpus::{tokenize, CorpusBundle, EssayDraft, Phase};
use revisio_core::embed::Embedder;
use revisio_core::ideational::{mattr, parse_conllu, syntactic_diversity, DependencyGraph};
use revisio_core::interpersonal::{aggregate_labels, spectrum_entropy, Task, APPROACH_EMOTIONS, AVOIDANCE_EMOTIONS};
use revisio_core::sfl::{SflDimension, SflVector};
use revisio_core::stats::wilcoxon_signed_rank;
use revisio_core::textual::{semantic_dispersion, semantic_shift, EssayEmbedding};
use serde::{Deserialize, Serialize};

use super::{analysed_sentences, labels_file, load_bundle, pool, read_jsonl, METRICS_FILE};
use crate::config::RunConfig;
use crate::output::{to_jsonl, Manifest, OutDir};
use crate::table::{fixed, signed_starred, Table};

/// One draft's measures, with the label counts behind the two entropies.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EssayMetrics {
    pub writing_id: String,
    pub student_id: String,
    pub teacher_id: String,
    pub task_id: String,
    pub phase: Phase,
    pub sentences: usize,
    pub tokens: usize,
    pub vector: SflVector,
    /// Dimensions whose input was too small for the measure to be defined.
    pub degenerate: Vec<SflDimension>,
    pub emotion_counts: Vec<u64>,
    pub moral_counts: Vec<u64>,
}

impl EssayMetrics {
    pub fn proportions(&self, task: Task) -> Vec<f64> {
        let counts = match task {
            Task::Emotion => &self.emotion_counts,
            Task::Moral => &self.moral_counts,
        };
        counts.iter().map(|&c| c as f64 / self.sentences as f64).collect()
    }
}

pub fn load_metrics(out: &OutDir) -> Result<Vec<EssayMetrics>> {
    read_jsonl(out, METRICS_FILE).context("run metrics first")
}

/// `writing_id -> labels` from a final-label TSV.
fn read_labels(out: &OutDir, task: Task) -> Result<HashMap<String, Vec<String>>> {
    let p = out.path(&labels_file(task));
    let raw = std::fs::read_to_string(&p)
        .with_context(|| format!("reading {} (run annotate for {task} first)", p.display()))?;
    let mut map: HashMap<String, Vec<String>> = HashMap::new();
    for (i, line) in raw.lines().enumerate().skip(1) {
        let f: Vec<&str> = line.split('\t').collect();
        if f.len() < 3 {
            anyhow::bail!("{} line {}: expected writing_id, sentence_id, label", p.display(), i + 1);
        }
        map.entry(f[0].to_string()).or_default().push(f[2].to_string());
    }
    Ok(map)
}

struct Inputs<'a> {
    cfg: &'a RunConfig,
    graphs: HashMap<String, Vec<DependencyGraph>>,
    labels: [HashMap<String, Vec<String>>; 2],
    embedder: Embedder,
}

fn measure(inp: &Inputs<'_>, d: &EssayDraft) -> Result<EssayMetrics, String> {
    let cfg = inp.cfg;
    let sentences = analysed_sentences(cfg, d);
    if sentences.is_empty() {
        return Err("no analysable sentences".into());
    }
    let tokens = tokenize(&d.text);
    let mut degenerate = Vec::new();
    let lex = mattr(&tokens, cfg.mattr_window).map_err(|e| e.to_string())?;
    let graphs = inp.graphs.get(&d.writing_id).ok_or("no dependency parse")?;
    let syn = syntactic_diversity(graphs, cfg.wl_iterations);
    let texts: Vec<&str> = sentences.iter().map(|s| s.text.as_str()).collect();
    let vectors = inp.embedder.embed_batch(&texts).map_err(|e| format!("embedding: {e}"))?;
    let emb = EssayEmbedding::new(&d.writing_id, vectors).map_err(|e| e.to_string())?;
    let dis = semantic_dispersion(&emb, cfg.coherence_polarity);
    let shift = semantic_shift(&emb, cfg.coherence_polarity);
    let mut entropies = [0.0; 2];
    let mut counts: [Vec<u64>; 2] = Default::default();
    for (i, task) in [Task::Emotion, Task::Moral].into_iter().enumerate() {
        let labels = inp.labels[i].get(&d.writing_id).map_or(&[][..], |v| v.as_slice());
        let dist = aggregate_labels(&d.writing_id, labels, sentences.len(), task).map_err(|e| e.to_string())?;
        entropies[i] = spectrum_entropy(&dist, cfg.entropy_base).map_err(|e| e.to_string())?;
        counts[i] = dist.counts;
    }
    for (dim, s) in [(SflDimension::SyntacticDiversity, syn), (SflDimension::SemanticDispersion, dis), (SflDimension::SemanticShift, shift)] {
        if s.degenerate {
            degenerate.push(dim);
        }
    }
    let [emotion_counts, moral_counts] = counts;
    Ok(EssayMetrics {
        writing_id: d.writing_id.clone(),
        student_id: d.student_id.clone(),
        teacher_id: d.teacher_id.clone(),
        task_id: d.task_id.clone(),
        phase: d.phase,
        sentences: sentences.len(),
        tokens: tokens.len(),
        vector: SflVector::from_array([lex, syn.value, dis.value, shift.value, entropies[0], entropies[1]]),
        degenerate,
        emotion_counts,
        moral_counts,
    })
}

/// `(pre, post)` metric pairs for every complete student-task pair.
pub fn paired<'a>(bundle: &CorpusBundle, metrics: &'a [EssayMetrics]) -> Vec<(&'a EssayMetrics, &'a EssayMetrics)> {
    let by_id: HashMap<&str, &EssayMetrics> = metrics.iter().map(|e| (e.writing_id.as_str(), e)).collect();
    bundle
        .pairs()
        .iter()
        .filter_map(|p| Some((*by_id.get(p.pre.writing_id.as_str())?, *by_id.get(p.post.writing_id.as_str())?)))
        .collect()
}

fn growth_row(label: &str, pairs: &[(f64, f64)]) -> Vec<String> {
    if pairs.is_empty() {
        return vec![label.to_string(), "NA".into(), "NA".into(), "NA".into(), "NA".into(), "0".into()];
    }
    let k = pairs.len() as f64;
    let pre = pairs.iter().map(|p| p.0).sum::<f64>() / k;
    let post = pairs.iter().map(|p| p.1).sum::<f64>() / k;
    let test = wilcoxon_signed_rank(pairs).expect("non-empty finite pairs");
    let delta = if pre == 0.0 {
        "NA".to_string()
    } else {
        signed_starred(100.0 * (post - pre) / pre.abs(), 3, test.stars)
    };
    vec![label.to_string(), fixed(pre, 3), fixed(post, 3), delta, format!("{:.6}", test.p_value), pairs.len().to_string()]
}

pub fn run(cfg: &RunConfig, out: &OutDir, m: &mut Manifest) -> Result<()> {
    let bundle = load_bundle(out)?;
    let conllu_path = cfg.paths.conllu.as_ref().context("paths.conllu is not set")?;
    let raw = std::fs::read_to_string(conllu_path).with_context(|| format!("reading {}", conllu_path.display()))?;
    let parsed = parse_conllu(&raw).with_context(|| format!("parsing {}", conllu_path.display()))?;
    for w in &parsed.warnings {
        m.warn(format!("conllu line {} (sentence {}): {}", w.line, w.sentence_id, w.message));
    }
    let mut graphs: HashMap<String, Vec<DependencyGraph>> = HashMap::new();
    for g in parsed.graphs {
        if let Some(w) = g.writing_id.clone() {
            graphs.entry(w).or_default().push(g);
        }
    }
    let inputs = Inputs {
        cfg,
        graphs,
        labels: [read_labels(out, Task::Emotion)?, read_labels(out, Task::Moral)?],
        embedder: cfg.embedding.build()?,
    };
    let results: Vec<Result<EssayMetrics, String>> =
        pool(cfg)?.install(|| bundle.drafts.par_iter().map(|d| measure(&inputs, d)).collect());
    let mut metrics = Vec::new();
    let mut skipped = 0;
    for (d, r) in bundle.drafts.iter().zip(results) {
        match r {
            Ok(e) => metrics.push(e),
            Err(e) => {
                skipped += 1;
                m.warn(format!("{}: skipped: {e}", d.writing_id));
            }
        }
    }
    out.write(m, METRICS_FILE, to_jsonl(&metrics))?;

    let pairs = paired(&bundle, &metrics);
    let mut t = Table::new(
        "metric_growth",
        "Linguistic growth between initial and revised drafts",
        &["dimension", "mean_pre", "mean_post", "delta_pct", "p_value", "n_pairs"],
    );
    for d in SflDimension::ALL {
        let v: Vec<(f64, f64)> = pairs.iter().map(|(a, b)| (a.vector.get(d), b.vector.get(d))).collect();
        t.push(growth_row(d.title(), &v));
    }
    t.notes.push(format!("{} drafts measured, {skipped} skipped", metrics.len()));
    t.notes.push("delta_pct is the relative change of the means; stars from the Wilcoxon signed-rank test".into());
    t.write(out, m)?;

    let mut s = Table::new(
        "label_shift",
        "Shifts in emotional and moral label proportions",
        &["category", "mean_pre", "mean_post", "delta_pct", "p_value", "n_pairs"],
    );
    for task in [Task::Emotion, Task::Moral] {
        let props: Vec<(Vec<f64>, Vec<f64>)> = pairs.iter().map(|(a, b)| (a.proportions(task), b.proportions(task))).collect();
        let mut groups: BTreeMap<usize, (String, Vec<usize>)> = BTreeMap::new();
        for (i, c) in task.categories().iter().enumerate() {
            groups.insert(i, (format!("{task}:{c}"), vec![i]));
        }
        if task == Task::Emotion {
            let idx = |names: &[&str]| names.iter().filter_map(|n| task.category_index(n)).collect::<Vec<_>>();
            groups.insert(100, ("emotion:approach".into(), idx(&APPROACH_EMOTIONS)));
            groups.insert(101, ("emotion:avoidance".into(), idx(&AVOIDANCE_EMOTIONS)));
        }
        for (label, members) in groups.into_values() {
            let v: Vec<(f64, f64)> = props
                .iter()
                .map(|(a, b)| (members.iter().map(|&i| a[i]).sum(), members.iter().map(|&i| b[i]).sum()))
                .collect();
            s.push(growth_row(&label, &v));
        }
    }
    s.write(out, m)
}
