//! End-to-end acceptance checks. Each criterion prints one `PASS`/`FAIL` line;
//! run with `--nocapture` to see them.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::path::Path;
use std::sync::Arc;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use revisio_cli::config::RunConfig;
use revisio_cli::{execute, Command};
use revisio_core::annotate::{
    cohen_kappa, completeness_loop, final_labels_tsv, fleiss_kappa, validate_tsv, AbaClients, AbaRunner, FailureMode,
    LlmClient, LoopConfig, MockLlm, PromptSet, RunLedger, Schema, SentenceKey, StreamFile, ViolationClass,
};
use revisio_core::corpus::{segment_sentences, Sentence, Stage, Suggestion, SuggestionSet};
use revisio_core::embed::{Embedder, EmbeddingVector, FileBackend};
use revisio_core::ideational::{mattr, syntactic_diversity, DependencyGraph};
use revisio_core::interpersonal::{aggregate_labels, spectrum_entropy, Task};
use revisio_core::stats::{fe_regression, mann_whitney_u, wilcoxon_signed_rank, Regressor};
use revisio_core::synth::{
    annotation_sentences, planted_coefficients, planted_triad, synthetic_conllu, synthetic_panel, PanelConfig,
    TriadConfig,
};
use revisio_core::textual::{semantic_dispersion, semantic_shift, EssayEmbedding, Polarity};
use revisio_core::uptake::{
    attention_match, attention_weights, compute_uptake, match_score, revision_candidates, OriginLabel, Thresholds,
    UptakeInput,
};

type Check = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

struct Criterion {
    id: u8,
    name: &'static str,
    budget: Option<Duration>,
    check: fn() -> Check,
}

fn run(c: &Criterion) -> bool {
    let start = Instant::now();
    let outcome = std::panic::catch_unwind(c.check).unwrap_or_else(|_| Err("panicked".into()));
    let elapsed = start.elapsed();
    let outcome = match (outcome, c.budget) {
        (Ok(_), Some(b)) if elapsed > b => Err(format!("took {elapsed:.1?}, budget {b:?}")),
        (o, _) => o,
    };
    let (tag, detail) = match &outcome {
        Ok(d) => ("PASS", d.clone()),
        Err(d) => ("FAIL", d.clone()),
    };
    println!("{tag} [{:>2}] {}: {detail} ({elapsed:.2?})", c.id, c.name);
    outcome.is_ok()
}

// ---------------------------------------------------------------- 1: oracles

fn oracle_mattr(tokens: &[String], w: usize) -> f64 {
    let distinct = |s: &[String]| s.iter().collect::<BTreeSet<_>>().len() as f64;
    if tokens.len() < w {
        return distinct(tokens) / tokens.len() as f64;
    }
    let windows: Vec<f64> = tokens.windows(w).map(|win| distinct(win) / w as f64).collect();
    windows.iter().sum::<f64>() / windows.len() as f64
}

fn plain_cos(a: &[f64], b: &[f64]) -> f64 {
    let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
    let na: f64 = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    let nb: f64 = b.iter().map(|x| x * x).sum::<f64>().sqrt();
    dot / (na * nb)
}

fn oracle_dispersion(v: &[Vec<f64>], distance: bool) -> Option<(f64, f64)> {
    if v.len() < 2 {
        return None;
    }
    let f = |c: f64| if distance { 1.0 - c } else { c };
    let mut total = 0.0;
    let mut pairs = 0.0;
    for i in 0..v.len() {
        for j in 0..v.len() {
            if i != j {
                total += f(plain_cos(&v[i], &v[j]));
                pairs += 1.0;
            }
        }
    }
    let shift: f64 = (1..v.len()).map(|i| f(plain_cos(&v[i - 1], &v[i]))).sum::<f64>() / (v.len() - 1) as f64;
    Some((total / pairs, shift))
}

type Tree = Vec<(String, u32, String)>;

/// Relabels with full label strings (no compression) and counts every label seen.
fn oracle_wl_histogram(tree: &Tree, h: usize) -> HashMap<String, f64> {
    let n = tree.len();
    let mut adj: Vec<Vec<(String, usize)>> = vec![Vec::new(); n];
    for (i, (_, head, rel)) in tree.iter().enumerate() {
        if *head > 0 {
            let j = *head as usize - 1;
            adj[i].push((rel.clone(), j));
            adj[j].push((rel.clone(), i));
        }
    }
    let mut labels: Vec<String> = tree.iter().map(|(pos, _, _)| pos.clone()).collect();
    let mut hist = HashMap::new();
    for iteration in 0..=h {
        for l in &labels {
            *hist.entry(format!("{iteration}:{l}")).or_insert(0.0) += 1.0;
        }
        let next = (0..n)
            .map(|i| {
                let mut neigh: Vec<String> = adj[i].iter().map(|(r, j)| format!("{r}={}", labels[*j])).collect();
                neigh.sort();
                format!("({}|{})", labels[i], neigh.join(","))
            })
            .collect();
        labels = next;
    }
    hist
}

fn oracle_diversity(trees: &[Tree], h: usize) -> Option<f64> {
    if trees.len() < 2 {
        return None;
    }
    let hists: Vec<_> = trees.iter().map(|t| oracle_wl_histogram(t, h)).collect();
    let k = |a: &HashMap<String, f64>, b: &HashMap<String, f64>| -> f64 {
        a.iter().map(|(key, x)| x * b.get(key).copied().unwrap_or(0.0)).sum()
    };
    let mut total = 0.0;
    let mut pairs = 0.0;
    for i in 0..trees.len() {
        for j in 0..trees.len() {
            if i != j {
                let sim = k(&hists[i], &hists[j]) / (k(&hists[i], &hists[i]) * k(&hists[j], &hists[j])).sqrt();
                total += (1.0 - sim).clamp(0.0, 1.0);
                pairs += 1.0;
            }
        }
    }
    Some(total / pairs)
}

fn random_tree(rng: &mut ChaCha8Rng, len: usize) -> Tree {
    const POS: [&str; 4] = ["NOUN", "VERB", "ADJ", "ADV"];
    const REL: [&str; 3] = ["nsubj", "obj", "amod"];
    let root = rng.random_range(0..len);
    (0..len)
        .map(|i| {
            let head = if i == root {
                0
            } else if i == 0 || rng.random_bool(0.3) {
                root as u32 + 1
            } else {
                rng.random_range(0..i) as u32 + 1
            };
            let head = if head as usize == i + 1 { root as u32 + 1 } else { head };
            (POS[rng.random_range(0..POS.len())].to_string(), head, REL[rng.random_range(0..REL.len())].to_string())
        })
        .collect()
}

fn metric_oracles() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    let mut worst = 0.0f64;
    let mut note = |d: f64| worst = worst.max(d);
    for case in 0..200 {
        let n_sent = rng.random_range(1..=12usize);
        let n_tok = rng.random_range(n_sent..=60usize);

        let tokens: Vec<String> = (0..n_tok).map(|_| format!("t{}", rng.random_range(0..15))).collect();
        let w = rng.random_range(1..=60usize);
        let got = mattr(&tokens, w).map_err(|e| format!("case {case}: mattr {e}"))?;
        note((got - oracle_mattr(&tokens, w)).abs());

        let vecs: Vec<Vec<f64>> =
            (0..n_sent).map(|_| (0..8).map(|_| rng.random_range(-1.0..1.0)).collect()).collect();
        let embedded = EssayEmbedding::new(
            format!("w{case}"),
            vecs.iter().enumerate().map(|(i, v)| EmbeddingVector::new(format!("s{i}"), v.clone()).unwrap()).collect(),
        )
        .unwrap();
        for (polarity, distance) in [(Polarity::Distance, true), (Polarity::Similarity, false)] {
            let d = semantic_dispersion(&embedded, polarity);
            let s = semantic_shift(&embedded, polarity);
            match oracle_dispersion(&vecs, distance) {
                None => ensure(d.degenerate && s.degenerate, || format!("case {case}: expected degenerate"))?,
                Some((od, os)) => {
                    ensure(!d.degenerate && !s.degenerate, || format!("case {case}: unexpected degenerate"))?;
                    note((d.value - od).abs());
                    note((s.value - os).abs());
                }
            }
        }

        let mut sizes = vec![1usize; n_sent];
        for _ in n_sent..n_tok {
            sizes[rng.random_range(0..n_sent)] += 1;
        }
        let trees: Vec<Tree> = sizes.iter().map(|&l| random_tree(&mut rng, l)).collect();
        let graphs: Vec<DependencyGraph> = trees
            .iter()
            .enumerate()
            .map(|(i, t)| {
                let rows: Vec<(&str, u32, &str)> = t.iter().map(|(p, h, r)| (p.as_str(), *h, r.as_str())).collect();
                DependencyGraph::from_rows(format!("s{i}"), &rows)
            })
            .collect();
        let h = rng.random_range(0..=3usize);
        let got = syntactic_diversity(&graphs, h);
        match oracle_diversity(&trees, h) {
            None => ensure(got.degenerate, || format!("case {case}: expected degenerate diversity"))?,
            Some(o) => note((got.value - o).abs()),
        }

        let task = if case % 2 == 0 { Task::Emotion } else { Task::Moral };
        let cats = task.categories();
        let labels: Vec<&str> =
            (0..rng.random_range(0..=n_sent)).map(|_| cats[rng.random_range(0..cats.len())]).collect();
        let dist = aggregate_labels("w", &labels, n_sent, task).unwrap();
        let got = spectrum_entropy(&dist, 2.0).unwrap();
        let oracle: f64 = cats
            .iter()
            .map(|c| labels.iter().filter(|l| *l == c).count() as f64 / n_sent as f64)
            .filter(|p| *p > 0.0)
            .map(|p| -p * p.log2())
            .sum();
        note((got - oracle).abs());
    }
    ensure(worst < 1e-10, || format!("max deviation {worst:e}"))?;
    Ok(format!("200 inputs, max deviation {worst:.1e}"))
}

// ------------------------------------------------------------ 2: attention

fn file_embedder(entries: &[(&str, Vec<f64>)]) -> Embedder {
    let dim = entries[0].1.len();
    let map: HashMap<String, Vec<f64>> = entries.iter().map(|(k, v)| (k.to_string(), v.clone())).collect();
    Embedder::new(Box::new(FileBackend::from_map("fixture", map)), dim, 64)
}

fn post(writing_id: &str, texts: &[&str]) -> Vec<Sentence> {
    texts
        .iter()
        .enumerate()
        .map(|(i, t)| Sentence { writing_id: writing_id.into(), sentence_id: i as u32 + 1, text: t.to_string() })
        .collect()
}

fn attention() -> Check {
    let expected = (0.9 * 8f64.exp() + 0.1) / (8f64.exp() + 1.0);
    let direct = match_score(&[0.9, 0.1], 0.1);
    ensure((direct - 0.89973).abs() < 1e-4, || format!("match_score gave {direct}"))?;

    let embedder = file_embedder(&[
        ("S", vec![1.0, 0.0]),
        ("C1", vec![0.9, (1.0f64 - 0.81).sqrt()]),
        ("C2", vec![0.1, (1.0f64 - 0.01).sqrt()]),
    ]);
    let candidates = revision_candidates(&[], &post("w", &["C1", "C2"]), 0.95);
    let via_embedder = attention_match(&Suggestion::new("f1", "S"), &candidates, 0.1, &embedder).map_err(|e| e.to_string())?;
    ensure((via_embedder - 0.89973).abs() < 1e-4, || format!("attention_match gave {via_embedder}"))?;

    let mut rng = ChaCha8Rng::seed_from_u64(202);
    let mut worst = 0.0f64;
    for _ in 0..10_000 {
        let n = rng.random_range(1..=20);
        let cos: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..=1.0)).collect();
        let tau = rng.random_range(0.01..2.0);
        let w = attention_weights(&cos, tau);
        ensure(w.iter().all(|x| *x >= 0.0), || "negative weight".into())?;
        worst = worst.max((w.iter().sum::<f64>() - 1.0).abs());
    }
    ensure(worst <= 1e-9, || format!("softmax mass off by {worst:e}"))?;
    Ok(format!("m = {direct:.5} (closed form {expected:.5}), via embedder {via_embedder:.5}, 10000 softmax sums within {worst:.1e}"))
}

// -------------------------------------------------------------- 3: boundaries

fn boundaries() -> Check {
    let base = "abcdefghijklmnopqrst";
    let edited = "abcdefghijXlmnopqrst";
    let embedder = file_embedder(&[
        ("S", vec![1.0, 0.0, 0.0, 0.0, 0.0]),
        ("I", vec![3.0, 2.0, 1.0, 1.0, 1.0]),
        ("C", vec![1.0, 1.0, 1.0, 1.0, 0.0]),
    ]);
    let pre = post("w1", &["P", base]);
    let after = post("w1", &["C", edited]);
    let initial = SuggestionSet { writing_id: "w1".into(), stage: Stage::Initial, suggestions: vec![Suggestion::new("i1", "I")] };
    let finals = SuggestionSet { writing_id: "w1".into(), stage: Stage::Final, suggestions: vec![Suggestion::new("f1", "S")] };
    let input = UptakeInput { writing_id: "w1", d_pre: &pre, d_post: &after, s_initial: Some(&initial), s_final: &finals };
    let out = compute_uptake(&input, &Thresholds::default(), &embedder).map_err(|e| e.to_string())?;
    let o = &out.record.per_suggestion[0];
    ensure(o.origin_similarity == 0.75 && o.origin == OriginLabel::T, || format!("origin {:?} at {}", o.origin, o.origin_similarity))?;
    ensure(o.match_score == 0.5 && !o.adopted, || format!("match {} adopted {}", o.match_score, o.adopted))?;
    let texts = out.candidates.texts();
    ensure(texts == vec!["C"], || format!("candidates {texts:?}"))?;
    let sim = out.candidates.candidates[0].max_similarity;
    let boundary = revision_candidates(&pre[1..], &after[1..], 0.95);
    ensure(boundary.is_empty(), || "similarity 0.95 counted as a revision".into())?;
    Ok(format!("cos 0.75 -> T, match 0.5 -> not adopted, similarity 0.95 -> not a candidate (C at {sim:.3})"))
}

// --------------------------------------------------------------- 4: planted

fn planted() -> Check {
    let cfg = TriadConfig::default();
    let t = planted_triad(&cfg);
    let embedder = Embedder::deterministic(cfg.embed_dim, cfg.embed_seed);
    let thresholds = Thresholds::default();
    let (mut tp, mut fp, mut fneg, mut seen) = (0u32, 0u32, 0u32, 0usize);
    for pair in t.bundle.pairs() {
        let pre = segment_sentences(&pair.pre.writing_id, &pair.pre.text);
        let after = segment_sentences(&pair.post.writing_id, &pair.post.text);
        let Some(s_final) = t.bundle.suggestion_set(&pair.pre.writing_id, Stage::Final) else { continue };
        let input = UptakeInput {
            writing_id: &pair.pre.writing_id,
            d_pre: &pre,
            d_post: &after,
            s_initial: t.bundle.suggestion_set(&pair.pre.writing_id, Stage::Initial),
            s_final,
        };
        let out = compute_uptake(&input, &thresholds, &embedder).map_err(|e| e.to_string())?;
        for o in &out.record.per_suggestion {
            let truth = *t
                .truth
                .get(&(pair.pre.writing_id.clone(), o.suggestion_id.clone()))
                .ok_or_else(|| format!("no truth for {} {}", pair.pre.writing_id, o.suggestion_id))?;
            seen += 1;
            match (o.adopted, truth) {
                (true, true) => tp += 1,
                (true, false) => fp += 1,
                (false, true) => fneg += 1,
                (false, false) => {}
            }
        }
    }
    ensure(seen == t.truth.len(), || format!("{seen} of {} suggestions scored", t.truth.len()))?;
    let precision = tp as f64 / (tp + fp).max(1) as f64;
    let recall = tp as f64 / (tp + fneg).max(1) as f64;
    ensure(fp == 0 && fneg == 0 && tp > 0, || format!("precision {precision:.4} recall {recall:.4}"))?;
    Ok(format!("{} essays, {seen} suggestions, precision {precision} recall {recall}", cfg.essays))
}

// ---------------------------------------------------------- 5: completeness

fn runner(seed: u64, poisoned: &[String]) -> AbaRunner {
    let mut mock = MockLlm::new(Task::Emotion, seed).with_failures(FailureMode::Rate(0.3));
    for p in poisoned {
        mock = mock.poison(p.clone());
    }
    let m: Arc<dyn LlmClient> = Arc::new(mock);
    AbaRunner {
        task: Task::Emotion,
        clients: AbaClients { agent_a: m.clone(), agent_b: m, max_retries: 3 },
        prompts: PromptSet::builtin(Task::Emotion),
    }
}

/// Runs to completion in `dir`, optionally dying after `stop` commits first, and
/// returns the ledger and the labels TSV.
fn annotate_into(dir: &Path, sentences: &[Sentence], poisoned: &[String], stop: Option<usize>) -> Result<(RunLedger, String), String> {
    let map: HashMap<SentenceKey, Sentence> = sentences.iter().map(|s| (SentenceKey::of(s), s.clone())).collect();
    let keys = || sentences.iter().map(SentenceKey::of);
    let stream = dir.join("stream.jsonl");
    let ledger_path = dir.join("ledger.jsonl");
    let r = runner(9, poisoned);
    let e = |e: revisio_core::annotate::AnnotateError| e.to_string();
    if stop.is_some() {
        let (mut sink, _) = StreamFile::open(&stream).map_err(e)?;
        let mut ledger = RunLedger::open(&ledger_path, keys()).map_err(e)?;
        let cfg = LoopConfig { batch_size: 30, workers: 5, max_rounds: 10, stop_after_commits: stop };
        let s = completeness_loop(&mut ledger, &map, &r, &mut sink, &cfg).map_err(e)?;
        ensure(s.interrupted, || "run was not interrupted".into())?;
    }
    let (mut sink, prior) = StreamFile::open(&stream).map_err(e)?;
    let mut ledger = RunLedger::open(&ledger_path, keys()).map_err(e)?;
    ledger.done.extend(prior.iter().map(|r| r.key.clone()));
    let cfg = LoopConfig { batch_size: 30, workers: 5, max_rounds: 10, stop_after_commits: None };
    completeness_loop(&mut ledger, &map, &r, &mut sink, &cfg).map_err(e)?;
    drop(sink);
    let (_, records) = StreamFile::open(&stream).map_err(e)?;
    Ok((ledger, final_labels_tsv(&records)))
}

fn completeness() -> Check {
    let sentences = annotation_sentences(1000, 5);
    let poisoned: Vec<String> = [13usize, 404, 777].iter().map(|&i| sentences[i].text.clone()).collect();
    let clean_dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let resumed_dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let (ledger, clean) = annotate_into(clean_dir.path(), &sentences, &poisoned, None)?;
    let (resumed_ledger, resumed) = annotate_into(resumed_dir.path(), &sentences, &poisoned, Some(7))?;

    let missing = ledger.missing().len();
    ensure(missing == 0, || format!("{missing} sentences missing"))?;
    ensure(ledger.final_failures.len() == poisoned.len(), || format!("{} final failures", ledger.final_failures.len()))?;
    let labelled: BTreeSet<(String, u32)> = clean
        .lines()
        .skip(1)
        .map(|l| {
            let mut f = l.split('\t');
            (f.next().unwrap().to_string(), f.next().unwrap().parse().unwrap())
        })
        .collect();
    let expected: BTreeSet<(String, u32)> = sentences
        .iter()
        .filter(|s| !poisoned.contains(&s.text))
        .map(|s| (s.writing_id.clone(), s.sentence_id))
        .collect();
    ensure(labelled == expected, || format!("{} labelled keys, {} expected", labelled.len(), expected.len()))?;
    let labelled = labelled.len();
    ensure(resumed_ledger.missing().is_empty(), || "resumed run left sentences missing".into())?;
    ensure(clean == resumed, || "resumed labels differ from the uninterrupted run".into())?;
    Ok(format!("1000 targets, missing 0, {labelled} labelled, {} final failures, resumed output byte-identical", poisoned.len()))
}

// ------------------------------------------------------------------- 6: TSV

fn tsv_schema() -> Check {
    let ids: Vec<String> = ["1", "2", "3"].iter().map(|s| s.to_string()).collect();
    let a1 = Schema::a1(Task::Emotion);
    let b = Schema::b(Task::Emotion);
    let filter = Schema::filter();
    let good: [(&str, &Schema); 5] = [
        ("1\tjoy\t0.80\tr\n2\tfear\t0.10\tr\n3\ttrust\t1.00\tr\n", &a1),
        ("sentence_id\tlabel\tconfidence\treason\n1\tjoy\t0.00\tr\n2\tanger\t0.50\tr\n3\tsadness\t0.99\tr\n", &a1),
        ("1\tjoy\t0.80\tr\r\n\n2\tfear\t0.10\tr\r\n3\ttrust\t1.00\tr\r\n", &a1),
        ("1\ty\tfine\tjoy\n2\tn\tno\tfear\n3\tY\tok\tdisgust\n", &b),
        ("1\tyes\n2\tno\n3\tYES\n", &filter),
    ];
    let bad: [(ViolationClass, &str, &Schema); 15] = [
        (ViolationClass::RowCount, "1\tjoy\t0.80\tr\n2\tfear\t0.10\tr\n", &a1),
        (ViolationClass::RowCount, "1\tyes\n2\tno\n3\tyes\n4\tno\n", &filter),
        (ViolationClass::RowCount, "", &b),
        (ViolationClass::FieldCount, "1\tjoy\t0.80\n2\tfear\t0.10\tr\n3\ttrust\t1.00\tr\n", &a1),
        (ViolationClass::FieldCount, "1\tyes\tmaybe\n2\tno\n3\tyes\n", &filter),
        (ViolationClass::FieldCount, "1\ty\tfine\tjoy\textra\n2\tn\tno\tfear\n3\ty\tok\tjoy\n", &b),
        (ViolationClass::IdOrder, "2\tjoy\t0.80\tr\n1\tfear\t0.10\tr\n3\ttrust\t1.00\tr\n", &a1),
        (ViolationClass::IdOrder, "1\tyes\n2\tno\n4\tyes\n", &filter),
        (ViolationClass::IdOrder, "1\ty\tfine\tjoy\n3\tn\tno\tfear\n3\ty\tok\tjoy\n", &b),
        (ViolationClass::Label, "1\tecstasy\t0.80\tr\n2\tfear\t0.10\tr\n3\ttrust\t1.00\tr\n", &a1),
        (ViolationClass::Label, "1\tyes\n2\tperhaps\n3\tyes\n", &filter),
        (ViolationClass::Label, "1\tmaybe\tfine\tjoy\n2\tn\tno\tfear\n3\ty\tok\tjoy\n", &b),
        (ViolationClass::Confidence, "1\tjoy\t1.20\tr\n2\tfear\t0.10\tr\n3\ttrust\t1.00\tr\n", &a1),
        (ViolationClass::Confidence, "1\tjoy\t0.8\tr\n2\tfear\t0.10\tr\n3\ttrust\t1.00\tr\n", &a1),
        (ViolationClass::Confidence, "1\tjoy\t-0.10\tr\n2\tfear\thigh\tr\n3\ttrust\t1.00\tr\n", &a1),
    ];
    for (i, (raw, schema)) in good.iter().enumerate() {
        validate_tsv(raw, &ids, schema).map_err(|v| format!("good fixture {i} rejected: {v:?}"))?;
    }
    for (i, (class, raw, schema)) in bad.iter().enumerate() {
        match validate_tsv(raw, &ids, schema) {
            Ok(_) => return Err(format!("bad fixture {i} accepted")),
            Err(v) => {
                let classes: BTreeSet<ViolationClass> = v.iter().map(|x| x.class).collect();
                ensure(classes == BTreeSet::from([*class]), || format!("bad fixture {i}: expected {class:?}, got {classes:?}"))?;
            }
        }
    }
    Ok("15 malformed fixtures rejected with the right class, 5 valid fixtures accepted".into())
}

// ------------------------------------------------------------------ 7: kappa

fn kappa() -> Check {
    let c = cohen_kappa(&["x", "x", "y", "y"], &["x", "y", "x", "y"]).map_err(|e| e.to_string())?;
    ensure(c.abs() < 1e-12, || format!("cohen {c}"))?;
    let f = fleiss_kappa(&[vec!["A", "A", "A"], vec!["A", "A", "B"]]).map_err(|e| e.to_string())?;
    ensure(f.is_some_and(|f| (f + 0.2).abs() < 1e-12), || format!("fleiss {f:?}"))?;
    let perfect_c = cohen_kappa(&["x", "y", "z", "x"], &["x", "y", "z", "x"]).map_err(|e| e.to_string())?;
    let perfect_f = fleiss_kappa(&[vec!["A", "A"], vec!["B", "B"], vec!["C", "C"]]).map_err(|e| e.to_string())?;
    ensure(perfect_c == 1.0 && perfect_f == Some(1.0), || format!("perfect agreement gave {perfect_c} / {perfect_f:?}"))?;
    Ok(format!("cohen {c:+.1e}, fleiss {:.12}, perfect 1", f.unwrap()))
}

// ----------------------------------------------------------------- 8: exact p

fn two_sided(le: u128, ge: u128, den: u128) -> (u128, u128) {
    ((2 * le.min(ge)).min(den), den)
}

fn same_fraction(a: (u128, u128), b: (u128, u128)) -> bool {
    a.0 * b.1 == b.0 * a.1
}

/// Doubled average ranks of `values` (all ranks integral after doubling).
fn doubled_ranks(values: &[f64]) -> Vec<u64> {
    values
        .iter()
        .map(|v| {
            let below = values.iter().filter(|x| *x < v).count() as u64;
            let tied = values.iter().filter(|x| *x == v).count() as u64;
            2 * below + tied + 1
        })
        .collect()
}

fn exact_p() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(808);
    let mut fixtures = 0;
    while fixtures < 200 {
        let n = rng.random_range(1..=8usize);
        let pairs: Vec<(f64, f64)> =
            (0..n).map(|_| (rng.random_range(0..6) as f64, rng.random_range(0..6) as f64)).collect();
        let d: Vec<f64> = pairs.iter().map(|(x, y)| x - y).filter(|d| *d != 0.0).collect();
        if d.is_empty() {
            continue;
        }
        let abs: Vec<f64> = d.iter().map(|x| x.abs()).collect();
        let ranks = doubled_ranks(&abs);
        let observed: u64 = ranks.iter().zip(&d).filter(|(_, d)| **d > 0.0).map(|(r, _)| r).sum();
        let (mut le, mut ge) = (0u128, 0u128);
        for mask in 0u32..(1 << d.len()) {
            let s: u64 = (0..d.len()).filter(|i| mask & (1 << i) != 0).map(|i| ranks[i]).sum();
            le += u128::from(s <= observed);
            ge += u128::from(s >= observed);
        }
        let oracle = two_sided(le, ge, 1u128 << d.len());
        let got = wilcoxon_signed_rank(&pairs).map_err(|e| e.to_string())?;
        let exact = got.exact.ok_or_else(|| format!("wilcoxon n={} had no exact p", d.len()))?;
        ensure(same_fraction((exact.numerator, exact.denominator), oracle), || {
            format!("wilcoxon {pairs:?}: {}/{} vs {}/{}", exact.numerator, exact.denominator, oracle.0, oracle.1)
        })?;

        let (m, k) = (rng.random_range(1..=8usize), rng.random_range(1..=8usize));
        let mut pool: Vec<f64> = (0..(m + k)).map(|i| i as f64 + 0.5).collect();
        for i in (1..pool.len()).rev() {
            pool.swap(i, rng.random_range(0..=i));
        }
        let (x, y) = pool.split_at(m);
        let ranks_x: u64 = x.iter().map(|v| pool.iter().filter(|p| *p <= v).count() as u64).sum();
        let (mut le, mut ge, mut den) = (0u128, 0u128, 0u128);
        for mask in 0u32..(1 << (m + k)) {
            if mask.count_ones() as usize != m {
                continue;
            }
            let s: u64 = (0..m + k).filter(|i| mask & (1 << i) != 0).map(|i| i as u64 + 1).sum();
            den += 1;
            le += u128::from(s <= ranks_x);
            ge += u128::from(s >= ranks_x);
        }
        let oracle = two_sided(le, ge, den);
        let got = mann_whitney_u(x, y).map_err(|e| e.to_string())?;
        let exact = got.exact.ok_or_else(|| format!("mann-whitney {m}x{k} had no exact p"))?;
        ensure(same_fraction((exact.numerator, exact.denominator), oracle), || {
            format!("mann-whitney {x:?} {y:?}: {}/{} vs {}/{}", exact.numerator, exact.denominator, oracle.0, oracle.1)
        })?;
        fixtures += 1;
    }
    Ok("200 Wilcoxon and 200 Mann-Whitney fixtures match full enumeration".into())
}

// -------------------------------------------------------------- 9: regression

fn regression() -> Check {
    let regs = Regressor::model2();
    let truth = planted_coefficients();
    let clean = fe_regression(&synthetic_panel(&PanelConfig::default()), &regs).map_err(|e| e.to_string())?;
    let mut worst = 0.0f64;
    for (r, beta) in &truth {
        let b = clean.coefficient(r.name()).ok_or_else(|| format!("{} missing", r.name()))?;
        worst = worst.max((b - beta).abs());
    }
    ensure(worst < 1e-6, || format!("noiseless max error {worst:e}"))?;

    let reps = 500;
    let mut covered = 0usize;
    let mut total = 0usize;
    for rep in 0..reps {
        let cfg = PanelConfig { noise_sd: 1.0, seed: 10_000 + rep, ..Default::default() };
        let fit = fe_regression(&synthetic_panel(&cfg), &regs).map_err(|e| e.to_string())?;
        for (r, beta) in &truth {
            let b = fit.coefficient(r.name()).unwrap();
            let se = fit.std_error(r.name()).unwrap();
            covered += usize::from((b - beta).abs() <= 2.0 * se);
            total += 1;
        }
    }
    let coverage = covered as f64 / total as f64;
    ensure((0.90..=0.99).contains(&coverage), || format!("coverage {coverage:.4}"))?;
    Ok(format!("noiseless max error {worst:.1e}, ±2SE coverage {coverage:.4} over {reps} replications"))
}

// ----------------------------------------------------------- 10: determinism

fn snapshot(out: &Path, names: &[String]) -> BTreeMap<String, Vec<u8>> {
    names.iter().map(|n| (n.clone(), std::fs::read(out.join(n)).unwrap_or_default())).collect()
}

fn determinism() -> Check {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let triad = planted_triad(&TriadConfig { essays: 200, ..Default::default() });
    let corpus = dir.path().join("corpus_in.jsonl");
    let conllu = dir.path().join("parses.conllu");
    std::fs::write(&corpus, triad.bundle.to_jsonl_string()).map_err(|e| e.to_string())?;
    std::fs::write(&conllu, synthetic_conllu(&triad.bundle, 3)).map_err(|e| e.to_string())?;
    let mut cfg = RunConfig::default();
    cfg.paths.corpus = Some(corpus);
    cfg.paths.conllu = Some(conllu);
    cfg.paths.out = dir.path().join("out");
    cfg.mock_llm = true;

    for cmd in &[Command::Ingest, Command::Annotate { task: None, stop_after_commits: None }] {
        let m = execute(&cfg, cmd).map_err(|e| e.to_string())?;
        ensure(m.ok(), || format!("{} failed: {:?}", cmd.name(), m.errors))?;
    }
    let stages = [Command::Metrics, Command::Uptake, Command::Stats];
    let mut runs = Vec::new();
    for _ in 0..2 {
        let mut files = BTreeMap::new();
        for cmd in &stages {
            let m = execute(&cfg, cmd).map_err(|e| e.to_string())?;
            ensure(m.ok(), || format!("{} failed: {:?}", cmd.name(), m.errors))?;
            let mut names = m.outputs.clone();
            names.push(format!("{}.errors.json", cmd.name()));
            files.extend(snapshot(&cfg.paths.out, &names));
        }
        runs.push(files);
    }
    let differing: Vec<&String> = runs[0].iter().filter(|(k, v)| runs[1].get(*k) != Some(v)).map(|(k, _)| k).collect();
    ensure(differing.is_empty(), || format!("outputs differ: {differing:?}"))?;
    Ok(format!("{} output files byte-identical across two runs", runs[0].len()))
}

#[test]
fn acceptance_suite() {
    let criteria = [
        Criterion { id: 1, name: "metric oracles", budget: Some(Duration::from_secs(10)), check: metric_oracles },
        Criterion { id: 2, name: "attention matching", budget: None, check: attention },
        Criterion { id: 3, name: "threshold boundaries", budget: None, check: boundaries },
        Criterion { id: 4, name: "planted adoption recovery", budget: Some(Duration::from_secs(60)), check: planted },
        Criterion { id: 5, name: "annotation completeness and resume", budget: Some(Duration::from_secs(30)), check: completeness },
        Criterion { id: 6, name: "TSV schema enforcement", budget: None, check: tsv_schema },
        Criterion { id: 7, name: "agreement coefficients", budget: None, check: kappa },
        Criterion { id: 8, name: "exact nonparametric p-values", budget: None, check: exact_p },
        Criterion { id: 9, name: "fixed-effects recovery and coverage", budget: Some(Duration::from_secs(120)), check: regression },
        Criterion { id: 10, name: "pipeline determinism", budget: None, check: determinism },
    ];
    let failed: Vec<u8> = criteria.iter().filter(|c| !run(c)).map(|c| c.id).collect();
    assert!(failed.is_empty(), "failing criteria: {failed:?}");
}
