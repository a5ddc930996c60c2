//! `ingest`: load, validate and trim the raw corpus, then write the canonical bundle
//! and a dataset summary.

use std::collections::{BTreeSet, HashSet};

use anyhow::{Context, Result};
use revisio_core::corpus::{load_corpus_with, tokenize, trim_outliers, GradeScale, Grader, LoadOptions, Phase};
use revisio_core::stats::wilcoxon_signed_rank;

use super::{segment_config, CORPUS_FILE};
use crate::config::RunConfig;
use crate::output::{Manifest, OutDir};
use crate::table::{fixed, Table};

pub fn run(cfg: &RunConfig, out: &OutDir, m: &mut Manifest) -> Result<()> {
    let src = cfg.paths.corpus.as_ref().context("paths.corpus is not set")?;
    let options = LoadOptions {
        grade_scale: cfg.grade_bounds.map_or(GradeScale::Normalized, |b| GradeScale::Raw { min: b.min, max: b.max }),
    };
    let bundle = load_corpus_with(src, &options).with_context(|| format!("loading {}", src.display()))?;
    let survivors = trim_outliers(&bundle.drafts, cfg.trim_fraction)?;
    let keep: HashSet<String> = survivors.iter().map(|d| d.writing_id.clone()).collect();
    let trimmed = bundle.retain_drafts(&keep);
    out.write(m, CORPUS_FILE, trimmed.to_jsonl_string())?;

    let seg = segment_config(cfg);
    let n = trimmed.drafts.len();
    let sentences: usize = trimmed
        .drafts
        .iter()
        .map(|d| revisio_core::corpus::segment_with(&d.writing_id, &d.text, &seg).len())
        .sum();
    let tokens: usize = trimmed.drafts.iter().map(|d| tokenize(&d.text).len()).sum();
    let pairs = trimmed.pairs();
    let distinct = |f: fn(&revisio_core::corpus::EssayDraft) -> &str| {
        trimmed.drafts.iter().map(f).collect::<BTreeSet<_>>().len()
    };
    let avg = |total: usize| if n == 0 { "NA".to_string() } else { fixed(total as f64 / n as f64, 2) };

    let mut t = Table::new("ingest_summary", "Dataset statistics", &["statistic", "value"]);
    let mut row = |k: &str, v: String| t.push(vec![k.to_string(), v]);
    row("Total Essays", n.to_string());
    row("Pre Drafts", trimmed.drafts.iter().filter(|d| d.phase == Phase::Pre).count().to_string());
    row("Post Drafts", trimmed.drafts.iter().filter(|d| d.phase == Phase::Post).count().to_string());
    row("Removed by Trimming", (bundle.drafts.len() - n).to_string());
    row("Student-Task Pairs", pairs.len().to_string());
    row("Students", distinct(|d| d.student_id.as_str()).to_string());
    row("Teachers", distinct(|d| d.teacher_id.as_str()).to_string());
    row("Tasks", distinct(|d| d.task_id.as_str()).to_string());
    row("Average Sentences", avg(sentences));
    row("Average Tokens", avg(tokens));
    for (grader, label) in [(Grader::Teacher, "Teacher Grade (pre vs post)"), (Grader::Llm, "LLM Grade (pre vs post)")] {
        let paired: Vec<(f64, f64)> = pairs
            .iter()
            .filter_map(|p| Some((trimmed.grade(&p.pre.writing_id, grader)?, trimmed.grade(&p.post.writing_id, grader)?)))
            .collect();
        let cell = if paired.is_empty() {
            "NA".to_string()
        } else {
            let k = paired.len() as f64;
            let pre = paired.iter().map(|p| p.0).sum::<f64>() / k;
            let post = paired.iter().map(|p| p.1).sum::<f64>() / k;
            let stars = wilcoxon_signed_rank(&paired).map(|t| t.stars.suffix()).unwrap_or("");
            format!("{pre:.2} vs {post:.2}{stars}")
        };
        row(label, cell);
    }
    if n < bundle.drafts.len() {
        t.notes.push(format!("trim fraction {} removed {} drafts", cfg.trim_fraction, bundle.drafts.len() - n));
    }
    let unpaired = n - 2 * pairs.len();
    if unpaired > 0 {
        m.warn(format!("{unpaired} drafts have no partner draft and are excluded from paired analyses"));
    }
    t.write(out, m)
}
