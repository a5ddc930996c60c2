//! `uptake`: suggestion origin, adoption and teacher effort for every pair, plus the
//! share/adoption-rate and effort tables.

use anyhow::{Context, Result};
use rayon::prelude::*;
use revisio_core::corpus::Stage;
use revisio_core::uptake::{compute_uptake, effort_table, share_table, UptakeInput, WritingUptake};

use super::{analysed_sentences, load_bundle, pool, read_jsonl, UPTAKE_FILE};
use crate::config::RunConfig;
use crate::output::{to_jsonl, Manifest, OutDir};
use crate::table::{opt_fixed, p_of, stars_of, Table};

pub fn load_uptake(out: &OutDir) -> Result<Vec<WritingUptake>> {
    read_jsonl(out, UPTAKE_FILE).context("run uptake first")
}

fn pct_cell(v: Option<f64>, stars: &str) -> String {
    match v {
        Some(x) => format!("{x:.3}{}", if stars == "ns" || stars == "NA" { "" } else { stars }),
        None => "NA".to_string(),
    }
}

pub fn run(cfg: &RunConfig, out: &OutDir, m: &mut Manifest) -> Result<()> {
    let bundle = load_bundle(out)?;
    let embedder = cfg.embedding.build()?;
    let pairs = bundle.pairs();
    let results: Vec<Result<Option<WritingUptake>, String>> = pool(cfg)?.install(|| {
        pairs
            .par_iter()
            .map(|p| {
                let Some(s_final) = bundle.suggestion_set(&p.pre.writing_id, Stage::Final) else {
                    return Ok(None);
                };
                let d_pre = analysed_sentences(cfg, p.pre);
                let d_post = analysed_sentences(cfg, p.post);
                let input = UptakeInput {
                    writing_id: &p.pre.writing_id,
                    d_pre: &d_pre,
                    d_post: &d_post,
                    s_initial: bundle.suggestion_set(&p.pre.writing_id, Stage::Initial),
                    s_final,
                };
                compute_uptake(&input, &cfg.thresholds, &embedder).map(Some).map_err(|e| e.to_string())
            })
            .collect()
    });
    let mut records = Vec::new();
    let mut without_final = 0;
    for (p, r) in pairs.iter().zip(results) {
        match r {
            Ok(Some(w)) => records.push(w),
            Ok(None) => without_final += 1,
            Err(e) => m.error(format!("{}: {e}", p.pre.writing_id)),
        }
    }
    if without_final > 0 {
        m.warn(format!("{without_final} pairs have no finalized suggestion set and were skipped"));
    }
    out.write(m, UPTAKE_FILE, to_jsonl(&records))?;

    let uptake: Vec<_> = records.iter().map(|w| w.record.clone()).collect();
    let mut t = Table::new(
        "uptake_share",
        "Finalized suggestions by origin: share and adoption rate",
        &["dimension", "n_l", "n_t", "share_l_pct", "share_t_pct", "share_p", "fur_l_pct", "fur_t_pct", "fur_p"],
    );
    for r in share_table(&uptake) {
        let (ss, fs) = (stars_of(&r.share_test), stars_of(&r.fur_test));
        t.push(vec![
            r.label.clone(),
            r.n_l.to_string(),
            r.n_t.to_string(),
            pct_cell(r.share_l, &ss),
            pct_cell(r.share_t, &ss),
            p_of(&r.share_test),
            pct_cell(r.fur_l, &fs),
            pct_cell(r.fur_t, &fs),
            p_of(&r.fur_test),
        ]);
    }
    t.notes.push(format!("{} writings", uptake.len()));
    t.notes.push("share stars: Wilcoxon signed-rank on per-writing L vs T counts; adoption-rate stars: Mann-Whitney U on per-writing rates".into());
    t.write(out, m)?;

    let efforts: Vec<_> = records.iter().map(|w| w.effort.clone()).collect();
    let mut e = Table::new(
        "teacher_effort",
        "Teacher effort by scenario",
        &["dimension", "creation", "modification", "direction", "p_value"],
    );
    for r in effort_table(&efforts) {
        let stars = stars_of(&r.test);
        e.push(vec![
            r.label.clone(),
            opt_fixed(r.creation, 3),
            pct_cell(r.modification, &stars),
            r.direction.map_or("NA", |d| d.arrow()).to_string(),
            p_of(&r.test),
        ]);
    }
    e.notes.push("stars: Mann-Whitney U between creation and modification writings".into());
    e.write(out, m)
}
