//! `stats`: fixed-effects regressions of final grades on uptake and linguistic
//! growth, and per-quartile growth/grade correlations.

use std::collections::HashMap;

use anyhow::Result;
use revisio_core::corpus::Grader;
use revisio_core::sfl::SflDimension;
use revisio_core::stats::{fe_regression, quartile_split, spearman, star_label, PanelRow, RegressionResult, Regressor, StatsError};
use serde::Serialize;

use super::load_bundle;
use super::metrics::{load_metrics, paired};
use super::uptake::load_uptake;
use crate::output::{Manifest, OutDir};
use crate::table::{starred, Table};

const GRADERS: [(Grader, &str); 2] = [(Grader::Teacher, "teacher"), (Grader::Llm, "llm")];

/// Regression input plus the grade gain used for the quartile correlations.
#[derive(Debug, Clone)]
pub struct PanelEntry {
    pub row: PanelRow,
    pub pre: [f64; 6],
    pub gain: f64,
}

/// One fitted model, with the columns dropped to reach full rank.
#[derive(Debug, Clone, Serialize)]
pub struct ModelFit {
    pub grader: String,
    pub model: String,
    pub dropped: Vec<String>,
    pub result: Option<RegressionResult>,
    pub error: Option<String>,
}

/// Fits `regressors`, removing any column reported as collinear and refitting.
pub fn fit_dropping(rows: &[PanelRow], regressors: &[Regressor]) -> (Option<RegressionResult>, Vec<String>, Option<String>) {
    let mut regs = regressors.to_vec();
    let mut dropped = Vec::new();
    loop {
        match fe_regression(rows, &regs) {
            Ok(r) => return (Some(r), dropped, None),
            Err(StatsError::RankDeficient { column }) => {
                regs.retain(|r| r.name() != column);
                dropped.push(column);
            }
            Err(e) => return (None, dropped, Some(e.to_string())),
        }
    }
}

fn cell(fit: &ModelFit, name: &str, in_model: bool) -> String {
    if !in_model {
        return String::new();
    }
    if fit.dropped.iter().any(|d| d == name) {
        return "dropped".into();
    }
    let Some(r) = &fit.result else { return "NA".into() };
    let Some(i) = r.names.iter().position(|n| n == name) else { return "NA".into() };
    format!("{} ({:.3})", starred(r.coefficients[i], 3, star_label(r.p_values[i])), r.std_errors[i])
}

pub fn build_panel(out: &OutDir, m: &mut Manifest) -> Result<HashMap<Grader, Vec<PanelEntry>>> {
    let bundle = load_bundle(out)?;
    let metrics = load_metrics(out)?;
    let uptake = load_uptake(out)?;
    let by_pre: HashMap<&str, _> = uptake.iter().map(|w| (w.record.writing_id.as_str(), &w.record)).collect();
    let mut panels: HashMap<Grader, Vec<PanelEntry>> = HashMap::new();
    let mut missing = [0usize; 2];
    for (pre, post) in paired(&bundle, &metrics) {
        let Some(rec) = by_pre.get(pre.writing_id.as_str()) else { continue };
        for (gi, (grader, _)) in GRADERS.iter().enumerate() {
            let (Some(g0), Some(g1)) = (bundle.grade(&pre.writing_id, *grader), bundle.grade(&post.writing_id, *grader)) else {
                missing[gi] += 1;
                continue;
            };
            let delta = post.vector.delta_from(&pre.vector).to_array();
            panels.entry(*grader).or_default().push(PanelEntry {
                row: PanelRow {
                    student_id: pre.student_id.clone(),
                    teacher_id: pre.teacher_id.clone(),
                    task_id: pre.task_id.clone(),
                    dependent: g1,
                    fua_l: rec.fua_l as i64,
                    fua_t: rec.fua_t as i64,
                    sfl_delta: delta,
                    baseline_score: g0,
                },
                pre: pre.vector.to_array(),
                gain: g1 - g0,
            });
        }
    }
    for (gi, (_, name)) in GRADERS.iter().enumerate() {
        if missing[gi] > 0 {
            m.warn(format!("{} pairs lack a {name} grade for one of their drafts", missing[gi]));
        }
    }
    Ok(panels)
}

pub fn run(out: &OutDir, m: &mut Manifest) -> Result<()> {
    let panels = build_panel(out, m)?;
    let mut fits = Vec::new();
    for (grader, gname) in GRADERS {
        let rows: Vec<PanelRow> = panels.get(&grader).map_or_else(Vec::new, |p| p.iter().map(|e| e.row.clone()).collect());
        for (mname, regs) in [("model1", Regressor::model1()), ("model2", Regressor::model2())] {
            let (result, dropped, error) = fit_dropping(&rows, &regs);
            for d in &dropped {
                m.warn(format!("{gname} {mname}: {d} is collinear with the fixed effects or other regressors and was dropped"));
            }
            if let Some(e) = &error {
                m.error(format!("{gname} {mname}: {e}"));
            }
            fits.push(ModelFit { grader: gname.into(), model: mname.into(), dropped, result, error });
        }
    }
    let mut json = serde_json::to_string_pretty(&fits)?;
    json.push('\n');
    out.write(m, "regression.json", json)?;

    let header: Vec<String> = std::iter::once("variable".to_string())
        .chain(fits.iter().map(|f| format!("{}_{}", f.grader, f.model)))
        .collect();
    let header_refs: Vec<&str> = header.iter().map(String::as_str).collect();
    let mut t = Table::new("regression", "Fixed-effects regressions of final grades", &header_refs);
    let model1 = Regressor::model1();
    for reg in Regressor::model2() {
        let name = reg.name();
        let mut row = vec![name.to_string()];
        for f in &fits {
            row.push(cell(f, name, f.model == "model2" || model1.contains(&reg)));
        }
        t.push(row);
    }
    let mut r2 = vec!["R2".to_string()];
    let mut n = vec!["N".to_string()];
    for f in &fits {
        r2.push(f.result.as_ref().map_or("NA".into(), |r| format!("{:.3}", r.r_squared)));
        n.push(f.result.as_ref().map_or("NA".into(), |r| r.n_obs.to_string()));
    }
    t.push(r2);
    t.push(n);
    t.notes.push("cells: coefficient with stars, standard error in parentheses; student, teacher and task fixed effects absorbed".into());
    t.notes.push("R2 is the overall R2 including the fixed effects".into());
    t.write(out, m)?;

    for (grader, gname) in GRADERS {
        let entries = panels.get(&grader).map_or(&[][..], |p| p.as_slice());
        let mut q = Table::new(
            &format!("quartile_spearman_{gname}"),
            &format!("Growth vs {gname} grade gain by baseline quartile (Spearman)"),
            &["dimension", "Q1", "Q2", "Q3", "Q4"],
        );
        for d in SflDimension::ALL {
            let mut row = vec![d.title().to_string()];
            let baseline: Vec<(usize, f64)> = entries.iter().enumerate().map(|(i, e)| (i, e.pre[d.index()])).collect();
            match quartile_split(&baseline) {
                Ok(split) => {
                    for g in &split.groups {
                        let x: Vec<f64> = g.iter().map(|&i| entries[i].row.sfl_delta[d.index()]).collect();
                        let y: Vec<f64> = g.iter().map(|&i| entries[i].gain).collect();
                        row.push(match spearman(&x, &y) {
                            Ok(t) if !t.degenerate => starred(t.statistic, 3, t.stars),
                            _ => "NA".into(),
                        });
                    }
                }
                Err(_) => row.extend(std::iter::repeat_n("NA".to_string(), 4)),
            }
            q.push(row);
        }
        q.notes.push("quartiles of the pre-draft value of each dimension; ties at a cut go to the lower quartile".into());
        q.write(out, m)?;
    }
    Ok(())
}
