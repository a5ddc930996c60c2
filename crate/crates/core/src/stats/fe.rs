use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, StudentsT};

use super::StatsError;
use crate::sfl::SflDimension;

pub const DEMEAN_TOLERANCE: f64 = 1e-10;
pub const DEMEAN_MAX_SWEEPS: usize = 100;
const RANK_TOLERANCE: f64 = 1e-8;

/// One observation of the grade panel.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PanelRow {
    pub student_id: String,
    pub teacher_id: String,
    pub task_id: String,
    pub dependent: f64,
    pub fua_l: i64,
    pub fua_t: i64,
    pub sfl_delta: [f64; 6],
    pub baseline_score: f64,
}

impl PanelRow {
    pub fn value(&self, r: Regressor) -> f64 {
        match r {
            Regressor::FuaL => self.fua_l as f64,
            Regressor::FuaT => self.fua_t as f64,
            Regressor::Baseline => self.baseline_score,
            Regressor::Sfl(d) => self.sfl_delta[d.index()],
        }
    }

    fn validate(&self) -> Result<(), StatsError> {
        if self.student_id.is_empty() || self.teacher_id.is_empty() || self.task_id.is_empty() {
            return Err(StatsError::EmptyKey);
        }
        let finite = self.dependent.is_finite()
            && self.baseline_score.is_finite()
            && self.sfl_delta.iter().all(|v| v.is_finite());
        if !finite {
            return Err(StatsError::NonFinite(format!(
                "panel row {}/{}/{}",
                self.student_id, self.teacher_id, self.task_id
            )));
        }
        Ok(())
    }
}

/// Column selector for [`fe_regression`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Regressor {
    FuaL,
    FuaT,
    Baseline,
    Sfl(SflDimension),
}

impl Regressor {
    pub fn name(self) -> &'static str {
        match self {
            Regressor::FuaL => "fua_l",
            Regressor::FuaT => "fua_t",
            Regressor::Baseline => "baseline_score",
            Regressor::Sfl(d) => d.key(),
        }
    }

    /// FUA counts and baseline.
    pub fn model1() -> Vec<Regressor> {
        vec![Regressor::FuaL, Regressor::FuaT, Regressor::Baseline]
    }

    /// Model 1 plus the six metric deltas.
    pub fn model2() -> Vec<Regressor> {
        let mut v = Self::model1();
        v.extend(SflDimension::ALL.iter().map(|d| Regressor::Sfl(*d)));
        v
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegressionResult {
    pub names: Vec<String>,
    pub coefficients: Vec<f64>,
    pub std_errors: Vec<f64>,
    pub p_values: Vec<f64>,
    /// Overall R², on the raw dependent against fitted values including group effects.
    pub r_squared: f64,
    pub n_obs: usize,
    pub residual_df: usize,
    pub fe_dims: Vec<String>,
    pub sweeps: usize,
}

impl RegressionResult {
    pub fn coefficient(&self, name: &str) -> Option<f64> {
        self.names.iter().position(|n| n == name).map(|i| self.coefficients[i])
    }

    pub fn std_error(&self, name: &str) -> Option<f64> {
        self.names.iter().position(|n| n == name).map(|i| self.std_errors[i])
    }
}

/// Panel regression of `dependent` on the selected regressors, absorbing student,
/// teacher and task effects.
pub fn fe_regression(rows: &[PanelRow], regressors: &[Regressor]) -> Result<RegressionResult, StatsError> {
    for r in rows {
        r.validate()?;
    }
    let y: Vec<f64> = rows.iter().map(|r| r.dependent).collect();
    let columns: Vec<(String, Vec<f64>)> = regressors
        .iter()
        .map(|&reg| (reg.name().to_string(), rows.iter().map(|r| r.value(reg)).collect()))
        .collect();
    let groups = vec![
        ("student".to_string(), group_ids(rows.iter().map(|r| r.student_id.as_str()))),
        ("teacher".to_string(), group_ids(rows.iter().map(|r| r.teacher_id.as_str()))),
        ("task".to_string(), group_ids(rows.iter().map(|r| r.task_id.as_str()))),
    ];
    fe_ols(&y, &columns, &groups)
}

/// Dense group indices for a sequence of keys, assigned in sorted key order.
pub fn group_ids<'a>(keys: impl Iterator<Item = &'a str> + Clone) -> Vec<usize> {
    let index: BTreeMap<&str, usize> = {
        let mut m: BTreeMap<&str, usize> = keys.clone().map(|k| (k, 0)).collect();
        for (i, v) in m.values_mut().enumerate() {
            *v = i;
        }
        m
    };
    keys.map(|k| index[k]).collect()
}

/// Alternating within-group centering over all dimensions. Returns the number of
/// sweeps performed.
pub fn demean(values: &mut [f64], groups: &[Vec<usize>]) -> usize {
    let mut sums: Vec<Vec<f64>> = groups.iter().map(|g| vec![0.0; group_count(g)]).collect();
    let counts: Vec<Vec<f64>> = groups
        .iter()
        .map(|g| {
            let mut c = vec![0.0; group_count(g)];
            for &id in g {
                c[id] += 1.0;
            }
            c
        })
        .collect();
    for sweep in 1..=DEMEAN_MAX_SWEEPS {
        let mut max_change = 0.0f64;
        for (d, g) in groups.iter().enumerate() {
            let s = &mut sums[d];
            s.iter_mut().for_each(|v| *v = 0.0);
            for (v, &id) in values.iter().zip(g) {
                s[id] += v;
            }
            for (m, c) in s.iter_mut().zip(&counts[d]) {
                *m /= c;
                max_change = max_change.max(m.abs());
            }
            for (v, &id) in values.iter_mut().zip(g) {
                *v -= s[id];
            }
        }
        if max_change < DEMEAN_TOLERANCE {
            return sweep;
        }
    }
    DEMEAN_MAX_SWEEPS
}

fn group_count(g: &[usize]) -> usize {
    g.iter().max().map_or(0, |m| m + 1)
}

/// Core estimator on raw columns. `groups` holds one group-index vector per absorbed
/// dimension.
pub fn fe_ols(
    y: &[f64],
    columns: &[(String, Vec<f64>)],
    groups: &[(String, Vec<usize>)],
) -> Result<RegressionResult, StatsError> {
    let n = y.len();
    let k = columns.len();
    if k == 0 {
        return Err(StatsError::TooFew { needed: 1, got: 0 });
    }
    for (name, c) in columns {
        if c.len() != n {
            return Err(StatsError::LengthMismatch(n, c.len()));
        }
        if c.iter().any(|v| !v.is_finite()) {
            return Err(StatsError::NonFinite(name.clone()));
        }
    }
    if y.iter().any(|v| !v.is_finite()) {
        return Err(StatsError::NonFinite("dependent".into()));
    }
    let fe: Vec<Vec<usize>> = groups.iter().map(|(_, g)| g.clone()).collect();
    for g in &fe {
        if g.len() != n {
            return Err(StatsError::LengthMismatch(n, g.len()));
        }
    }
    let absorbed = if fe.is_empty() {
        0
    } else {
        fe.iter().map(|g| group_count(g)).sum::<usize>() - (fe.len() - 1)
    };
    if n <= k + absorbed {
        return Err(StatsError::InsufficientDf { n_obs: n, params: k + absorbed });
    }

    let mut ty = y.to_vec();
    let mut sweeps = demean(&mut ty, &fe);
    let mut x = DMatrix::<f64>::zeros(n, k);
    let mut raw_norms = Vec::with_capacity(k);
    for (j, (_, c)) in columns.iter().enumerate() {
        raw_norms.push(c.iter().map(|v| v * v).sum::<f64>().sqrt());
        let mut tc = c.clone();
        sweeps = sweeps.max(demean(&mut tc, &fe));
        x.set_column(j, &DVector::from_vec(tc));
    }

    let qr = x.clone().qr();
    let r = qr.r();
    for j in 0..k {
        let scale = raw_norms[j].max(1.0);
        if r[(j, j)].abs() <= RANK_TOLERANCE * scale {
            return Err(StatsError::RankDeficient { column: columns[j].0.clone() });
        }
    }
    let yv = DVector::from_vec(ty);
    let qty = qr.q().transpose() * &yv;
    let beta = r
        .solve_upper_triangular(&qty)
        .ok_or_else(|| StatsError::RankDeficient { column: columns[k - 1].0.clone() })?;
    let resid = &yv - &x * &beta;
    let sse = resid.norm_squared();
    let df = n - k - absorbed;
    let sigma2 = sse / df as f64;

    let r_inv = r
        .try_inverse()
        .ok_or_else(|| StatsError::RankDeficient { column: columns[k - 1].0.clone() })?;
    let std_errors: Vec<f64> = (0..k)
        .map(|i| (sigma2 * r_inv.row(i).norm_squared()).sqrt())
        .collect();
    let t_dist = StudentsT::new(0.0, 1.0, df as f64).expect("positive degrees of freedom");
    let p_values: Vec<f64> = beta
        .iter()
        .zip(&std_errors)
        .map(|(b, se)| {
            if *se == 0.0 {
                if *b == 0.0 { 1.0 } else { 0.0 }
            } else {
                (2.0 * (1.0 - t_dist.cdf((b / se).abs()))).clamp(0.0, 1.0)
            }
        })
        .collect();

    let mean = y.iter().sum::<f64>() / n as f64;
    let tss: f64 = y.iter().map(|v| (v - mean) * (v - mean)).sum();
    let r_squared = if tss > 0.0 { (1.0 - sse / tss).clamp(0.0, 1.0) } else { 1.0 };

    Ok(RegressionResult {
        names: columns.iter().map(|(n, _)| n.clone()).collect(),
        coefficients: beta.iter().copied().collect(),
        std_errors,
        p_values,
        r_squared,
        n_obs: n,
        residual_df: df,
        fe_dims: groups.iter().map(|(n, _)| n.clone()).collect(),
        sweeps,
    })
}

/// Residuals of the demeaned regression, for diagnostics.
pub fn demeaned_residuals(
    y: &[f64],
    columns: &[(String, Vec<f64>)],
    groups: &[(String, Vec<usize>)],
    coefficients: &[f64],
) -> (Vec<f64>, Vec<Vec<f64>>) {
    let fe: Vec<Vec<usize>> = groups.iter().map(|(_, g)| g.clone()).collect();
    let mut ty = y.to_vec();
    demean(&mut ty, &fe);
    let tx: Vec<Vec<f64>> = columns
        .iter()
        .map(|(_, c)| {
            let mut c = c.clone();
            demean(&mut c, &fe);
            c
        })
        .collect();
    let resid = (0..y.len())
        .map(|i| ty[i] - tx.iter().zip(coefficients).map(|(c, b)| c[i] * b).sum::<f64>())
        .collect();
    (resid, tx)
}
