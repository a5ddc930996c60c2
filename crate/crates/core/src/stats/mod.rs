//! Nonparametric tests, rank correlation, quartile partitioning, significance
//! labels and fixed-effects panel regression.

mod fe;
mod mann_whitney;
mod quartile;
mod ranks;
mod spearman;
mod stars;
mod wilcoxon;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use fe::{
    demean, demeaned_residuals, fe_ols, fe_regression, group_ids, PanelRow, RegressionResult, Regressor,
    DEMEAN_MAX_SWEEPS, DEMEAN_TOLERANCE,
};
pub use mann_whitney::{mann_whitney_u, u_distribution, MANN_WHITNEY_EXACT_MAX_MIN};
pub use quartile::{quantile_linear, quartile_split, QuartileSplit};
pub use ranks::{average_ranks, tie_sizes};
pub use spearman::{pearson, spearman};
pub use stars::{star_label, Stars};
pub use wilcoxon::{exact_signed_rank_p, wilcoxon_signed_rank, WILCOXON_EXACT_MAX_N};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum StatsError {
    #[error("empty sample")]
    EmptySample,
    #[error("length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("need at least {needed} observations, got {got}")]
    TooFew { needed: usize, got: usize },
    #[error("non-finite value in {0}")]
    NonFinite(String),
    #[error("empty fixed-effect key")]
    EmptyKey,
    #[error("rank deficiency: column `{column}` is collinear after absorbing fixed effects")]
    RankDeficient { column: String },
    #[error("{n_obs} observations cannot identify {params} parameters")]
    InsufficientDf { n_obs: usize, params: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Wilcoxon,
    MannWhitney,
    Spearman,
}

/// Exact p-value as a fraction of the null distribution's total mass.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExactP {
    pub numerator: u128,
    pub denominator: u128,
}

impl ExactP {
    /// Doubled smaller tail, capped at one.
    pub fn two_sided(low: u128, high: u128, denominator: u128) -> Self {
        let numerator = (2 * low.min(high)).min(denominator);
        ExactP { numerator, denominator }
    }

    pub fn value(&self) -> f64 {
        self.numerator as f64 / self.denominator as f64
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TestResult {
    pub statistic: f64,
    pub p_value: f64,
    pub method: Method,
    pub n: Vec<usize>,
    pub stars: Stars,
    pub exact: Option<ExactP>,
    pub degenerate: bool,
}

impl TestResult {
    pub(crate) fn new(method: Method, statistic: f64, p_value: f64, n: Vec<usize>) -> Self {
        let p_value = p_value.clamp(0.0, 1.0);
        TestResult { statistic, p_value, method, n, stars: star_label(p_value), exact: None, degenerate: false }
    }

    pub(crate) fn degenerate(method: Method, n: Vec<usize>) -> Self {
        TestResult { degenerate: true, ..Self::new(method, 0.0, 1.0, n) }
    }

    pub(crate) fn with_exact(mut self, exact: ExactP) -> Self {
        self.exact = Some(exact);
        self
    }
}

#[cfg(test)]
mod oracle_tests {
    use super::*;
    use proptest::prelude::*;

    /// Enumerates all 2^n sign flips of the absolute differences.
    fn brute_wilcoxon(d: &[f64]) -> f64 {
        let d: Vec<f64> = d.iter().copied().filter(|v| *v != 0.0).collect();
        let abs: Vec<f64> = d.iter().map(|v| v.abs()).collect();
        let ranks = average_ranks(&abs);
        let w: f64 = d.iter().zip(&ranks).filter(|(v, _)| **v > 0.0).map(|(_, r)| r).sum();
        let n = d.len();
        let (mut le, mut ge) = (0u64, 0u64);
        for mask in 0u64..(1 << n) {
            let s: f64 = (0..n).filter(|i| mask >> i & 1 == 1).map(|i| ranks[i]).sum();
            if s <= w + 1e-9 {
                le += 1;
            }
            if s >= w - 1e-9 {
                ge += 1;
            }
        }
        (2.0 * le.min(ge) as f64 / (1u64 << n) as f64).min(1.0)
    }

    /// Enumerates every assignment of pooled positions to the first sample.
    fn brute_mann_whitney(x: &[f64], y: &[f64]) -> f64 {
        let pooled: Vec<f64> = x.iter().chain(y).copied().collect();
        let ranks = average_ranks(&pooled);
        let n1 = x.len();
        let total = pooled.len();
        let r_obs: f64 = ranks[..n1].iter().sum();
        let (mut le, mut ge, mut all) = (0u64, 0u64, 0u64);
        for mask in 0u64..(1 << total) {
            if mask.count_ones() as usize != n1 {
                continue;
            }
            all += 1;
            let r: f64 = (0..total).filter(|i| mask >> i & 1 == 1).map(|i| ranks[i]).sum();
            if r <= r_obs + 1e-9 {
                le += 1;
            }
            if r >= r_obs - 1e-9 {
                ge += 1;
            }
        }
        (2.0 * le.min(ge) as f64 / all as f64).min(1.0)
    }

    proptest! {
        #[test]
        fn wilcoxon_exact_matches_enumeration(
            d in proptest::collection::vec(-4i32..=4, 1..=8)
        ) {
            let pairs: Vec<(f64, f64)> = d.iter().map(|v| (*v as f64, 0.0)).collect();
            let r = wilcoxon_signed_rank(&pairs).unwrap();
            if r.degenerate {
                prop_assert!(d.iter().all(|v| *v == 0));
            } else {
                let diffs: Vec<f64> = d.iter().map(|v| *v as f64).collect();
                prop_assert!((r.p_value - brute_wilcoxon(&diffs)).abs() < 1e-12);
            }
        }

        #[test]
        fn mann_whitney_exact_matches_enumeration(
            pool in proptest::collection::hash_set(-1000i32..1000, 2..=10),
            split in 1usize..9,
        ) {
            let pool: Vec<f64> = pool.into_iter().map(f64::from).collect();
            let split = split.min(pool.len() - 1);
            let (x, y) = pool.split_at(split);
            let r = mann_whitney_u(x, y).unwrap();
            prop_assert!(r.exact.is_some());
            prop_assert!((r.p_value - brute_mann_whitney(x, y)).abs() < 1e-12);
        }
    }
}
