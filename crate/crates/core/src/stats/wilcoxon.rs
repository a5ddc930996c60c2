use statrs::distribution::{ContinuousCDF, Normal};

use super::ranks::{doubled_ranks, tie_sizes};
use super::{ExactP, Method, StatsError, TestResult};

/// Largest non-zero-difference count handled by exact enumeration.
pub const WILCOXON_EXACT_MAX_N: usize = 25;

/// Two-sided Wilcoxon signed-rank test on the differences `x - y`.
///
/// Zero differences are dropped and ties get average ranks. The statistic is the sum
/// of ranks of positive differences. With at most 25 non-zero differences the null
/// distribution is enumerated exactly (on doubled ranks, so ties stay exact);
/// beyond that a tie- and continuity-corrected normal approximation is used.
pub fn wilcoxon_signed_rank(paired: &[(f64, f64)]) -> Result<TestResult, StatsError> {
    if paired.is_empty() {
        return Err(StatsError::EmptySample);
    }
    let diffs: Vec<f64> = paired
        .iter()
        .map(|(x, y)| x - y)
        .filter(|d| *d != 0.0)
        .collect();
    let n = diffs.len();
    if n == 0 {
        return Ok(TestResult::degenerate(Method::Wilcoxon, vec![paired.len()]));
    }
    let abs: Vec<f64> = diffs.iter().map(|d| d.abs()).collect();
    let ranks2 = doubled_ranks(&abs);
    let w2: u64 = diffs
        .iter()
        .zip(&ranks2)
        .filter(|(d, _)| **d > 0.0)
        .map(|(_, r)| *r)
        .sum();
    let statistic = w2 as f64 / 2.0;

    if n <= WILCOXON_EXACT_MAX_N {
        let exact = exact_signed_rank_p(&ranks2, w2);
        return Ok(TestResult::new(Method::Wilcoxon, statistic, exact.value(), vec![n]).with_exact(exact));
    }

    let nf = n as f64;
    let mean = nf * (nf + 1.0) / 4.0;
    let tie_adj: f64 = tie_sizes(&abs)
        .iter()
        .map(|&t| (t as f64).powi(3) - t as f64)
        .sum::<f64>()
        / 48.0;
    let var = nf * (nf + 1.0) * (2.0 * nf + 1.0) / 24.0 - tie_adj;
    let p = normal_two_sided(statistic, mean, var);
    Ok(TestResult::new(Method::Wilcoxon, statistic, p, vec![n]))
}

/// Exact two-sided p by counting all `2^n` sign assignments of the doubled ranks.
pub fn exact_signed_rank_p(ranks2: &[u64], w2: u64) -> ExactP {
    let total_sum: u64 = ranks2.iter().sum();
    let mut counts = vec![0u128; total_sum as usize + 1];
    counts[0] = 1;
    let mut reach = 0usize;
    for &r in ranks2 {
        let r = r as usize;
        for s in (0..=reach).rev() {
            if counts[s] != 0 {
                counts[s + r] += counts[s];
            }
        }
        reach += r;
    }
    let w = w2 as usize;
    let low: u128 = counts[..=w].iter().sum();
    let high: u128 = counts[w..].iter().sum();
    let denominator = 1u128 << ranks2.len();
    ExactP::two_sided(low, high, denominator)
}

/// Two-sided normal p with a 0.5 continuity correction, capped at 1.
pub(crate) fn normal_two_sided(statistic: f64, mean: f64, var: f64) -> f64 {
    if !(var > 0.0) {
        return 1.0;
    }
    let z = ((statistic - mean).abs() - 0.5).max(0.0) / var.sqrt();
    let normal = Normal::new(0.0, 1.0).expect("standard normal");
    (2.0 * (1.0 - normal.cdf(z))).clamp(0.0, 1.0)
}
