use super::ranks::{doubled_ranks, tie_sizes};
use super::wilcoxon::normal_two_sided;
use super::{ExactP, Method, StatsError, TestResult};

/// Exact null distribution is used when the smaller sample has at most this many
/// observations and there are no ties.
pub const MANN_WHITNEY_EXACT_MAX_MIN: usize = 8;

/// Two-sided Mann-Whitney U test. The statistic is `U` of the first sample.
pub fn mann_whitney_u(x: &[f64], y: &[f64]) -> Result<TestResult, StatsError> {
    if x.is_empty() || y.is_empty() {
        return Err(StatsError::EmptySample);
    }
    let (n1, n2) = (x.len(), y.len());
    let pooled: Vec<f64> = x.iter().chain(y).copied().collect();
    let ranks2 = doubled_ranks(&pooled);
    let r1_doubled: u64 = ranks2[..n1].iter().sum();
    // U = R1 - n1(n1+1)/2, kept doubled to stay integral under ties
    let u2 = r1_doubled as i64 - (n1 * (n1 + 1)) as i64;
    let statistic = u2 as f64 / 2.0;
    let ties = tie_sizes(&pooled);

    if n1.min(n2) <= MANN_WHITNEY_EXACT_MAX_MIN && ties.is_empty() {
        let exact = exact_u_p(n1, n2, (u2 / 2) as usize);
        return Ok(TestResult::new(Method::MannWhitney, statistic, exact.value(), vec![n1, n2]).with_exact(exact));
    }

    let (a, b) = (n1 as f64, n2 as f64);
    let big_n = a + b;
    let mean = a * b / 2.0;
    let tie_term: f64 = ties
        .iter()
        .map(|&t| (t as f64).powi(3) - t as f64)
        .sum::<f64>()
        / (big_n * (big_n - 1.0));
    let var = a * b / 12.0 * ((big_n + 1.0) - tie_term);
    let p = normal_two_sided(statistic, mean, var);
    Ok(TestResult::new(Method::MannWhitney, statistic, p, vec![n1, n2]))
}

/// Null distribution of `U` for sample sizes `(m, n)` without ties: the coefficients
/// of the Gaussian binomial `[m+n choose m]_q`.
pub fn u_distribution(m: usize, n: usize) -> Vec<u128> {
    let (m, n) = if m <= n { (m, n) } else { (n, m) };
    let mut poly: Vec<i128> = vec![1];
    for i in 1..=m {
        // multiply by (1 - q^(n+i))
        let shift = n + i;
        let mut next = vec![0i128; poly.len() + shift];
        for (k, &c) in poly.iter().enumerate() {
            next[k] += c;
            next[k + shift] -= c;
        }
        // divide by (1 - q^i): c_k += c_{k-i}
        for k in i..next.len() {
            next[k] += next[k - i];
        }
        next.truncate(i * n + 1);
        poly = next;
    }
    poly.into_iter()
        .map(|c| u128::try_from(c).expect("Gaussian binomial coefficients are non-negative"))
        .collect()
}

fn exact_u_p(n1: usize, n2: usize, u: usize) -> ExactP {
    let dist = u_distribution(n1, n2);
    let low: u128 = dist[..=u].iter().sum();
    let high: u128 = dist[u..].iter().sum();
    let total: u128 = dist.iter().sum();
    ExactP::two_sided(low, high, total)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complete_separation() {
        let r = mann_whitney_u(&[1.0, 2.0], &[3.0, 4.0]).unwrap();
        assert_eq!(r.statistic, 0.0);
        let e = r.exact.unwrap();
        assert_eq!((e.numerator, e.denominator), (2, 6));
        assert!((r.p_value - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn identical_multisets_are_not_significant() {
        let x = [1.0, 2.0, 2.0, 3.0, 5.0, 8.0, 9.0, 9.0, 10.0];
        let r = mann_whitney_u(&x, &x).unwrap();
        assert!(r.p_value >= 0.99);
        assert_eq!(r.statistic, 40.5);
    }

    #[test]
    fn u_distribution_small_cases() {
        assert_eq!(u_distribution(2, 2), vec![1, 1, 2, 1, 1]);
        assert_eq!(u_distribution(1, 3), vec![1, 1, 1, 1]);
        let total: u128 = u_distribution(8, 8).iter().sum();
        assert_eq!(total, 12870);
    }

    #[test]
    fn large_unbalanced_exact_path() {
        let x: Vec<f64> = (0..8).map(|i| i as f64 * 10.0 + 0.5).collect();
        let y: Vec<f64> = (0..500).map(|i| i as f64 * 0.2).collect();
        let r = mann_whitney_u(&x, &y).unwrap();
        assert!(r.exact.is_some());
        assert!((0.0..=1.0).contains(&r.p_value));
    }
}
