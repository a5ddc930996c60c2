use statrs::distribution::{ContinuousCDF, StudentsT};

use super::ranks::average_ranks;
use super::{Method, StatsError, TestResult};

/// Spearman's rank correlation with a two-sided t-approximation p-value.
pub fn spearman(x: &[f64], y: &[f64]) -> Result<TestResult, StatsError> {
    if x.len() != y.len() {
        return Err(StatsError::LengthMismatch(x.len(), y.len()));
    }
    let n = x.len();
    if n < 3 {
        return Err(StatsError::TooFew { needed: 3, got: n });
    }
    let (rx, ry) = (average_ranks(x), average_ranks(y));
    let Some(rho) = pearson(&rx, &ry) else {
        return Ok(TestResult::degenerate(Method::Spearman, vec![n]));
    };
    let rho = rho.clamp(-1.0, 1.0);
    let df = (n - 2) as f64;
    let p = if (1.0 - rho.abs()) <= f64::EPSILON {
        0.0
    } else {
        let t = rho * (df / (1.0 - rho * rho)).sqrt();
        let dist = StudentsT::new(0.0, 1.0, df).expect("positive degrees of freedom");
        (2.0 * (1.0 - dist.cdf(t.abs()))).clamp(0.0, 1.0)
    };
    Ok(TestResult::new(Method::Spearman, rho, p, vec![n]))
}

/// Pearson correlation, or `None` when either input has zero variance.
pub fn pearson(x: &[f64], y: &[f64]) -> Option<f64> {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        sxy += (a - mx) * (b - my);
        sxx += (a - mx) * (a - mx);
        syy += (b - my) * (b - my);
    }
    if sxx == 0.0 || syy == 0.0 {
        return None;
    }
    Some(sxy / (sxx * syy).sqrt())
}
