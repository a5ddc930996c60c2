use std::collections::{BTreeMap, BTreeSet};

use super::aba::AbaRecord;
use super::AnnotateError;

/// Cohen's kappa between two label sequences. Both raters using one single label
/// throughout counts as perfect agreement.
pub fn cohen_kappa<S: AsRef<str>>(a: &[S], b: &[S]) -> Result<f64, AnnotateError> {
    if a.len() != b.len() {
        return Err(AnnotateError::Contract(format!("label sequences differ in length: {} vs {}", a.len(), b.len())));
    }
    if a.is_empty() {
        return Err(AnnotateError::Contract("no items to compare".into()));
    }
    let n = a.len() as f64;
    let mut ma: BTreeMap<&str, f64> = BTreeMap::new();
    let mut mb: BTreeMap<&str, f64> = BTreeMap::new();
    let mut agree = 0.0;
    for (x, y) in a.iter().zip(b) {
        let (x, y) = (x.as_ref(), y.as_ref());
        *ma.entry(x).or_default() += 1.0;
        *mb.entry(y).or_default() += 1.0;
        if x == y {
            agree += 1.0;
        }
    }
    let p_o = agree / n;
    let p_e: f64 = ma.iter().map(|(k, ca)| ca / n * mb.get(k).copied().unwrap_or(0.0) / n).sum();
    if (1.0 - p_e).abs() < f64::EPSILON {
        return Ok(1.0);
    }
    Ok((p_o - p_e) / (1.0 - p_e))
}

/// Fleiss' kappa for items each rated by the same number of raters. `None` when
/// every rating falls in one category, where the statistic is undefined.
pub fn fleiss_kappa<S: AsRef<str>>(items: &[Vec<S>]) -> Result<Option<f64>, AnnotateError> {
    let Some(first) = items.first() else {
        return Err(AnnotateError::Contract("no items to compare".into()));
    };
    let r = first.len();
    if r < 2 {
        return Err(AnnotateError::Contract("need at least two ratings per item".into()));
    }
    if let Some(i) = items.iter().position(|row| row.len() != r) {
        return Err(AnnotateError::Contract(format!("item {} has {} ratings, expected {r}", i + 1, items[i].len())));
    }
    let categories: BTreeSet<&str> = items.iter().flatten().map(AsRef::as_ref).collect();
    let index: BTreeMap<&str, usize> = categories.iter().enumerate().map(|(i, c)| (*c, i)).collect();
    let (n, rf) = (items.len() as f64, r as f64);
    let mut totals = vec![0.0; categories.len()];
    let mut p_bar = 0.0;
    for row in items {
        let mut counts = vec![0.0; categories.len()];
        for label in row {
            counts[index[label.as_ref()]] += 1.0;
        }
        let sq: f64 = counts.iter().map(|c| c * c).sum();
        p_bar += (sq - rf) / (rf * (rf - 1.0));
        for (t, c) in totals.iter_mut().zip(&counts) {
            *t += c;
        }
    }
    p_bar /= n;
    let p_e: f64 = totals.iter().map(|t| (t / (n * rf)).powi(2)).sum();
    if (1.0 - p_e).abs() < f64::EPSILON {
        return Ok(None);
    }
    Ok(Some((p_bar - p_e) / (1.0 - p_e)))
}

/// Fleiss' kappa over the first label, the reviewer's suggestion and the final label.
pub fn stream_fleiss(records: &[AbaRecord]) -> Result<Option<f64>, AnnotateError> {
    let items: Vec<Vec<&str>> = records
        .iter()
        .map(|r| vec![r.a1.label.as_str(), r.b.suggested_label.as_str(), r.a2.label.as_str()])
        .collect();
    fleiss_kappa(&items)
}
