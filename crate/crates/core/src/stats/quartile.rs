/// Keys partitioned into four baseline groups.
#[derive(Debug, Clone, PartialEq)]
pub struct QuartileSplit<K> {
    pub groups: [Vec<K>; 4],
    pub cuts: [f64; 3],
    /// Set when at least one group is empty.
    pub degenerate: bool,
}

/// Linear-interpolation quantile on sorted data.
pub fn quantile_linear(sorted: &[f64], p: f64) -> f64 {
    assert!(!sorted.is_empty(), "quantile of empty sample");
    let h = (sorted.len() - 1) as f64 * p;
    let lo = h.floor() as usize;
    let hi = h.ceil() as usize;
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

/// Splits `(key, value)` pairs at the 25/50/75 percentiles. A value equal to a cut
/// falls into the lower group. Input order is preserved within each group.
pub fn quartile_split<K: Clone>(baseline: &[(K, f64)]) -> Result<QuartileSplit<K>, super::StatsError> {
    if baseline.len() < 4 {
        return Err(super::StatsError::TooFew { needed: 4, got: baseline.len() });
    }
    let mut sorted: Vec<f64> = baseline.iter().map(|(_, v)| *v).collect();
    if sorted.iter().any(|v| !v.is_finite()) {
        return Err(super::StatsError::NonFinite("quartile baseline".into()));
    }
    sorted.sort_by(f64::total_cmp);
    let cuts = [
        quantile_linear(&sorted, 0.25),
        quantile_linear(&sorted, 0.5),
        quantile_linear(&sorted, 0.75),
    ];
    let mut groups: [Vec<K>; 4] = Default::default();
    for (k, v) in baseline {
        let g = cuts.iter().position(|c| *v <= *c).unwrap_or(3);
        groups[g].push(k.clone());
    }
    let degenerate = groups.iter().any(Vec::is_empty);
    Ok(QuartileSplit { groups, cuts, degenerate })
}
