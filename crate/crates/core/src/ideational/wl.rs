//! Weisfeiler-Lehman subtree kernel over dependency graphs.
//!
//! Initial node labels are POS tags. Each refinement step relabels a node from its own
//! label and the sorted multiset of `(relation, neighbour label)` pairs taken over
//! undirected dependency edges. Labels are compressed through per-iteration
//! dictionaries shared by every graph of one featurisation, so histograms stay exact
//! integer counts and are comparable across graphs.

use std::collections::{BTreeMap, HashMap};

use rayon::prelude::*;

use super::conllu::DependencyGraph;
use crate::Score;

/// Label-count histograms of one graph, one per iteration `0..=h`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WlFeatures {
    pub histograms: Vec<BTreeMap<u32, u64>>,
}

impl WlFeatures {
    /// Sum over iterations of histogram dot products.
    pub fn kernel(&self, other: &WlFeatures) -> u64 {
        self.histograms
            .iter()
            .zip(&other.histograms)
            .map(|(a, b)| {
                let (small, large) = if a.len() <= b.len() { (a, b) } else { (b, a) };
                small
                    .iter()
                    .filter_map(|(label, ca)| large.get(label).map(|cb| ca * cb))
                    .sum::<u64>()
            })
            .sum()
    }
}

/// Shared relabelling dictionaries for one featurisation run.
#[derive(Debug, Default)]
pub struct WlLabeler {
    iterations: usize,
    tags: HashMap<String, u32>,
    relations: HashMap<String, u32>,
    refined: Vec<HashMap<(u32, Vec<(u32, u32)>), u32>>,
}

impl WlLabeler {
    pub fn new(iterations: usize) -> Self {
        WlLabeler {
            iterations,
            refined: vec![HashMap::new(); iterations],
            ..Default::default()
        }
    }

    fn intern(map: &mut HashMap<String, u32>, s: &str) -> u32 {
        let next = map.len() as u32;
        *map.entry(s.to_string()).or_insert(next)
    }

    pub fn featurize(&mut self, g: &DependencyGraph) -> WlFeatures {
        let n = g.nodes.len();
        let position: HashMap<u32, usize> = g
            .nodes
            .iter()
            .enumerate()
            .map(|(i, node)| (node.index, i))
            .collect();
        let mut adjacency: Vec<Vec<(u32, usize)>> = vec![Vec::new(); n];
        for e in &g.edges {
            if e.head == 0 {
                continue;
            }
            let (Some(&h), Some(&d)) = (position.get(&e.head), position.get(&e.dependent)) else {
                continue;
            };
            let rel = Self::intern(&mut self.relations, &e.relation);
            adjacency[h].push((rel, d));
            adjacency[d].push((rel, h));
        }

        let mut labels: Vec<u32> = g
            .nodes
            .iter()
            .map(|node| Self::intern(&mut self.tags, &node.pos_tag))
            .collect();
        let mut histograms = Vec::with_capacity(self.iterations + 1);
        histograms.push(histogram(&labels));
        for dict in self.refined.iter_mut() {
            let next: Vec<u32> = (0..n)
                .map(|i| {
                    let mut neigh: Vec<(u32, u32)> =
                        adjacency[i].iter().map(|&(rel, j)| (rel, labels[j])).collect();
                    neigh.sort_unstable();
                    let fresh = dict.len() as u32;
                    *dict.entry((labels[i], neigh)).or_insert(fresh)
                })
                .collect();
            labels = next;
            histograms.push(histogram(&labels));
        }
        WlFeatures { histograms }
    }
}

fn histogram(labels: &[u32]) -> BTreeMap<u32, u64> {
    let mut h = BTreeMap::new();
    for &l in labels {
        *h.entry(l).or_insert(0) += 1;
    }
    h
}

/// Featurise a whole set of graphs with one shared dictionary.
pub fn wl_features(graphs: &[DependencyGraph], iterations: usize) -> Vec<WlFeatures> {
    let mut labeler = WlLabeler::new(iterations);
    graphs.iter().map(|g| labeler.featurize(g)).collect()
}

/// WL subtree kernel value between two graphs.
pub fn wl_kernel(g1: &DependencyGraph, g2: &DependencyGraph, iterations: usize) -> u64 {
    let f = wl_features(&[g1.clone(), g2.clone()], iterations);
    f[0].kernel(&f[1])
}

/// Full Gram matrix. Rows are computed in parallel; entries are exact integers.
pub fn kernel_matrix(graphs: &[DependencyGraph], iterations: usize) -> Vec<Vec<u64>> {
    let features = wl_features(graphs, iterations);
    features
        .par_iter()
        .map(|a| features.iter().map(|b| a.kernel(b)).collect())
        .collect()
}

/// `k12 / sqrt(k11 * k22)`.
pub fn normalized_similarity(k12: u64, k11: u64, k22: u64) -> f64 {
    k12 as f64 / ((k11 as f64) * (k22 as f64)).sqrt()
}

/// Mean normalised WL distance over all ordered pairs of distinct sentences.
///
/// Fewer than two graphs yields a degenerate score of 0.
pub fn syntactic_diversity(graphs: &[DependencyGraph], iterations: usize) -> Score {
    let n = graphs.len();
    if n < 2 {
        return Score::degenerate();
    }
    let k = kernel_matrix(graphs, iterations);
    let mut total = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                total += 1.0 - normalized_similarity(k[i][j], k[i][i], k[j][j]);
            }
        }
    }
    Score::new((total / (n * (n - 1)) as f64).clamp(0.0, 1.0))
}
