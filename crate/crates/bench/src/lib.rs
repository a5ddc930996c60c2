//! Seeded inputs shared by the benchmarks.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use revisio_core::ideational::DependencyGraph;

const POS: [&str; 6] = ["NOUN", "VERB", "ADJ", "ADV", "PRON", "PART"];
const REL: [&str; 5] = ["nsubj", "obj", "amod", "advmod", "mark"];

/// `n` tokens drawn from a vocabulary of `vocab` word types.
pub fn tokens(n: usize, vocab: usize, seed: u64) -> Vec<String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| format!("w{}", rng.random_range(0..vocab))).collect()
}

/// `n` random dependency trees of `len` tokens each.
pub fn trees(n: usize, len: usize, seed: u64) -> Vec<DependencyGraph> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|s| {
            let rows: Vec<(&str, u32, &str)> = (0..len)
                .map(|i| {
                    let head = if i == 0 { 0 } else { rng.random_range(1..=i) as u32 };
                    (POS[rng.random_range(0..POS.len())], head, REL[rng.random_range(0..REL.len())])
                })
                .collect();
            DependencyGraph::from_rows(format!("s{s}"), &rows)
        })
        .collect()
}

/// A pair of CJK-range strings of `len` characters where about `edit_rate` of the
/// positions differ.
pub fn sentence_pair(len: usize, edit_rate: f64, seed: u64) -> (String, String) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pick = |rng: &mut ChaCha8Rng| char::from_u32(rng.random_range(0x4E00..0x4F00)).unwrap();
    let a: Vec<char> = (0..len).map(|_| pick(&mut rng)).collect();
    let b: String = a.iter().map(|&c| if rng.random_bool(edit_rate) { pick(&mut rng) } else { c }).collect();
    (a.into_iter().collect(), b)
}
