//! `synth`: writes a seeded demonstration corpus and its dependency parses.

use anyhow::Result;
use revisio_core::synth::{planted_triad, TriadConfig};

use crate::config::RunConfig;
use crate::output::{Manifest, OutDir};

pub const SYNTH_CORPUS: &str = "synthetic_corpus.jsonl";
pub const SYNTH_CONLLU: &str = "synthetic_parses.conllu";
pub const SYNTH_TRUTH: &str = "synthetic_truth.tsv";

pub fn run(cfg: &RunConfig, out: &OutDir, m: &mut Manifest, essays: usize) -> Result<()> {
    let triad = planted_triad(&TriadConfig {
        essays,
        seed: cfg.seed,
        embed_dim: cfg.embedding.dim,
        embed_seed: cfg.embedding.seed,
        ..TriadConfig::default()
    });
    out.write(m, SYNTH_CORPUS, triad.bundle.to_jsonl_string())?;
    out.write(m, SYNTH_CONLLU, &triad.conllu)?;
    let mut truth = String::from("writing_id\tsuggestion_id\tadopted\n");
    for ((w, s), adopted) in &triad.truth {
        truth.push_str(&format!("{w}\t{s}\t{adopted}\n"));
    }
    out.write(m, SYNTH_TRUTH, truth)
}
