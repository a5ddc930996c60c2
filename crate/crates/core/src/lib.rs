//! Batch analytics for LLM–teacher–student writing revision.
//!
//! The crate is organised by measurement layer:
//!
//! * [`corpus`]: data model, ingestion, segmentation and trimming
//! * [`embed`]: sentence-embedding providers and cosine similarity
//! * [`ideational`]: lexical richness (MATTR) and syntactic diversity (WL kernel)
//! * [`textual`]: semantic dispersion and semantic shift
//! * [`interpersonal`]: emotion and moral label distributions and their entropy
//! * [`annotate`]: the A–B–A LLM annotation pipeline with completeness control
//! * [`uptake`]: suggestion origin, revision candidates, adoption matching, effort
//! * [`stats`]: nonparametric tests, quartiles and fixed-effects regression
//! * [`synth`]: seeded synthetic generators used by tests, benches and the CLI

pub mod annotate;
pub mod corpus;

mod score;

pub use score::Score;
pub mod embed;
pub mod ideational;
pub mod interpersonal;
pub mod sfl;
pub mod stats;
pub mod synth;
pub mod textual;
pub mod uptake;

#[cfg(test)]
pub(crate) mod test_http;
