//! Run configuration: one JSON file plus command-line overrides.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use revisio_core::annotate::LlmClientConfig;
use revisio_core::embed::EmbeddingProviderConfig;
use revisio_core::interpersonal::Task;
use revisio_core::textual::Polarity;
use revisio_core::uptake::Thresholds;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Paths {
    /// Raw corpus JSONL read by `ingest`.
    pub corpus: Option<PathBuf>,
    /// CoNLL-U parses of every draft, read by `metrics`.
    pub conllu: Option<PathBuf>,
    /// Directory of prompt templates; built-ins fill any gaps.
    pub prompts: Option<PathBuf>,
    /// TSV of `writing_id, sentence_id, label` human labels for calibration.
    pub calibration: Option<PathBuf>,
    pub out: PathBuf,
}

impl Default for Paths {
    fn default() -> Self {
        Paths { corpus: None, conllu: None, prompts: None, calibration: None, out: PathBuf::from("out") }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LlmConfigs {
    pub agent_a: Option<LlmClientConfig>,
    pub agent_b: Option<LlmClientConfig>,
    pub filter: Option<LlmClientConfig>,
}

/// Raw grade bounds; grades are mapped onto `[0, 100]` while loading.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GradeBounds {
    pub min: f64,
    pub max: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub thresholds: Thresholds,
    pub mattr_window: usize,
    pub wl_iterations: usize,
    pub entropy_base: f64,
    pub trim_fraction: f64,
    pub grade_bounds: Option<GradeBounds>,
    pub extended_terminators: bool,
    pub coherence_polarity: Polarity,
    pub embedding: EmbeddingProviderConfig,
    pub llm: LlmConfigs,
    pub mock_llm: bool,
    pub tasks: Vec<Task>,
    pub worker_count: usize,
    pub batch_size: usize,
    pub max_retries: u32,
    pub max_rounds: u32,
    pub paths: Paths,
    pub seed: u64,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            thresholds: Thresholds::default(),
            mattr_window: 50,
            wl_iterations: 3,
            entropy_base: 2.0,
            trim_fraction: 0.025,
            grade_bounds: None,
            extended_terminators: false,
            coherence_polarity: Polarity::Distance,
            embedding: EmbeddingProviderConfig::default(),
            llm: LlmConfigs::default(),
            mock_llm: false,
            tasks: vec![Task::Emotion, Task::Moral],
            worker_count: 5,
            batch_size: 30,
            max_retries: 3,
            max_rounds: 10,
            paths: Paths::default(),
            seed: 0,
        }
    }
}

/// Flag values that take precedence over the file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub workers: Option<usize>,
    pub mock_llm: bool,
    pub polarity: Option<Polarity>,
    pub out: Option<PathBuf>,
}

impl RunConfig {
    pub fn load(path: Option<&Path>, overrides: &Overrides) -> Result<Self> {
        let mut cfg = match path {
            Some(p) => {
                let raw = std::fs::read_to_string(p).with_context(|| format!("reading config {}", p.display()))?;
                serde_json::from_str(&raw).with_context(|| format!("parsing config {}", p.display()))?
            }
            None => RunConfig::default(),
        };
        cfg.apply(overrides);
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn apply(&mut self, o: &Overrides) {
        if let Some(s) = o.seed {
            self.seed = s;
        }
        if let Some(w) = o.workers {
            self.worker_count = w;
        }
        if o.mock_llm {
            self.mock_llm = true;
        }
        if let Some(p) = o.polarity {
            self.coherence_polarity = p;
        }
        if let Some(out) = &o.out {
            self.paths.out = out.clone();
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.thresholds.validate()?;
        self.embedding.validate()?;
        if self.mattr_window == 0 {
            bail!("mattr_window must be positive");
        }
        if !(self.entropy_base > 1.0) || !self.entropy_base.is_finite() {
            bail!("entropy_base must be greater than 1, got {}", self.entropy_base);
        }
        if !(0.0..0.5).contains(&self.trim_fraction) {
            bail!("trim_fraction {} outside [0, 0.5)", self.trim_fraction);
        }
        if let Some(b) = self.grade_bounds {
            if !(b.min < b.max) {
                bail!("grade_bounds min {} must be below max {}", b.min, b.max);
            }
        }
        if self.worker_count == 0 || self.batch_size == 0 {
            bail!("worker_count and batch_size must be positive");
        }
        for c in [&self.llm.agent_a, &self.llm.agent_b, &self.llm.filter].into_iter().flatten() {
            c.validate()?;
        }
        Ok(())
    }

    /// Every field, defaults included, as pretty JSON.
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("config serializes");
        s.push('\n');
        s
    }
}
