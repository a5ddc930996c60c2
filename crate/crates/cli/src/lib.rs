//! Command-line pipeline over `revisio-core`: configuration, stage orchestration
//! and report emission. The binary is a thin wrapper around [`execute`].

pub mod commands;
pub mod config;
pub mod output;
pub mod table;

use anyhow::Result;
use revisio_core::interpersonal::Task;

use crate::config::RunConfig;
use crate::output::{Manifest, OutDir};

#[derive(Debug, Clone, PartialEq)]
pub enum Command {
    Ingest,
    Metrics,
    Annotate { task: Option<Task>, stop_after_commits: Option<usize> },
    Uptake,
    Stats,
    Report,
    Synth { essays: usize },
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Ingest => "ingest",
            Command::Metrics => "metrics",
            Command::Annotate { .. } => "annotate",
            Command::Uptake => "uptake",
            Command::Stats => "stats",
            Command::Report => "report",
            Command::Synth { .. } => "synth",
        }
    }
}

/// Runs one command and writes `effective_config.json` and `<command>.errors.json`.
/// Returns the manifest; the run succeeded iff it lists no errors.
pub fn execute(cfg: &RunConfig, cmd: &Command) -> Result<Manifest> {
    let out = OutDir::new(&cfg.paths.out);
    std::fs::create_dir_all(out.root())?;
    let mut m = Manifest::new(cmd.name());
    out.write(&mut m, "effective_config.json", cfg.to_json())?;
    let result = match cmd {
        Command::Ingest => commands::ingest::run(cfg, &out, &mut m),
        Command::Metrics => commands::metrics::run(cfg, &out, &mut m),
        Command::Annotate { task, stop_after_commits } => commands::annotate::run(
            cfg,
            &out,
            &mut m,
            commands::annotate::AnnotateOptions { task: *task, stop_after_commits: *stop_after_commits },
        ),
        Command::Uptake => commands::uptake::run(cfg, &out, &mut m),
        Command::Stats => commands::stats::run(&out, &mut m),
        Command::Report => commands::report::run(&out, &mut m),
        Command::Synth { essays } => commands::synth::run(cfg, &out, &mut m, *essays),
    };
    if let Err(e) = result {
        m.error(format!("{e:#}"));
    }
    let mut json = serde_json::to_string_pretty(&m)?;
    json.push('\n');
    output::write_atomic(&out.path(&format!("{}.errors.json", cmd.name())), json.as_bytes())?;
    Ok(m)
}
