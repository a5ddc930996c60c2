use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Result;
use clap::{Parser, Subcommand};
use revisio_cli::config::{Overrides, RunConfig};
use revisio_cli::{execute, Command};
use revisio_core::interpersonal::Task;
use revisio_core::textual::Polarity;

#[derive(Parser)]
#[command(name = "revisio", version, about = "Writing-revision analytics pipeline")]
struct Cli {
    /// JSON run configuration; omitted fields take their defaults.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true)]
    workers: Option<usize>,
    /// Use the built-in deterministic model instead of the configured endpoints.
    #[arg(long, global = true)]
    mock_llm: bool,
    #[arg(long, global = true, value_parser = parse_polarity)]
    polarity: Option<Polarity>,
    /// Output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Sub,
}

#[derive(Subcommand)]
enum Sub {
    /// Validate and trim the corpus, write the canonical bundle and dataset summary.
    Ingest,
    /// Compute the six linguistic measures and growth tables.
    Metrics,
    /// Label emotion and moral content of every sentence.
    Annotate {
        #[arg(long, value_parser = parse_task)]
        task: Option<Task>,
        #[arg(long, hide = true)]
        stop_after_commits: Option<usize>,
    },
    /// Trace suggestion origin and adoption.
    Uptake,
    /// Fixed-effects regressions and quartile correlations.
    Stats,
    /// Collect all tables into report.md.
    Report,
    /// Write a seeded synthetic corpus with dependency parses.
    Synth {
        #[arg(long, default_value_t = 200)]
        essays: usize,
    },
}

fn parse_polarity(s: &str) -> Result<Polarity, String> {
    s.parse()
}

fn parse_task(s: &str) -> Result<Task, String> {
    match s {
        "emotion" => Ok(Task::Emotion),
        "moral" => Ok(Task::Moral),
        other => Err(format!("unknown task {other:?}")),
    }
}

fn main() -> ExitCode {
    match run() {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn run() -> Result<bool> {
    let cli = Cli::parse();
    let overrides = Overrides {
        seed: cli.seed,
        workers: cli.workers,
        mock_llm: cli.mock_llm,
        polarity: cli.polarity,
        out: cli.out,
    };
    let cfg = RunConfig::load(cli.config.as_deref(), &overrides)?;
    let cmd = match cli.command {
        Sub::Ingest => Command::Ingest,
        Sub::Metrics => Command::Metrics,
        Sub::Annotate { task, stop_after_commits } => Command::Annotate { task, stop_after_commits },
        Sub::Uptake => Command::Uptake,
        Sub::Stats => Command::Stats,
        Sub::Report => Command::Report,
        Sub::Synth { essays } => Command::Synth { essays },
    };
    let manifest = execute(&cfg, &cmd)?;
    for w in &manifest.warnings {
        eprintln!("warning: {w}");
    }
    for e in &manifest.errors {
        eprintln!("error: {e}");
    }
    Ok(manifest.ok())
}
