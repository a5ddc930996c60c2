//! `annotate`: relevance filtering, the three-stage labelling loop and completeness
//! control for one or more tasks, resumable from the files it leaves behind.

use std::collections::{BTreeMap, HashMap};
use std::path::Path;
use std::sync::Arc;

use anyhow::{bail, Context, Result};
use revisio_core::annotate::{
    calibration_round, completeness_loop, final_labels_tsv, read_events, relevance_filter, stream_fleiss, AbaClients,
    AbaRecord, AbaRunner, FilterDecision, HttpLlmClient, LedgerEvent, LlmClient, LlmClientConfig, LoopConfig, MockLlm,
    PromptSet, RunLedger, SentenceKey, StreamFile,
};
use revisio_core::corpus::Sentence;
use revisio_core::interpersonal::Task;

use super::{analysed_sentences, labels_file, load_bundle};
use crate::config::RunConfig;
use crate::output::{to_jsonl, write_atomic, Manifest, OutDir};
use crate::table::{opt_fixed, Table};

#[derive(Debug, Clone, Copy, Default)]
pub struct AnnotateOptions {
    pub task: Option<Task>,
    /// Stop after this many committed batches, leaving a resumable state.
    pub stop_after_commits: Option<usize>,
}

struct Clients {
    agent_a: Arc<dyn LlmClient>,
    agent_b: Arc<dyn LlmClient>,
    filter: Arc<dyn LlmClient>,
}

fn http(c: &Option<LlmClientConfig>, role: &str) -> Result<Arc<dyn LlmClient>> {
    let c = c.as_ref().with_context(|| format!("llm.{role} is not configured (or pass --mock-llm)"))?;
    Ok(Arc::new(HttpLlmClient::new(c.clone())?))
}

fn clients(cfg: &RunConfig, task: Task) -> Result<Clients> {
    if cfg.mock_llm {
        let mock: Arc<dyn LlmClient> = Arc::new(MockLlm::new(task, cfg.seed));
        return Ok(Clients { agent_a: mock.clone(), agent_b: mock.clone(), filter: mock });
    }
    Ok(Clients {
        agent_a: http(&cfg.llm.agent_a, "agent_a")?,
        agent_b: http(&cfg.llm.agent_b, "agent_b")?,
        filter: http(&cfg.llm.filter, "filter")?,
    })
}

fn append_events(path: &Path, events: &[LedgerEvent]) -> Result<()> {
    use std::io::Write;
    let mut f = std::fs::OpenOptions::new().create(true).append(true).open(path)?;
    f.write_all(to_jsonl(events).as_bytes())?;
    Ok(())
}

/// Filter decisions, reused from an earlier run when present. Pending sentences
/// are retried on every run until they get a decision.
fn filter_stage(
    sentences: &[Sentence],
    dir: &Path,
    clients: &Clients,
    prompts: &PromptSet,
    cfg: &RunConfig,
) -> Result<(BTreeMap<SentenceKey, bool>, Vec<Sentence>)> {
    let path = dir.join("filter.jsonl");
    let mut decided: BTreeMap<SentenceKey, bool> = BTreeMap::new();
    if path.exists() {
        for (i, line) in std::fs::read_to_string(&path)?.lines().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let d: FilterDecision =
                serde_json::from_str(line).with_context(|| format!("{} line {}", path.display(), i + 1))?;
            decided.insert(d.key, d.pass);
        }
    }
    let todo: Vec<Sentence> = sentences.iter().filter(|s| !decided.contains_key(&SentenceKey::of(s))).cloned().collect();
    let mut pending = Vec::new();
    if !todo.is_empty() {
        let mut events = Vec::new();
        let part = relevance_filter(&todo, clients.filter.as_ref(), &prompts.filter, cfg.batch_size, cfg.max_retries, &mut events);
        for d in part.decisions {
            decided.insert(d.key, d.pass);
        }
        pending = part.pending;
        append_events(&dir.join("filter_events.jsonl"), &events)?;
    }
    let all: Vec<FilterDecision> = decided.iter().map(|(k, p)| FilterDecision { key: k.clone(), pass: *p }).collect();
    write_atomic(&path, to_jsonl(&all).as_bytes())?;
    Ok((decided, pending))
}

fn read_human_labels(path: &Path) -> Result<Vec<(SentenceKey, String)>> {
    let raw = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let mut out = Vec::new();
    for (i, line) in raw.lines().enumerate() {
        let f: Vec<&str> = line.split('\t').collect();
        if line.trim().is_empty() || f[0] == "writing_id" {
            continue;
        }
        if f.len() < 3 {
            bail!("{} line {}: expected writing_id, sentence_id, label", path.display(), i + 1);
        }
        let id: u32 = f[1].trim().parse().with_context(|| format!("{} line {}", path.display(), i + 1))?;
        out.push((SentenceKey::new(f[0].trim(), id), f[2].trim().to_string()));
    }
    Ok(out)
}

pub fn run(cfg: &RunConfig, out: &OutDir, m: &mut Manifest, opts: AnnotateOptions) -> Result<()> {
    let bundle = load_bundle(out)?;
    let sentences: Vec<Sentence> = bundle.drafts.iter().flat_map(|d| analysed_sentences(cfg, d)).collect();
    let tasks = opts.task.map_or_else(|| cfg.tasks.clone(), |t| vec![t]);
    let mut summary = Table::new(
        "annotation_agreement",
        "Annotation completeness and agreement",
        &["task", "sentences", "relevant", "labelled", "final_failures", "pending", "rounds", "retries", "fleiss_kappa"],
    );
    for task in tasks {
        let dir = out.path(&format!("annotate_{task}"));
        std::fs::create_dir_all(&dir)?;
        let clients = clients(cfg, task)?;
        let prompts = match &cfg.paths.prompts {
            Some(p) => PromptSet::load(p, task)?,
            None => PromptSet::builtin(task),
        };

        if let Some(cal_dir) = &cfg.paths.calibration {
            let path = cal_dir.join(format!("{task}.tsv"));
            if path.exists() {
                let by_key: HashMap<SentenceKey, &Sentence> = sentences.iter().map(|s| (SentenceKey::of(s), s)).collect();
                let mut sample = Vec::new();
                let mut human = Vec::new();
                for (k, label) in read_human_labels(&path)? {
                    match by_key.get(&k) {
                        Some(s) => {
                            sample.push((*s).clone());
                            human.push(label);
                        }
                        None => m.warn(format!("calibration key {k} is not an analysed sentence")),
                    }
                }
                let aba = AbaClients { agent_a: clients.agent_a.clone(), agent_b: clients.agent_b.clone(), max_retries: cfg.max_retries };
                let round = calibration_round(&sample, &human, task, &aba, &prompts)?;
                m.warnings.extend(round.warnings);
                let mut t = Table::new(&format!("calibration_{task}"), &format!("Calibration ({task})"), &["sentences", "cohen_kappa"]);
                t.push(vec![sample.len().to_string(), format!("{:.4}", round.kappa)]);
                t.write(out, m)?;
            }
        }

        let (decided, pending) = filter_stage(&sentences, &dir, &clients, &prompts, cfg)?;
        for s in &pending {
            m.error(format!("{task}: relevance decision pending for {}", SentenceKey::of(s)));
        }
        let relevant: Vec<&Sentence> = sentences.iter().filter(|s| decided.get(&SentenceKey::of(s)) == Some(&true)).collect();
        let by_key: HashMap<SentenceKey, Sentence> = relevant.iter().map(|s| (SentenceKey::of(s), (*s).clone())).collect();

        let mut ledger = RunLedger::open(&dir.join("ledger.jsonl"), by_key.keys().cloned())?;
        let (mut sink, prior) = StreamFile::open(&dir.join("stream.jsonl"))?;
        ledger.done = prior.iter().map(|r| r.key.clone()).filter(|k| ledger.target.contains(k)).collect();
        let runner = AbaRunner {
            task,
            clients: AbaClients { agent_a: clients.agent_a.clone(), agent_b: clients.agent_b.clone(), max_retries: cfg.max_retries },
            prompts,
        };
        let loop_cfg = LoopConfig {
            batch_size: cfg.batch_size,
            workers: cfg.worker_count,
            max_rounds: cfg.max_rounds,
            stop_after_commits: opts.stop_after_commits,
        };
        let s = completeness_loop(&mut ledger, &by_key, &runner, &mut sink, &loop_cfg)?;
        drop(sink);
        if s.interrupted {
            m.error(format!("{task}: run stopped after {} committed batches; rerun to resume", s.commits));
            continue;
        }

        let (_, stored) = StreamFile::open(&dir.join("stream.jsonl"))?;
        let mut latest: BTreeMap<SentenceKey, AbaRecord> = BTreeMap::new();
        for r in stored {
            if ledger.target.contains(&r.key) {
                latest.entry(r.key.clone()).or_insert(r);
            }
        }
        let records: Vec<AbaRecord> = latest.into_values().collect();
        out.write(m, &labels_file(task), final_labels_tsv(&records))?;
        for k in &ledger.final_failures {
            m.error(format!("{task}: no valid label for {k} after splitting down to a single sentence"));
        }
        for k in ledger.missing() {
            m.error(format!("{task}: {k} still missing after {} rounds", s.rounds));
        }
        let events = read_events(&dir.join("ledger.jsonl"))?;
        let retries = events.iter().filter(|e| matches!(e, LedgerEvent::Retry { .. })).count();
        let kappa = stream_fleiss(&records)?;
        summary.push(vec![
            task.to_string(),
            sentences.len().to_string(),
            relevant.len().to_string(),
            records.len().to_string(),
            ledger.final_failures.len().to_string(),
            pending.len().to_string(),
            s.rounds.to_string(),
            retries.to_string(),
            opt_fixed(kappa, 4),
        ]);
    }
    summary.notes.push("kappa is Fleiss' kappa over the initial, reviewer-suggested and final label streams".into());
    summary.write(out, m)
}
