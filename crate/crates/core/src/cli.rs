//! The `eventrl` command line.
//!
//! ```text
//! eventrl generate --out runs/corpus
//! eventrl train --method sft --corpus runs/corpus --out runs/sft
//! eventrl train --method eventrl --reward prod --corpus runs/corpus --out runs/prod
//! eventrl eval --checkpoint runs/prod/checkpoint.ckpt --corpus runs/corpus --split held_out
//! eventrl errors --checkpoint runs/prod/checkpoint.ckpt --corpus runs/corpus --split held_out
//! eventrl compare --runs runs/sft runs/prod
//! ```
//!
//! Exit codes: 0 on success, 2 for usage and configuration errors, 3 when
//! training diverges numerically.

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::{
    generate_corpus, load_jsonl, prepare_corpus, save_jsonl, PreparedSample, Split, SplitPlan, DEFAULT_SCHEMA,
};
use crate::events::{EventList, ErrorCounts};
use crate::policy::{content_hash, load_checkpoint, save_checkpoint, DecodeSettings, PolicyError, PolicyParams, DEFAULT_K_MAX};
use crate::reward::{ClipMode, RewardKind};
use crate::schema::{parse_schema, EventSchema};
use crate::scoring::{F1Pair, MatchCriteria};
use crate::trainer::{
    ablate, eventrl_train, evaluate, evaluate_outputs, sft_train, Ablation, Evaluation, SftConfig, TrainConfig,
    TrainerError,
};

/// Environment variable naming the root under which default output paths live.
pub const OUT_ENV: &str = "EVENTRL_OUT";
const DEFAULT_OUT_ROOT: &str = "runs";

const CORPUS_META: &str = "corpus.json";
const CORPUS_SCHEMA: &str = "types.schema";
const CHECKPOINT: &str = "checkpoint.ckpt";
const SFT_CHECKPOINT: &str = "sft.ckpt";
const LOG: &str = "log.jsonl";
const MANIFEST: &str = "manifest.json";

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),
    #[error("numeric failure: {0}")]
    Numeric(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Numeric(_) => 3,
        }
    }
}

fn config_err(e: impl std::fmt::Display) -> CliError {
    CliError::Config(e.to_string())
}

impl From<TrainerError> for CliError {
    fn from(e: TrainerError) -> Self {
        match e {
            TrainerError::Policy(PolicyError::NonFiniteUpdate | PolicyError::NonFiniteLogit(_)) => {
                CliError::Numeric(e.to_string())
            }
            other => CliError::Config(other.to_string()),
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "eventrl", version, about = "Outcome-supervised RL for event extraction")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate the synthetic corpus: one JSONL file per split plus metadata.
    Generate(GenerateArgs),
    /// Train a policy with SFT, or with EventRL on top of an SFT checkpoint.
    Train(TrainArgs),
    /// Greedy-decode a split and report Trigger-F1, Argument-F1 and AVG.
    Eval(EvalArgs),
    /// Count undefined-type, structural-mismatch and parse errors on a split.
    Errors(ErrorsArgs),
    /// Tabulate held-in and held-out results of several runs.
    Compare(CompareArgs),
}

fn out_root() -> PathBuf {
    std::env::var_os(OUT_ENV)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(DEFAULT_OUT_ROOT))
}

#[derive(Debug, Args)]
pub struct GenerateArgs {
    /// Schema file; the bundled 33-type schema when omitted.
    #[arg(long)]
    pub schema: Option<PathBuf>,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    /// Output directory [default: $EVENTRL_OUT/corpus].
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Candidate-set size recorded for training and evaluation.
    #[arg(long, default_value_t = DEFAULT_K_MAX)]
    pub k_max: usize,
    #[arg(long)]
    pub train_per_type: Option<usize>,
    #[arg(long)]
    pub dev_per_type: Option<usize>,
    #[arg(long)]
    pub held_in_per_type: Option<usize>,
    #[arg(long)]
    pub held_out_per_type: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Method {
    Sft,
    Eventrl,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum RewardArg {
    Arg,
    Avg,
    Prod,
}

impl From<RewardArg> for RewardKind {
    fn from(r: RewardArg) -> Self {
        match r {
            RewardArg::Arg => RewardKind::ArgF1,
            RewardArg::Avg => RewardKind::AvgF1,
            RewardArg::Prod => RewardKind::ProdF1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ClipArg {
    Literal,
    SignPreserving,
}

impl From<ClipArg> for ClipMode {
    fn from(c: ClipArg) -> Self {
        match c {
            ClipArg::Literal => ClipMode::Literal,
            ClipArg::SignPreserving => ClipMode::SignPreserving,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CriteriaArg {
    /// Type for triggers, type and role for arguments.
    Default,
    /// Also require the trigger mention and the argument filler to match.
    Strict,
}

impl From<CriteriaArg> for MatchCriteria {
    fn from(c: CriteriaArg) -> Self {
        match c {
            CriteriaArg::Default => MatchCriteria::default(),
            CriteriaArg::Strict => MatchCriteria::STRICT,
        }
    }
}

#[derive(Debug, Args)]
pub struct CorpusArgs {
    /// Directory written by `generate`.
    #[arg(long)]
    pub corpus: PathBuf,
    /// Schema file [default: the copy stored in the corpus directory].
    #[arg(long)]
    pub schema: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct TrainArgs {
    #[arg(long, value_enum)]
    pub method: Method,
    #[command(flatten)]
    pub corpus: CorpusArgs,
    #[arg(long, value_enum, default_value_t = RewardArg::Prod)]
    pub reward: RewardArg,
    /// Teacher-force threshold.
    #[arg(long, default_value_t = 70.0, allow_negative_numbers = true)]
    pub tau: f64,
    /// Advantage floor.
    #[arg(long, default_value_t = 10.0, allow_negative_numbers = true)]
    pub a_min: f64,
    #[arg(long, value_enum, default_value_t = ClipArg::Literal)]
    pub clip_mode: ClipArg,
    #[arg(long)]
    pub no_teacher_force: bool,
    #[arg(long)]
    pub no_advantage_clip: bool,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    /// Epochs of the selected method.
    #[arg(long, default_value_t = 10)]
    pub epochs: usize,
    /// Learning rate of the selected method [default: 0.1 for sft, 0.5 for eventrl].
    #[arg(long)]
    pub lr: Option<f64>,
    #[arg(long, default_value_t = 2)]
    pub micro_batch: usize,
    #[arg(long, default_value_t = 32)]
    pub global_batch: usize,
    #[arg(long, default_value_t = 0.5)]
    pub temperature: f64,
    #[arg(long, default_value_t = 0.95)]
    pub top_p: f64,
    /// Multiplier on the gold gradient in teacher-force steps.
    #[arg(long, default_value_t = 0.1)]
    pub tf_scale: f64,
    /// Epochs of the SFT stage that initializes EventRL.
    #[arg(long, default_value_t = 10)]
    pub sft_epochs: usize,
    #[arg(long, default_value_t = 0.1)]
    pub sft_lr: f64,
    /// Start EventRL from this checkpoint instead of running SFT first.
    #[arg(long)]
    pub init: Option<PathBuf>,
    /// Run directory [default: $EVENTRL_OUT/<method>].
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
#[group(id = "predictor", required = true, multiple = false)]
pub struct Predictor {
    #[arg(long, group = "predictor")]
    pub checkpoint: Option<PathBuf>,
    /// Debug: predict gold for every sample.
    #[arg(long, group = "predictor")]
    pub oracle: bool,
    /// Debug: predict nothing for every sample.
    #[arg(long, group = "predictor")]
    pub empty_baseline: bool,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    #[command(flatten)]
    pub predictor: Predictor,
    #[command(flatten)]
    pub corpus: CorpusArgs,
    #[arg(long, default_value = "held_out")]
    pub split: Split,
    #[arg(long, value_enum, default_value_t = CriteriaArg::Default)]
    pub criteria: CriteriaArg,
    /// CSV path [default: eval_<split>.csv next to the checkpoint].
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ErrorsArgs {
    #[command(flatten)]
    pub predictor: Predictor,
    #[command(flatten)]
    pub corpus: CorpusArgs,
    #[arg(long, default_value = "held_out")]
    pub split: Split,
    /// CSV path [default: errors_<split>.csv next to the checkpoint].
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CompareArgs {
    /// Run directories, each holding manifest.json, eval_held_in.csv and eval_held_out.csv.
    #[arg(long, num_args = 1.., required = true)]
    pub runs: Vec<PathBuf>,
    /// Also write the table as CSV.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Metadata stored next to the corpus files.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorpusMeta {
    pub seed: u64,
    pub k_max: usize,
    pub plan: SplitPlan,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentManifest {
    pub label: String,
    pub method: String,
    pub sft: Option<SftConfig>,
    pub config: Option<TrainConfig>,
    pub corpus: PathBuf,
    pub schema: PathBuf,
    pub out: PathBuf,
    pub init: Option<PathBuf>,
    pub checkpoint_id: String,
    pub best_epoch: Option<usize>,
}

/// Runs the CLI on `args` (including the program name) and returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match execute(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

pub fn execute(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Generate(a) => cmd_generate(&a),
        Command::Train(a) => cmd_train(&a),
        Command::Eval(a) => cmd_eval(&a),
        Command::Errors(a) => cmd_errors(&a),
        Command::Compare(a) => cmd_compare(&a),
    }
}

fn read_to_string(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))
}

fn write_file(path: &Path, contents: impl AsRef<[u8]>) -> Result<(), CliError> {
    fs::write(path, contents).map_err(|e| CliError::Config(format!("cannot write {}: {e}", path.display())))
}

fn create_dir(path: &Path) -> Result<(), CliError> {
    fs::create_dir_all(path).map_err(|e| CliError::Config(format!("cannot create {}: {e}", path.display())))
}

fn load_schema(path: &Path) -> Result<EventSchema, CliError> {
    parse_schema(&read_to_string(path)?).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
}

fn split_file(dir: &Path, split: Split) -> PathBuf {
    dir.join(format!("{split}.jsonl"))
}

pub fn cmd_generate(args: &GenerateArgs) -> Result<(), CliError> {
    let source = match &args.schema {
        Some(p) => read_to_string(p)?,
        None => DEFAULT_SCHEMA.to_string(),
    };
    let schema = parse_schema(&source).map_err(config_err)?;
    let mut plan = SplitPlan::for_schema(&schema);
    for (field, value) in [
        (&mut plan.train_per_type, args.train_per_type),
        (&mut plan.dev_per_type, args.dev_per_type),
        (&mut plan.held_in_per_type, args.held_in_per_type),
        (&mut plan.held_out_per_type, args.held_out_per_type),
    ] {
        if let Some(v) = value {
            *field = v;
        }
    }
    if args.k_max == 0 {
        return Err(config_err("--k-max must be positive"));
    }
    let samples = generate_corpus(&schema, &plan, args.seed).map_err(config_err)?;
    let out = args.out.clone().unwrap_or_else(|| out_root().join("corpus"));
    create_dir(&out)?;
    for split in Split::ALL {
        let part: Vec<_> = samples.iter().filter(|s| s.split == split).cloned().collect();
        save_jsonl(&part, &split_file(&out, split)).map_err(config_err)?;
        println!("{split}: {} samples", part.len());
    }
    write_file(&out.join(CORPUS_SCHEMA), schema.to_source())?;
    let meta = CorpusMeta {
        seed: args.seed,
        k_max: args.k_max,
        plan,
    };
    write_file(&out.join(CORPUS_META), to_json(&meta) + "\n")?;
    println!("corpus written to {}", out.display());
    Ok(())
}

fn to_json<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("plain data serializes")
}

struct LoadedCorpus {
    schema_path: PathBuf,
    samples: Vec<PreparedSample>,
}

impl LoadedCorpus {
    fn split(&self, split: Split) -> Vec<PreparedSample> {
        self.samples.iter().filter(|s| s.split == split).cloned().collect()
    }
}

fn load_corpus(args: &CorpusArgs, splits: &[Split]) -> Result<LoadedCorpus, CliError> {
    let meta: CorpusMeta = serde_json::from_str(&read_to_string(&args.corpus.join(CORPUS_META))?)
        .map_err(|e| CliError::Config(format!("{}: {e}", args.corpus.join(CORPUS_META).display())))?;
    let schema_path = args.schema.clone().unwrap_or_else(|| args.corpus.join(CORPUS_SCHEMA));
    let schema = load_schema(&schema_path)?;
    meta.plan.check(&schema).map_err(config_err)?;
    let mut raw = Vec::new();
    for &split in splits {
        let path = split_file(&args.corpus, split);
        let part = load_jsonl(&path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        if let Some(s) = part.iter().find(|s| s.split != split) {
            return Err(CliError::Config(format!("{}: sample {} belongs to split {}", path.display(), s.id, s.split)));
        }
        raw.extend(part);
    }
    let samples = prepare_corpus(&raw, &schema, &meta.plan, meta.k_max, meta.seed).map_err(config_err)?;
    Ok(LoadedCorpus { schema_path, samples })
}

fn method_label(args: &TrainArgs, kind: RewardKind) -> String {
    match args.method {
        Method::Sft => "SFT".to_string(),
        Method::Eventrl => {
            let mut label = format!("EventRL({})", kind.label());
            if args.no_teacher_force {
                label.push_str(" w/o Teacher-Force");
            }
            if args.no_advantage_clip {
                label.push_str(" w/o Advantage-Clip");
            }
            label
        }
    }
}

fn default_run_dir(args: &TrainArgs) -> PathBuf {
    let name = match args.method {
        Method::Sft => "sft".to_string(),
        Method::Eventrl => {
            let reward = match args.reward {
                RewardArg::Arg => "arg",
                RewardArg::Avg => "avg",
                RewardArg::Prod => "prod",
            };
            let mut name = format!("eventrl-{reward}");
            if args.no_teacher_force {
                name.push_str("-no-tf");
            }
            if args.no_advantage_clip {
                name.push_str("-no-clip");
            }
            name
        }
    };
    out_root().join(name)
}

fn sft_log(history: &[f64]) -> String {
    history
        .iter()
        .enumerate()
        .map(|(epoch, nll)| serde_json::json!({"record": "sft_epoch", "epoch": epoch, "mean_nll": nll}).to_string() + "\n")
        .collect()
}

fn save_params(params: &PolicyParams, path: &Path) -> Result<(), CliError> {
    save_checkpoint(params, path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
}

fn finite(name: &str, v: f64) -> Result<(), CliError> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(CliError::Config(format!("--{name} must be finite")))
    }
}

pub fn cmd_train(args: &TrainArgs) -> Result<(), CliError> {
    for (name, v) in [("tau", args.tau), ("a-min", args.a_min), ("sft-lr", args.sft_lr)] {
        finite(name, v)?;
    }
    let kind = RewardKind::from(args.reward);
    let label = method_label(args, kind);
    let out = args.out.clone().unwrap_or_else(|| default_run_dir(args));
    if out.join(MANIFEST).exists() {
        return Err(CliError::Config(format!(
            "{} already holds a run; choose a fresh --out",
            out.display()
        )));
    }
    let corpus = load_corpus(&args.corpus, &[Split::Train, Split::Dev])?;
    let train = corpus.split(Split::Train);
    let dev = corpus.split(Split::Dev);
    create_dir(&out)?;

    let sft_config = |epochs, learning_rate| SftConfig {
        epochs,
        learning_rate,
        seed: args.seed,
        ..SftConfig::default()
    };
    let manifest = match args.method {
        Method::Sft => {
            let config = sft_config(args.epochs, args.lr.unwrap_or(0.1));
            let (params, history) = sft_train(&PolicyParams::new(), &train, &config)?;
            save_params(&params, &out.join(CHECKPOINT))?;
            write_file(&out.join(LOG), sft_log(&history))?;
            if let Some(last) = history.last() {
                println!("final mean NLL {last:.2}");
            }
            ExperimentManifest {
                label,
                method: "sft".into(),
                sft: Some(config),
                config: None,
                corpus: args.corpus.corpus.clone(),
                schema: corpus.schema_path.clone(),
                out: out.clone(),
                init: None,
                checkpoint_id: content_hash(&params),
                best_epoch: None,
            }
        }
        Method::Eventrl => {
            let base = TrainConfig {
                reward_kind: kind,
                tau: args.tau,
                a_min: args.a_min,
                learning_rate: args.lr.unwrap_or(TrainConfig::default().learning_rate),
                epochs: args.epochs,
                micro_batch: args.micro_batch,
                global_batch: args.global_batch,
                decode: DecodeSettings {
                    temperature: args.temperature,
                    top_p: args.top_p,
                },
                seed: args.seed,
                clip_mode: args.clip_mode.into(),
                tf_scale: args.tf_scale,
            };
            let config = ablate(
                &base,
                Ablation {
                    no_teacher_force: args.no_teacher_force,
                    no_advantage_clip: args.no_advantage_clip,
                },
            );
            config.check()?;
            let (init, sft) = match &args.init {
                Some(path) => (
                    load_checkpoint(path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?,
                    None,
                ),
                None => {
                    let sft = sft_config(args.sft_epochs, args.sft_lr);
                    let (params, _) = sft_train(&PolicyParams::new(), &train, &sft)?;
                    save_params(&params, &out.join(SFT_CHECKPOINT))?;
                    (params, Some(sft))
                }
            };
            let outcome = eventrl_train(&init, &train, &dev, &config)?;
            save_params(&outcome.params, &out.join(CHECKPOINT))?;
            write_file(&out.join(LOG), outcome.log())?;
            for r in &outcome.reports {
                println!(
                    "epoch {}: dev trigger {:.2} argument {:.2} avg {:.2}, teacher-forced {:.2}",
                    r.epoch,
                    r.dev.trigger_f1,
                    r.dev.argument_f1,
                    r.dev.average(),
                    r.teacher_force_fraction
                );
            }
            ExperimentManifest {
                label,
                method: "eventrl".into(),
                sft,
                config: Some(config),
                corpus: args.corpus.corpus.clone(),
                schema: corpus.schema_path.clone(),
                out: out.clone(),
                init: args.init.clone(),
                checkpoint_id: content_hash(&outcome.params),
                best_epoch: outcome.best_epoch,
            }
        }
    };
    write_file(&out.join(MANIFEST), to_json(&manifest) + "\n")?;
    println!("{} written to {}", manifest.label, out.display());
    Ok(())
}

/// Decodes `split` with the selected predictor. Returns the evaluation and
/// a label naming the predictor.
fn predict(
    predictor: &Predictor,
    corpus: &CorpusArgs,
    split: Split,
    criteria: MatchCriteria,
) -> Result<(Evaluation, String, usize), CliError> {
    let loaded = load_corpus(corpus, &[split])?;
    let samples = loaded.split(split);
    if samples.is_empty() {
        return Err(CliError::Config(format!("split {split} is empty")));
    }
    let empty = EventList::default();
    let (evaluation, label) = if let Some(path) = &predictor.checkpoint {
        let params = load_checkpoint(path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        (evaluate(&params, &samples, criteria)?, run_label(path))
    } else if predictor.oracle {
        let outputs: Vec<&EventList> = samples.iter().map(|s| &s.gold).collect();
        (evaluate_outputs(&outputs, &samples, criteria)?, "oracle".to_string())
    } else {
        let outputs = vec![&empty; samples.len()];
        (evaluate_outputs(&outputs, &samples, criteria)?, "empty".to_string())
    };
    Ok((evaluation, label, samples.len()))
}

/// Label of the run a checkpoint belongs to: the manifest label when one sits
/// next to it, the file stem otherwise.
fn run_label(checkpoint: &Path) -> String {
    let manifest = checkpoint.parent().map(|d| d.join(MANIFEST));
    manifest
        .and_then(|m| fs::read_to_string(m).ok())
        .and_then(|text| serde_json::from_str::<ExperimentManifest>(&text).ok())
        .map(|m| m.label)
        .unwrap_or_else(|| {
            checkpoint
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_default()
        })
}

fn default_report_path(predictor: &Predictor, corpus: &Path, name: &str) -> PathBuf {
    match &predictor.checkpoint {
        Some(ckpt) => ckpt.parent().unwrap_or(Path::new(".")).join(name),
        None => {
            let tag = if predictor.oracle { "oracle" } else { "empty" };
            corpus.join(format!("{tag}_{name}"))
        }
    }
}

/// One row of `eval_<split>.csv`. Scores appear rounded to two decimals and
/// again at full precision.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalRow {
    pub method: String,
    pub split: Split,
    pub criteria: String,
    pub samples: usize,
    pub trigger_f1: String,
    pub argument_f1: String,
    pub avg: String,
    pub trigger_f1_full: f64,
    pub argument_f1_full: f64,
    pub avg_full: f64,
    pub trigger_tp: usize,
    pub trigger_pred: usize,
    pub trigger_gold: usize,
    pub argument_tp: usize,
    pub argument_pred: usize,
    pub argument_gold: usize,
}

impl EvalRow {
    fn new(method: String, split: Split, criteria: CriteriaArg, samples: usize, f1: &F1Pair) -> Self {
        Self {
            method,
            split,
            criteria: format!("{criteria:?}").to_lowercase(),
            samples,
            trigger_f1: format!("{:.2}", f1.trigger_f1),
            argument_f1: format!("{:.2}", f1.argument_f1),
            avg: format!("{:.2}", f1.average()),
            trigger_f1_full: f1.trigger_f1,
            argument_f1_full: f1.argument_f1,
            avg_full: f1.average(),
            trigger_tp: f1.trigger_counts.tp,
            trigger_pred: f1.trigger_counts.pred,
            trigger_gold: f1.trigger_counts.gold,
            argument_tp: f1.argument_counts.tp,
            argument_pred: f1.argument_counts.pred,
            argument_gold: f1.argument_counts.gold,
        }
    }
}

fn write_csv<T: Serialize>(path: &Path, rows: &[T]) -> Result<(), CliError> {
    let io = |e: csv::Error| CliError::Config(format!("cannot write {}: {e}", path.display()));
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        create_dir(dir)?;
    }
    let mut w = csv::Writer::from_path(path).map_err(io)?;
    for row in rows {
        w.serialize(row).map_err(io)?;
    }
    w.flush().map_err(|e| CliError::Config(format!("cannot write {}: {e}", path.display())))
}

fn read_csv<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<Vec<T>, CliError> {
    let bad = |e: csv::Error| CliError::Config(format!("{}: {e}", path.display()));
    let mut r = csv::Reader::from_path(path).map_err(bad)?;
    r.deserialize().collect::<Result<Vec<T>, _>>().map_err(bad)
}

pub fn cmd_eval(args: &EvalArgs) -> Result<(), CliError> {
    let criteria = MatchCriteria::from(args.criteria);
    let (evaluation, label, n) = predict(&args.predictor, &args.corpus, args.split, criteria)?;
    let row = EvalRow::new(label, args.split, args.criteria, n, &evaluation.f1);
    println!(
        "{} on {} ({} samples): trigger {} argument {} avg {}",
        row.method, row.split, n, row.trigger_f1, row.argument_f1, row.avg
    );
    let path = args.out.clone().unwrap_or_else(|| {
        default_report_path(&args.predictor, &args.corpus.corpus, &format!("eval_{}.csv", args.split))
    });
    write_csv(&path, &[row])
}

/// One row of `errors_<split>.csv`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorRow {
    pub method: String,
    pub split: Split,
    pub undefined: usize,
    pub mismatch: usize,
    pub parse_error: usize,
}

pub fn cmd_errors(args: &ErrorsArgs) -> Result<(), CliError> {
    let (evaluation, label, _) = predict(&args.predictor, &args.corpus, args.split, MatchCriteria::default())?;
    let ErrorCounts {
        undefined,
        mismatch,
        parse_error,
    } = evaluation.errors;
    println!("{label} on {}: undefined {undefined} mismatch {mismatch} parse_error {parse_error}", args.split);
    let row = ErrorRow {
        method: label,
        split: args.split,
        undefined,
        mismatch,
        parse_error,
    };
    let path = args.out.clone().unwrap_or_else(|| {
        default_report_path(&args.predictor, &args.corpus.corpus, &format!("errors_{}.csv", args.split))
    });
    write_csv(&path, &[row])
}

/// One method's held-in and held-out scores.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonRow {
    pub method: String,
    pub held_in_trigger: f64,
    pub held_in_argument: f64,
    pub held_in_avg: f64,
    pub held_out_trigger: f64,
    pub held_out_argument: f64,
    pub held_out_avg: f64,
}

#[derive(Serialize)]
struct ComparisonCsvRow<'a> {
    method: &'a str,
    held_in_trigger: String,
    held_in_argument: String,
    held_in_avg: String,
    held_out_trigger: String,
    held_out_argument: String,
    held_out_avg: String,
    held_in_trigger_full: f64,
    held_in_argument_full: f64,
    held_in_avg_full: f64,
    held_out_trigger_full: f64,
    held_out_argument_full: f64,
    held_out_avg_full: f64,
}

/// Largest allowed gap between an AVG cell and the mean of its two F1 cells.
pub const AVG_TOLERANCE: f64 = 0.01;

fn read_eval(run: &Path, split: Split) -> Result<EvalRow, CliError> {
    let path = run.join(format!("eval_{split}.csv"));
    let mut rows: Vec<EvalRow> = read_csv(&path)?;
    if rows.len() != 1 {
        return Err(CliError::Config(format!("{}: expected one row, found {}", path.display(), rows.len())));
    }
    let row = rows.remove(0);
    if (row.avg_full - (row.trigger_f1_full + row.argument_f1_full) / 2.0).abs() > AVG_TOLERANCE {
        return Err(CliError::Config(format!("{}: AVG is not the mean of the two F1 scores", path.display())));
    }
    Ok(row)
}

pub fn comparison_rows(runs: &[PathBuf]) -> Result<Vec<ComparisonRow>, CliError> {
    let mut rows = Vec::with_capacity(runs.len());
    for run in runs {
        let manifest_path = run.join(MANIFEST);
        let manifest: ExperimentManifest = serde_json::from_str(&read_to_string(&manifest_path)?)
            .map_err(|e| CliError::Config(format!("{}: {e}", manifest_path.display())))?;
        let held_in = read_eval(run, Split::HeldIn)?;
        let held_out = read_eval(run, Split::HeldOut)?;
        rows.push(ComparisonRow {
            method: manifest.label,
            held_in_trigger: held_in.trigger_f1_full,
            held_in_argument: held_in.argument_f1_full,
            held_in_avg: held_in.avg_full,
            held_out_trigger: held_out.trigger_f1_full,
            held_out_argument: held_out.argument_f1_full,
            held_out_avg: held_out.avg_full,
        });
    }
    rows.sort_by(|a, b| a.method.cmp(&b.method));
    Ok(rows)
}

pub fn render_table(rows: &[ComparisonRow]) -> String {
    let width = rows.iter().map(|r| r.method.len()).max().unwrap_or(0).max("Method".len());
    let mut out = format!(
        "{:width$}  {:>8} {:>8} {:>8}  {:>8} {:>8} {:>8}\n",
        "Method", "In-Trig", "In-Arg", "In-AVG", "Out-Trig", "Out-Arg", "Out-AVG"
    );
    for r in rows {
        out.push_str(&format!(
            "{:width$}  {:>8.2} {:>8.2} {:>8.2}  {:>8.2} {:>8.2} {:>8.2}\n",
            r.method,
            r.held_in_trigger,
            r.held_in_argument,
            r.held_in_avg,
            r.held_out_trigger,
            r.held_out_argument,
            r.held_out_avg
        ));
    }
    out
}

pub fn cmd_compare(args: &CompareArgs) -> Result<(), CliError> {
    let rows = comparison_rows(&args.runs)?;
    print!("{}", render_table(&rows));
    if let Some(path) = &args.out {
        let csv_rows: Vec<ComparisonCsvRow> = rows
            .iter()
            .map(|r| ComparisonCsvRow {
                method: &r.method,
                held_in_trigger: format!("{:.2}", r.held_in_trigger),
                held_in_argument: format!("{:.2}", r.held_in_argument),
                held_in_avg: format!("{:.2}", r.held_in_avg),
                held_out_trigger: format!("{:.2}", r.held_out_trigger),
                held_out_argument: format!("{:.2}", r.held_out_argument),
                held_out_avg: format!("{:.2}", r.held_out_avg),
                held_in_trigger_full: r.held_in_trigger,
                held_in_argument_full: r.held_in_argument,
                held_in_avg_full: r.held_in_avg,
                held_out_trigger_full: r.held_out_trigger,
                held_out_argument_full: r.held_out_argument,
                held_out_avg_full: r.held_out_avg,
            })
            .collect();
        write_csv(path, &csv_rows)?;
    }
    Ok(())
}
