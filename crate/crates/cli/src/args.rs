use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use sentlin_core::codec::DEFAULT_MAX_NODES;
use sentlin_core::datasets::DatasetKind;
use sentlin_core::strategy::Strategy;

#[derive(Debug, Parser)]
#[command(
    name = "sentlin",
    version,
    about = "Graph linearization codec, n-gram baseline and ordering-robustness metrics"
)]
pub struct Cli {
    /// Worker threads (default: all cores). Never changes results.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a synthetic graph dataset as JSONL.
    GenData(GenDataArgs),
    /// Linearize graphs into token text, K sequences per graph.
    Encode(EncodeArgs),
    /// Decode token text back into graphs.
    Decode(DecodeArgs),
    /// Encode then decode every graph and check for an exact match.
    Roundtrip(RoundtripArgs),
    /// Count (or list) every linearization of small graphs.
    Enumerate(EnumerateArgs),
    /// Train the n-gram baseline on linearizations of a graph set.
    Train(TrainArgs),
    /// Teacher-forced NLL of K linearizations per graph, as NLL CSV.
    Score(ScoreArgs),
    /// Sample sequences under the grammar mask.
    Generate(GenerateArgs),
    /// Evaluation metrics.
    #[command(subcommand)]
    Eval(EvalCommand),
    /// Training-set-size by strategy grid of VUN and corpus diversity.
    Sweep(SweepArgs),
    /// Validate an NLL CSV and summarize it per graph.
    IngestNll(IngestNllArgs),
}

#[derive(Debug, Subcommand)]
pub enum EvalCommand {
    /// Per-graph linearization uncertainty.
    Lu(LuArgs),
    /// Expected calibration error, overall and per token type.
    Ece(EceArgs),
    /// Train-strategy by eval-strategy grid of NLL/token, LU and ECE.
    Cross(CrossArgs),
    /// Generation NLL versus NLL of re-linearized generations.
    SelfAssess(SelfAssessArgs),
    /// Stability AUC of LU computed from the first K of 32 draws.
    KSweep(KSweepArgs),
    /// Stability AUC of LU, generation NLL and mean NLL.
    StabilityAuc(StabilityAucArgs),
    /// Sequence length, chord and trail statistics per strategy.
    Length(LengthArgs),
    /// Distinct-sequence ratio of a multi-epoch training corpus.
    Diversity(DiversityArgs),
    /// Validity, uniqueness and novelty of generated graphs.
    Vun(VunArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, serde::Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Validity {
    /// Planar (and non-empty).
    Planar,
    /// Every atom satisfies its valency.
    Stable,
    /// Any decodable graph.
    Any,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, serde::Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScorerKind {
    /// The n-gram model given by --model.
    Ngram,
    /// Uniform over the input graphs and their linearizations.
    Oracle,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, serde::Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ConventionArg {
    Unmasked,
    Masked,
}

#[derive(Debug, Args)]
pub struct OutputArgs {
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Output file (default: standard output).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args, serde::Serialize)]
pub struct ModelArgs {
    /// n-gram order.
    #[arg(long, default_value_t = 4)]
    pub order: usize,
    /// Add-k smoothing of the unigram level.
    #[arg(long, default_value_t = 0.1)]
    pub smoothing: f64,
    /// Backoff weight for unseen successors.
    #[arg(long, default_value_t = 0.4)]
    pub backoff: f64,
    /// Fresh linearizations per training graph.
    #[arg(long, default_value_t = 4)]
    pub epochs: usize,
}

fn strategy_parser(s: &str) -> Result<Strategy, String> {
    s.parse().map_err(|e: sentlin_core::strategy::StrategyError| e.to_string())
}

fn kind_parser(s: &str) -> Result<DatasetKind, String> {
    s.parse().map_err(|e: sentlin_core::datasets::DatasetError| e.to_string())
}

#[derive(Debug, Args)]
pub struct GenDataArgs {
    /// erdos-renyi, delaunay-planar, toy-molecules, random-molecules or stability-pool.
    #[arg(long, value_parser = kind_parser)]
    pub kind: DatasetKind,
    #[arg(long, default_value_t = 100)]
    pub n_graphs: usize,
    /// Smallest node count (heavy atoms for molecules; default depends on --kind).
    #[arg(long)]
    pub min_nodes: Option<usize>,
    /// Largest node count (heavy atoms for molecules; default depends on --kind).
    #[arg(long)]
    pub max_nodes: Option<usize>,
    /// Erdos-Renyi edge probability.
    #[arg(long, default_value_t = 0.3)]
    pub edge_prob: f64,
    /// Allow disconnected Erdos-Renyi graphs.
    #[arg(long)]
    pub allow_disconnected: bool,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Output JSONL.
    #[arg(long)]
    pub out: PathBuf,
    /// Also write per-graph stability tags (molecule kinds) as CSV.
    #[arg(long)]
    pub tags_out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct EncodeArgs {
    /// Graph JSONL.
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long, value_parser = strategy_parser, default_value = "random")]
    pub strategy: Strategy,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Linearizations per graph.
    #[arg(long, default_value_t = 1)]
    pub k: usize,
    #[arg(long, default_value_t = DEFAULT_MAX_NODES)]
    pub max_nodes: usize,
    /// Token text output, one sequence per line (default: standard output).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct DecodeArgs {
    /// Token text, one sequence per line.
    #[arg(long = "in")]
    pub input: PathBuf,
    /// Graph JSONL output (default: standard output).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct RoundtripArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long, value_parser = strategy_parser, default_value = "random")]
    pub strategy: Strategy,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 1)]
    pub k: usize,
    #[arg(long, default_value_t = DEFAULT_MAX_NODES)]
    pub max_nodes: usize,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct EnumerateArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
    /// Give up on a graph with more linearizations than this.
    #[arg(long, default_value_t = 100_000)]
    pub limit: usize,
    /// Include every sequence in the output.
    #[arg(long)]
    pub list: bool,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct TrainArgs {
    /// Training graph JSONL.
    #[arg(long)]
    pub train: PathBuf,
    #[arg(long, value_parser = strategy_parser, default_value = "random")]
    pub strategy: Strategy,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = DEFAULT_MAX_NODES)]
    pub max_nodes: usize,
    #[command(flatten)]
    pub model: ModelArgs,
    /// Model JSON output.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct ScoreArgs {
    /// Model JSON (required for --scorer ngram).
    #[arg(long)]
    pub model: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = ScorerKind::Ngram)]
    pub scorer: ScorerKind,
    /// Graph JSONL to linearize and score.
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long, value_parser = strategy_parser, default_value = "random")]
    pub strategy: Strategy,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 32)]
    pub k: usize,
    #[arg(long, value_enum, default_value_t = ConventionArg::Unmasked)]
    pub convention: ConventionArg,
    /// Output NLL CSV (default: standard output).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct GenerateArgs {
    #[arg(long)]
    pub model: PathBuf,
    #[arg(long, default_value_t = 100)]
    pub n_gen: usize,
    #[arg(long, default_value_t = 1.0)]
    pub temperature: f64,
    #[arg(long, default_value_t = 512)]
    pub max_len: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Also write the decoded graphs as JSONL.
    #[arg(long)]
    pub graphs_out: Option<PathBuf>,
    #[command(flatten)]
    pub output: OutputArgs,
}

/// Where per-linearization NLLs come from: a CSV file, or a model applied to
/// linearizations of a graph file.
#[derive(Debug, Args)]
pub struct NllSource {
    /// NLL CSV (graph_id, perm_index, strategy, nll, n_tokens).
    #[arg(long)]
    pub nll_file: Option<PathBuf>,
    #[arg(long)]
    pub model: Option<PathBuf>,
    /// Graph JSONL.
    #[arg(long = "in")]
    pub input: Option<PathBuf>,
    #[arg(long, value_parser = strategy_parser, default_value = "random")]
    pub strategy: Strategy,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct LuArgs {
    #[command(flatten)]
    pub source: NllSource,
    #[arg(long, default_value_t = 32)]
    pub k: usize,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct EceArgs {
    #[arg(long)]
    pub model: PathBuf,
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long, value_parser = strategy_parser, default_value = "random")]
    pub strategy: Strategy,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 8)]
    pub k: usize,
    #[arg(long, default_value_t = 15)]
    pub bins: usize,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct CrossArgs {
    /// Comma-separated model files; rows are named by each model's strategy.
    #[arg(long, value_delimiter = ',', required = true)]
    pub models: Vec<PathBuf>,
    /// Test graph JSONL.
    #[arg(long)]
    pub test: PathBuf,
    /// Evaluation strategies.
    #[arg(long, value_delimiter = ',', value_parser = strategy_parser, default_value = "random,min-degree,max-degree,anchor")]
    pub strategy: Vec<Strategy>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 8)]
    pub k: usize,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct SelfAssessArgs {
    #[arg(long)]
    pub model: PathBuf,
    /// Re-linearization strategy.
    #[arg(long, value_parser = strategy_parser, default_value = "random")]
    pub strategy: Strategy,
    #[arg(long, default_value_t = 100)]
    pub n_gen: usize,
    #[arg(long, default_value_t = 32)]
    pub k: usize,
    #[arg(long, default_value_t = 1.0)]
    pub temperature: f64,
    #[arg(long, default_value_t = 512)]
    pub max_len: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct KSweepArgs {
    #[command(flatten)]
    pub source: NllSource,
    /// Stability tags CSV (graph_id, stable); default: valency check of --in.
    #[arg(long)]
    pub tags: Option<PathBuf>,
    #[arg(long, value_delimiter = ',', default_value = "2,4,8,16,32")]
    pub ks: Vec<usize>,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct StabilityAucArgs {
    #[arg(long)]
    pub model: PathBuf,
    /// Molecule graph JSONL; labels come from the valency check.
    #[arg(long = "in")]
    pub input: PathBuf,
    /// Strategy of the single trajectory scored as the generation.
    #[arg(long, value_parser = strategy_parser)]
    pub strategy: Option<Strategy>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 32)]
    pub k: usize,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct LengthArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long, value_delimiter = ',', value_parser = strategy_parser, default_value = "random,min-degree,max-degree,anchor")]
    pub strategy: Vec<Strategy>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 8)]
    pub k: usize,
    #[arg(long, default_value_t = DEFAULT_MAX_NODES)]
    pub max_nodes: usize,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct DiversityArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long, value_delimiter = ',', value_parser = strategy_parser, default_value = "random,min-degree,max-degree,anchor")]
    pub strategy: Vec<Strategy>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 8)]
    pub epochs: usize,
    #[arg(long, default_value_t = DEFAULT_MAX_NODES)]
    pub max_nodes: usize,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct VunArgs {
    /// Generated graph JSONL.
    #[arg(long = "in")]
    pub input: PathBuf,
    /// Training graph JSONL for novelty.
    #[arg(long)]
    pub train: PathBuf,
    #[arg(long, value_enum, default_value_t = Validity::Any)]
    pub validity: Validity,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    /// Training graph pool; the first N graphs form each training set.
    #[arg(long)]
    pub train: PathBuf,
    /// Held-out graphs for NLL/token (optional).
    #[arg(long)]
    pub test: Option<PathBuf>,
    #[arg(long, value_delimiter = ',', default_value = "32,128,512")]
    pub train_sizes: Vec<usize>,
    #[arg(long, value_delimiter = ',', value_parser = strategy_parser, default_value = "random,min-degree,max-degree,anchor")]
    pub strategy: Vec<Strategy>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 100)]
    pub n_gen: usize,
    #[arg(long, default_value_t = 1.0)]
    pub temperature: f64,
    #[arg(long, default_value_t = 512)]
    pub max_len: usize,
    #[arg(long, default_value_t = DEFAULT_MAX_NODES)]
    pub max_nodes: usize,
    #[arg(long, value_enum, default_value_t = Validity::Any)]
    pub validity: Validity,
    #[command(flatten)]
    pub model: ModelArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct IngestNllArgs {
    #[arg(long)]
    pub nll_file: PathBuf,
    #[command(flatten)]
    pub output: OutputArgs,
}
