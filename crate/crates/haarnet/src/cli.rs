//! Command-line definitions.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "haarnet", version, about = "Haar-wavelet graph convolution and pooling")]
pub struct Cli {
    #[command(flatten)]
    pub common: Common,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct Common {
    /// Master seed of the command.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Output file (or directory for gen-pointpattern).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// `key = value` configuration file, applied before flags.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Only log warnings and errors.
    #[arg(long, short, global = true)]
    pub quiet: bool,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build chains and Haar bases for a dataset and store them in an archive.
    Prepare(PrepareArgs),
    /// Train on an archive over one or more random splits.
    Train(TrainArgs),
    /// Grid search over training hyperparameters.
    Sweep(SweepArgs),
    /// Apply a Haar transform of one archived graph to a signal.
    Transform(TransformArgs),
    /// Time the matrix and chain routes of the adjoint transform.
    Bench(BenchArgs),
    /// Generate a PPP / RSA / hard-disk point-pattern dataset.
    GenPointpattern(PointArgs),
}

#[derive(Debug, Args)]
pub struct ChainFlags {
    /// Coarsening steps.
    #[arg(long)]
    pub levels: Option<usize>,
    /// Fraction of nodes kept per step.
    #[arg(long)]
    pub ratio: Option<f64>,
    /// Collapse the last step to one node.
    #[arg(long)]
    pub collapse_last: Option<bool>,
    /// auto, spectral or heavy-edge.
    #[arg(long)]
    pub cluster_method: Option<String>,
    /// Node count from which `auto` switches to heavy-edge matching.
    #[arg(long)]
    pub auto_threshold: Option<usize>,
}

#[derive(Debug, Args)]
pub struct PrepareArgs {
    /// Directory holding TU files `<name>_A.txt`, `<name>_graph_indicator.txt`, ...
    #[arg(long, conflicts_with = "weighted")]
    pub tu: Option<PathBuf>,
    /// Dataset name (TU file prefix); defaults to the directory name.
    #[arg(long)]
    pub name: Option<String>,
    /// Weighted-graph matrix file (`N d` blocks of adjacency and features).
    #[arg(long, requires = "targets")]
    pub weighted: Option<PathBuf>,
    /// Regression targets of the weighted graphs, one line per graph.
    #[arg(long)]
    pub targets: Option<PathBuf>,
    #[command(flatten)]
    pub chain: ChainFlags,
    /// Also write a JSON export of the archive.
    #[arg(long)]
    pub json: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct TrainFlags {
    #[arg(long)]
    pub learning_rate: Option<f64>,
    #[arg(long)]
    pub weight_decay: Option<f64>,
    #[arg(long)]
    pub batch_size: Option<usize>,
    #[arg(long)]
    pub hidden_size: Option<usize>,
    #[arg(long)]
    pub num_poolings: Option<usize>,
    #[arg(long)]
    pub max_epochs: Option<usize>,
    #[arg(long)]
    pub patience: Option<usize>,
    #[arg(long)]
    pub convs_per_block: Option<usize>,
    #[arg(long)]
    pub mlp_layers: Option<usize>,
    #[arg(long)]
    pub batch_norm: Option<bool>,
    #[arg(long)]
    pub dropout: Option<f64>,
    /// Apply weight decay to the spectral filters too.
    #[arg(long)]
    pub decay_filters: Option<bool>,
    /// Train on split seeds `0..repeats`.
    #[arg(long, conflicts_with = "split_seeds")]
    pub repeats: Option<u64>,
    /// Comma-separated split seeds.
    #[arg(long)]
    pub split_seeds: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Table,
    Json,
}

#[derive(Debug, Args)]
pub struct TrainArgs {
    /// Archive written by `prepare`.
    #[arg(long)]
    pub archive: PathBuf,
    #[command(flatten)]
    pub train: TrainFlags,
    /// Save the model of the split with the best validation metric.
    #[arg(long)]
    pub checkpoint: Option<PathBuf>,
    /// Standard-output format when no `--out` is given.
    #[arg(long, value_enum, default_value_t = Format::Table)]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[arg(long)]
    pub archive: PathBuf,
    /// Grid file; the standard 960-point grid when omitted.
    #[arg(long)]
    pub grid: Option<PathBuf>,
    /// Evaluate a seeded random subset of this many grid points.
    #[arg(long)]
    pub budget: Option<usize>,
    #[command(flatten)]
    pub train: TrainFlags,
    #[arg(long, value_enum, default_value_t = Format::Table)]
    pub format: Format,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Direction {
    /// Coefficients `Φᵀx`.
    Adjoint,
    /// Reconstruction `Φc`.
    Forward,
    /// Compressive transform `Φ̃ᵀx` onto the next coarser level.
    Pool,
}

#[derive(Debug, Args)]
pub struct TransformArgs {
    #[arg(long)]
    pub archive: PathBuf,
    #[arg(long)]
    pub graph_id: usize,
    /// Matrix file (`rows cols` header); the graph's features when omitted.
    #[arg(long)]
    pub signal: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub direction: Direction,
    /// Chain level of the signal (default: finest).
    #[arg(long)]
    pub level: Option<usize>,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    /// Archive to benchmark; synthetic balanced chains when omitted.
    #[arg(long)]
    pub archive: Option<PathBuf>,
    #[arg(long, default_value_t = 20)]
    pub repetitions: usize,
    /// Children per parent of the synthetic chains.
    #[arg(long, default_value_t = 4)]
    pub branching: usize,
    /// Comma-separated depths of the synthetic chains.
    #[arg(long, default_value = "3,4,5,6")]
    pub depths: String,
    /// Signal columns of the synthetic chains.
    #[arg(long, default_value_t = 1)]
    pub features: usize,
}

#[derive(Debug, Args)]
pub struct PointArgs {
    /// Full-scale defaults: 5000 graphs per class with 100 to 1000 points.
    #[arg(long)]
    pub full: bool,
    /// Graphs per class (default 100).
    #[arg(long)]
    pub per_class: Option<usize>,
    /// Smallest point count (default 50).
    #[arg(long)]
    pub min_points: Option<usize>,
    /// Largest point count (default 150).
    #[arg(long)]
    pub max_points: Option<usize>,
    #[arg(long, default_value_t = 0.3)]
    pub phi_rsa: f64,
    #[arg(long, default_value_t = 0.5)]
    pub phi_hd: f64,
    /// Metropolis sweeps per hard-disk pattern.
    #[arg(long)]
    pub hd_sweeps: Option<usize>,
    /// Edge threshold in units of the disk radius.
    #[arg(long)]
    pub threshold_multiplier: Option<f64>,
    /// periodic or open.
    #[arg(long, default_value = "periodic")]
    pub disk_boundary: String,
    /// periodic or open.
    #[arg(long, default_value = "open")]
    pub graph_boundary: String,
    /// Store the point coordinates in the JSON sidecar.
    #[arg(long)]
    pub keep_points: bool,
}
