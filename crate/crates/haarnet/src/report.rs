//! Machine-readable run and sweep reports, plus their text tables.
//!
//! The JSON layouts are described by `schema/run_report.schema.json` and
//! `schema/sweep_report.schema.json`.

use std::fmt::Write as _;

use haarnet_core::chain::ChainParams;
use haarnet_core::graph::Task;
use haarnet_core::nn::train::EpochRecord;
use haarnet_core::nn::TrainConfig;
use serde::{Deserialize, Serialize};

use crate::archive::method_name;

pub const REPORT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainSettings {
    pub learning_rate: f64,
    pub weight_decay: f64,
    pub batch_size: usize,
    pub hidden_size: usize,
    pub num_poolings: usize,
    pub max_epochs: usize,
    pub patience: usize,
    pub seed: u64,
    pub convs_per_block: usize,
    pub mlp_layers: usize,
    pub batch_norm: bool,
    pub dropout: f64,
    pub decay_filters: bool,
}

impl From<&TrainConfig> for TrainSettings {
    fn from(c: &TrainConfig) -> Self {
        TrainSettings {
            learning_rate: c.learning_rate,
            weight_decay: c.weight_decay,
            batch_size: c.batch_size,
            hidden_size: c.hidden_size,
            num_poolings: c.num_poolings,
            max_epochs: c.max_epochs,
            patience: c.patience,
            seed: c.seed,
            convs_per_block: c.convs_per_block,
            mlp_layers: c.mlp_layers,
            batch_norm: c.batch_norm,
            dropout: c.dropout,
            decay_filters: c.decay_filters,
        }
    }
}

impl From<&TrainSettings> for TrainConfig {
    fn from(s: &TrainSettings) -> Self {
        TrainConfig {
            learning_rate: s.learning_rate,
            weight_decay: s.weight_decay,
            batch_size: s.batch_size,
            hidden_size: s.hidden_size,
            num_poolings: s.num_poolings,
            max_epochs: s.max_epochs,
            patience: s.patience,
            seed: s.seed,
            convs_per_block: s.convs_per_block,
            mlp_layers: s.mlp_layers,
            batch_norm: s.batch_norm,
            dropout: s.dropout,
            decay_filters: s.decay_filters,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChainSettings {
    pub levels: usize,
    pub ratio: f64,
    pub collapse_last: bool,
    pub seed: u64,
    pub cluster_method: String,
}

impl From<&ChainParams> for ChainSettings {
    fn from(p: &ChainParams) -> Self {
        ChainSettings {
            levels: p.num_levels,
            ratio: p.ratio,
            collapse_last: p.collapse_last,
            seed: p.seed,
            cluster_method: method_name(p.method),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EpochRow {
    pub epoch: usize,
    pub train_loss: f64,
    pub train_metric: f64,
    pub val_loss: f64,
    pub val_metric: f64,
}

impl From<&EpochRecord> for EpochRow {
    fn from(r: &EpochRecord) -> Self {
        EpochRow {
            epoch: r.epoch,
            train_loss: r.train.loss,
            train_metric: r.train.metric,
            val_loss: r.val.loss,
            val_metric: r.val.metric,
        }
    }
}

/// One training run on one split.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeedRun {
    pub split_seed: u64,
    pub model_seed: u64,
    pub best_epoch: usize,
    pub stopped_early: bool,
    pub best_val_loss: f64,
    pub best_val_metric: f64,
    pub test_loss: f64,
    pub test_metric: f64,
    pub epochs: Vec<EpochRow>,
    /// Wall-clock seconds of each training epoch (epoch 0 is evaluation only).
    pub epoch_seconds: Vec<f64>,
    pub train_seconds: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Stat {
    pub mean: f64,
    /// Unbiased standard deviation; absent for a single repeat.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub std: Option<f64>,
}

impl Stat {
    pub fn of(values: &[f64]) -> Stat {
        let n = values.len();
        let mean = values.iter().sum::<f64>() / n as f64;
        let std = (n >= 2).then(|| {
            let ss: f64 = values.iter().map(|v| (v - mean).powi(2)).sum();
            (ss / (n - 1) as f64).sqrt()
        });
        Stat { mean, std }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub repeats: usize,
    pub test_metric: Stat,
    pub test_loss: Stat,
    pub best_val_metric: Stat,
}

impl Summary {
    pub fn of(runs: &[SeedRun]) -> Summary {
        let col = |f: fn(&SeedRun) -> f64| runs.iter().map(f).collect::<Vec<_>>();
        Summary {
            repeats: runs.len(),
            test_metric: Stat::of(&col(|r| r.test_metric)),
            test_loss: Stat::of(&col(|r| r.test_loss)),
            best_val_metric: Stat::of(&col(|r| r.best_val_metric)),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Timings {
    /// Loading the archive (with the orthonormality re-check) and padding.
    pub preprocessing_seconds: f64,
    /// One fast adjoint transform of every graph's features.
    pub transform_seconds: f64,
    pub training_seconds: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub format_version: u32,
    pub dataset: String,
    pub num_graphs: usize,
    /// `classification` or `regression`.
    pub task: String,
    pub output_dim: usize,
    /// `accuracy` (higher is better) or `mae` (lower is better).
    pub metric: String,
    pub config: TrainSettings,
    pub chain: ChainSettings,
    pub runs: Vec<SeedRun>,
    pub summary: Summary,
    pub timings: Timings,
}

pub fn task_names(task: Task) -> (&'static str, &'static str) {
    match task {
        Task::Classification { .. } => ("classification", "accuracy"),
        Task::Regression { .. } => ("regression", "mae"),
    }
}

fn fmt_stat(s: &Stat) -> String {
    match s.std {
        Some(sd) => format!("{:.4} ± {:.4}", s.mean, sd),
        None => format!("{:.4}", s.mean),
    }
}

impl RunReport {
    pub fn table(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(
            s,
            "{} ({} graphs, {}), metric {}",
            self.dataset, self.num_graphs, self.task, self.metric
        );
        let _ = writeln!(
            s,
            "{:>10} {:>10} {:>6} {:>12} {:>12} {:>12} {:>9}",
            "split", "model", "best", "val", "test", "test loss", "seconds"
        );
        for r in &self.runs {
            let _ = writeln!(
                s,
                "{:>10} {:>10} {:>6} {:>12.4} {:>12.4} {:>12.4} {:>9.2}",
                r.split_seed, r.model_seed, r.best_epoch, r.best_val_metric, r.test_metric, r.test_loss, r.train_seconds
            );
        }
        let _ = writeln!(s, "test {}: {}", self.metric, fmt_stat(&self.summary.test_metric));
        let _ = writeln!(s, "test loss: {}", fmt_stat(&self.summary.test_loss));
        s
    }
}

/// One configuration of a sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepEntry {
    /// Position in the full grid enumeration.
    pub index: usize,
    pub learning_rate: f64,
    pub hidden_size: usize,
    pub weight_decay: f64,
    pub batch_size: usize,
    pub num_poolings: usize,
    /// `None` when the configuration could not run.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub val_metric: Option<Stat>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub test_metric: Option<Stat>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub skipped: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    pub format_version: u32,
    pub dataset: String,
    pub metric: String,
    pub grid_size: usize,
    pub evaluated: usize,
    pub split_seeds: Vec<u64>,
    pub entries: Vec<SweepEntry>,
    /// Grid index of the selected configuration.
    pub best_index: usize,
    pub best_config: TrainSettings,
}

impl SweepReport {
    pub fn table(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(
            s,
            "{}: {} of {} configurations, selected by mean validation {}",
            self.dataset, self.evaluated, self.grid_size, self.metric
        );
        let _ = writeln!(
            s,
            "{:>5} {:>8} {:>6} {:>8} {:>6} {:>5} {:>18}",
            "index", "lr", "hidden", "wd", "batch", "pool", "val"
        );
        for e in &self.entries {
            let val = match (&e.val_metric, &e.skipped) {
                (Some(v), _) => fmt_stat(v),
                (None, Some(why)) => format!("skipped: {why}"),
                (None, None) => "-".into(),
            };
            let mark = if e.index == self.best_index { " *" } else { "" };
            let _ = writeln!(
                s,
                "{:>5} {:>8} {:>6} {:>8} {:>6} {:>5} {:>18}{mark}",
                e.index, e.learning_rate, e.hidden_size, e.weight_decay, e.batch_size, e.num_poolings, val
            );
        }
        s
    }
}
