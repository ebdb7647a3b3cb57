//! Hyperparameter grid search.
//!
//! Combinations are enumerated with the learning rate varying slowest and
//! the number of poolings fastest. Grid files use the config syntax with
//! comma-separated value lists:
//!
//! ```text
//! learning_rate = 0.01, 0.001
//! hidden_size   = 32, 64
//! weight_decay  = 0.0005
//! batch_size    = 32
//! num_poolings  = 1
//! ```
//!
//! Keys left out keep the single value of the base training configuration.

use std::path::Path;
use std::str::FromStr;

use haarnet_core::graph::{Dataset, Task};
use haarnet_core::nn::{PreparedGraph, TrainConfig};
use rand::seq::index::sample;
use rayon::prelude::*;

use crate::config::ExperimentConfig;
use crate::experiment::{check_compatible, run_one};
use crate::report::{task_names, Stat, SweepEntry, SweepReport, TrainSettings, REPORT_VERSION};
use crate::text::{fields, TextFile};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    pub learning_rate: Vec<f64>,
    pub hidden_size: Vec<usize>,
    pub weight_decay: Vec<f64>,
    pub batch_size: Vec<usize>,
    pub num_poolings: Vec<usize>,
}

/// One point of a grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Combination {
    pub index: usize,
    pub learning_rate: f64,
    pub hidden_size: usize,
    pub weight_decay: f64,
    pub batch_size: usize,
    pub num_poolings: usize,
}

impl Combination {
    pub fn apply(&self, base: &TrainConfig) -> TrainConfig {
        TrainConfig {
            learning_rate: self.learning_rate,
            hidden_size: self.hidden_size,
            weight_decay: self.weight_decay,
            batch_size: self.batch_size,
            num_poolings: self.num_poolings,
            ..base.clone()
        }
    }
}

fn list<T: FromStr>(key: &str, v: &str) -> std::result::Result<Vec<T>, String> {
    let out = fields(v)
        .map(|t| t.parse().map_err(|_| format!("invalid value `{t}` for {key}")))
        .collect::<std::result::Result<Vec<T>, _>>()?;
    if out.is_empty() {
        return Err(format!("{key} lists no values"));
    }
    Ok(out)
}

impl Grid {
    /// The standard search space: 5 learning rates, 4 hidden sizes,
    /// 4 weight decays, 4 batch sizes and 3 pooling depths.
    pub fn table() -> Grid {
        Grid {
            learning_rate: vec![1e-2, 5e-3, 1e-3, 5e-4, 1e-4],
            hidden_size: vec![16, 32, 64, 128],
            weight_decay: vec![5e-3, 1e-3, 5e-4, 1e-4],
            batch_size: vec![32, 64, 128, 256],
            num_poolings: vec![1, 2, 3],
        }
    }

    /// A one-point grid at the base configuration.
    pub fn single(base: &TrainConfig) -> Grid {
        Grid {
            learning_rate: vec![base.learning_rate],
            hidden_size: vec![base.hidden_size],
            weight_decay: vec![base.weight_decay],
            batch_size: vec![base.batch_size],
            num_poolings: vec![base.num_poolings],
        }
    }

    pub fn from_file(path: &Path, base: &TrainConfig) -> Result<Grid> {
        let file = TextFile::read(path)?;
        let mut grid = Grid::single(base);
        for (n, line) in file.lines() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let usage = |m: String| Error::Usage(format!("{}:{n}: {m}", path.display()));
            let Some((k, v)) = line.split_once('=') else {
                return Err(usage("expected `key = v1, v2, ...`".into()));
            };
            let (k, v) = (k.trim(), v.trim());
            match k {
                "learning_rate" => grid.learning_rate = list(k, v).map_err(usage)?,
                "hidden_size" => grid.hidden_size = list(k, v).map_err(usage)?,
                "weight_decay" => grid.weight_decay = list(k, v).map_err(usage)?,
                "batch_size" => grid.batch_size = list(k, v).map_err(usage)?,
                "num_poolings" => grid.num_poolings = list(k, v).map_err(usage)?,
                _ => return Err(usage(format!("unknown grid key `{k}`"))),
            }
        }
        Ok(grid)
    }

    pub fn len(&self) -> usize {
        self.learning_rate.len()
            * self.hidden_size.len()
            * self.weight_decay.len()
            * self.batch_size.len()
            * self.num_poolings.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn get(&self, index: usize) -> Option<Combination> {
        if index >= self.len() {
            return None;
        }
        let mut rest = index;
        let mut take = |n: usize| {
            let k = rest % n;
            rest /= n;
            k
        };
        let p = take(self.num_poolings.len());
        let b = take(self.batch_size.len());
        let w = take(self.weight_decay.len());
        let h = take(self.hidden_size.len());
        let l = take(self.learning_rate.len());
        Some(Combination {
            index,
            learning_rate: self.learning_rate[l],
            hidden_size: self.hidden_size[h],
            weight_decay: self.weight_decay[w],
            batch_size: self.batch_size[b],
            num_poolings: self.num_poolings[p],
        })
    }

    pub fn combinations(&self) -> Vec<Combination> {
        (0..self.len()).filter_map(|i| self.get(i)).collect()
    }

    /// Grid indices to evaluate: everything, or a seeded subsample of
    /// `budget` indices in ascending order.
    pub fn select(&self, budget: Option<usize>, seed: u64) -> Result<Vec<usize>> {
        let n = self.len();
        if n == 0 {
            return Err(Error::Usage("the hyperparameter grid is empty".into()));
        }
        match budget {
            Some(0) => Err(Error::Usage("sweep budget must be at least 1".into())),
            Some(b) if b < n => {
                let mut idx = sample(&mut haarnet_core::rng_from_seed(seed), n, b).into_vec();
                idx.sort_unstable();
                Ok(idx)
            }
            _ => Ok((0..n).collect()),
        }
    }
}

/// `true` when `a` is a strictly better validation metric than `b`.
pub fn better(task: Task, a: f64, b: f64) -> bool {
    match task {
        Task::Classification { .. } => a > b,
        Task::Regression { .. } => a < b,
    }
}

/// Evaluate the selected grid points (in parallel, results in index order)
/// and pick the best mean validation metric; ties go to the lower index.
pub fn run_sweep(
    dataset: &Dataset,
    data: &[PreparedGraph],
    exp: &ExperimentConfig,
    grid: &Grid,
    budget: Option<usize>,
    seed: u64,
) -> Result<SweepReport> {
    let indices = grid.select(budget, seed)?;
    let entries = indices
        .par_iter()
        .map(|&i| {
            let combo = grid.get(i).expect("selected index is in range");
            let mut cfg = exp.clone();
            cfg.train = combo.apply(&exp.train);
            let mut entry = SweepEntry {
                index: i,
                learning_rate: combo.learning_rate,
                hidden_size: combo.hidden_size,
                weight_decay: combo.weight_decay,
                batch_size: combo.batch_size,
                num_poolings: combo.num_poolings,
                val_metric: None,
                test_metric: None,
                skipped: None,
            };
            if let Err(e) = check_compatible(dataset, data, &cfg.train) {
                log::info!("configuration {i} skipped: {e}");
                entry.skipped = Some(e.to_string());
                return Ok(entry);
            }
            let runs = cfg
                .split_seeds
                .iter()
                .map(|&s| run_one(dataset, data, &cfg, s).map(|(r, _)| r))
                .collect::<Result<Vec<_>>>()?;
            let val: Vec<f64> = runs.iter().map(|r| r.best_val_metric).collect();
            let test: Vec<f64> = runs.iter().map(|r| r.test_metric).collect();
            entry.val_metric = Some(Stat::of(&val));
            entry.test_metric = Some(Stat::of(&test));
            log::info!("configuration {i}: mean val metric {:.4}", entry.val_metric.unwrap().mean);
            Ok(entry)
        })
        .collect::<Result<Vec<_>>>()?;

    let mut best: Option<(usize, f64)> = None;
    for e in &entries {
        if let Some(v) = e.val_metric {
            if best.is_none_or(|(_, b)| better(dataset.task, v.mean, b)) {
                best = Some((e.index, v.mean));
            }
        }
    }
    let Some((best_index, _)) = best else {
        return Err(Error::Usage("no configuration of the grid fits the archive".into()));
    };
    let best_config = grid.get(best_index).unwrap().apply(&exp.train);
    Ok(SweepReport {
        format_version: REPORT_VERSION,
        dataset: dataset.name.clone(),
        metric: task_names(dataset.task).1.into(),
        grid_size: grid.len(),
        evaluated: entries.iter().filter(|e| e.val_metric.is_some()).count(),
        split_seeds: exp.split_seeds.clone(),
        entries,
        best_index,
        best_config: TrainSettings::from(&best_config),
    })
}
