//! Repeated training runs over several splits.

use std::time::Instant;

use haarnet_core::graph::{make_split, Dataset};
use haarnet_core::nn::train::TrainOutcome;
use haarnet_core::nn::{build_model, train_with, PreparedGraph, TrainConfig};
use rayon::prelude::*;

use crate::config::ExperimentConfig;
use crate::report::{EpochRow, SeedRun, Summary};
use crate::{Error, Result};

/// Check that the configuration fits the data before any training starts.
pub fn check_compatible(dataset: &Dataset, data: &[PreparedGraph], cfg: &TrainConfig) -> Result<()> {
    cfg.validate().map_err(|e| Error::Usage(e.to_string()))?;
    build_model(&dataset.task, data, cfg).map_err(|e| Error::Usage(format!("configuration does not fit the archive: {e}")))?;
    Ok(())
}

/// Train one model on the split with seed `split_seed`.
pub fn run_one(dataset: &Dataset, data: &[PreparedGraph], exp: &ExperimentConfig, split_seed: u64) -> Result<(SeedRun, TrainOutcome)> {
    let split = make_split(dataset, split_seed)?;
    let mut cfg = exp.train.clone();
    cfg.seed = exp.run_seed(split_seed);
    let model = build_model(&dataset.task, data, &cfg)?;
    let start = Instant::now();
    let mut last = start;
    let mut epoch_seconds = Vec::new();
    let outcome = train_with(model, dataset.task, data, &split, &cfg, |rec| {
        let now = Instant::now();
        epoch_seconds.push((now - last).as_secs_f64());
        last = now;
        log::debug!(
            "split {split_seed} epoch {}: train loss {:.5}, val loss {:.5}, val metric {:.4}",
            rec.epoch,
            rec.train.loss,
            rec.val.loss,
            rec.val.metric
        );
    })?;
    let best = outcome.best();
    let run = SeedRun {
        split_seed,
        model_seed: cfg.seed,
        best_epoch: outcome.best_epoch,
        stopped_early: outcome.stopped_early,
        best_val_loss: best.val.loss,
        best_val_metric: best.val.metric,
        test_loss: outcome.test.loss,
        test_metric: outcome.test.metric,
        epochs: outcome.history.iter().map(EpochRow::from).collect(),
        epoch_seconds,
        train_seconds: start.elapsed().as_secs_f64(),
    };
    log::info!(
        "split {split_seed}: best epoch {}, test metric {:.4}",
        run.best_epoch,
        run.test_metric
    );
    Ok((run, outcome))
}

/// Train once per split seed, in parallel, keeping seed order.
pub fn run_repeats(
    dataset: &Dataset,
    data: &[PreparedGraph],
    exp: &ExperimentConfig,
) -> Result<(Vec<SeedRun>, Vec<TrainOutcome>, Summary)> {
    check_compatible(dataset, data, &exp.train)?;
    let results = exp
        .split_seeds
        .par_iter()
        .map(|&s| run_one(dataset, data, exp, s))
        .collect::<Result<Vec<_>>>()?;
    let (runs, outcomes): (Vec<_>, Vec<_>) = results.into_iter().unzip();
    let summary = Summary::of(&runs);
    Ok((runs, outcomes, summary))
}
