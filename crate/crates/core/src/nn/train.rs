//! Mini-batch training with Adam and early stopping on validation loss.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)] // inherent float methods win whenever std is linked
use num_traits::Float;

use rand::seq::SliceRandom;

use crate::basis::{pad_basis, HaarBasis};
use crate::dense::Matrix;
use crate::graph::{Dataset, Label, Split, Task};
use crate::nn::adam::Adam;
use crate::nn::model::{GraphInput, HaarNet, Mode, ModelSpec, ParamKind};
use crate::nn::tape::{self, Tape};
use crate::{Error, Result};

/// A graph with its padded bases and label, ready for training.
#[derive(Debug, Clone, PartialEq)]
pub struct PreparedGraph {
    pub graph_id: usize,
    pub input: GraphInput,
    pub label: Label,
}

/// Largest node count at each chain level over a collection of graphs,
/// coarsest level first.
pub fn level_maxima(bases: &[Vec<HaarBasis>]) -> Result<Vec<usize>> {
    let depth = bases.first().map_or(0, Vec::len);
    if bases.iter().any(|b| b.len() != depth) {
        return Err(Error::InvalidArgument("chains of different depth cannot share a model".into()));
    }
    Ok((0..depth)
        .map(|j| bases.iter().map(|b| b[j].size()).max().unwrap_or(0))
        .collect())
}

/// Pair every labelled graph with its bases padded to the dataset-wide
/// level maxima. `bases[i]` belongs to `dataset.graphs()[i]`.
pub fn prepare_graphs(dataset: &Dataset, bases: &[Vec<HaarBasis>]) -> Result<Vec<PreparedGraph>> {
    if bases.len() != dataset.len() {
        return Err(Error::InvalidArgument(format!(
            "{} basis sets for {} graphs",
            bases.len(),
            dataset.len()
        )));
    }
    let maxima = level_maxima(bases)?;
    dataset
        .graphs()
        .iter()
        .zip(bases)
        .map(|(g, b)| {
            let label = g.label.clone().ok_or_else(|| {
                Error::InvalidArgument(format!("graph {} has no label", g.graph_id))
            })?;
            if b.last().map(HaarBasis::size) != Some(g.num_nodes()) {
                return Err(Error::InvalidArgument(format!(
                    "graph {}: finest basis does not match {} nodes",
                    g.graph_id,
                    g.num_nodes()
                )));
            }
            let padded = b
                .iter()
                .zip(&maxima)
                .map(|(basis, &m)| pad_basis(basis, m))
                .collect::<Result<Vec<_>>>()?;
            Ok(PreparedGraph {
                graph_id: g.graph_id,
                input: GraphInput {
                    features: g.features().clone(),
                    bases: padded,
                },
                label,
            })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainConfig {
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
    /// Also apply weight decay to the spectral filters.
    pub decay_filters: bool,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            learning_rate: 0.001,
            weight_decay: 0.0005,
            batch_size: 32,
            hidden_size: 64,
            num_poolings: 1,
            max_epochs: 150,
            patience: 25,
            seed: 0,
            convs_per_block: 2,
            mlp_layers: 3,
            batch_norm: false,
            dropout: 0.0,
            decay_filters: false,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidArgument(m.into()));
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return bad("learning_rate must be positive");
        }
        if !(self.weight_decay >= 0.0 && self.weight_decay.is_finite()) {
            return bad("weight_decay must be non-negative");
        }
        if self.batch_size == 0 {
            return bad("batch_size must be at least 1");
        }
        if self.patience == 0 {
            return bad("patience must be at least 1");
        }
        if self.num_poolings == 0 {
            return bad("num_poolings must be at least 1");
        }
        Ok(())
    }

    /// Model architecture for data with the given task and level maxima
    /// (coarsest first).
    pub fn model_spec(&self, task: &Task, input_dim: usize, maxima: &[usize]) -> Result<ModelSpec> {
        let depth = maxima.len().saturating_sub(1);
        if self.num_poolings > depth {
            return Err(Error::InvalidArgument(format!(
                "num_poolings = {} exceeds the {depth} coarsening step(s) of the chains",
                self.num_poolings
            )));
        }
        let block_widths = (0..self.num_poolings).map(|b| maxima[depth - b]).collect();
        let spec = ModelSpec {
            input_dim,
            hidden_size: self.hidden_size,
            output_dim: task.output_dim(),
            num_poolings: self.num_poolings,
            convs_per_block: self.convs_per_block,
            mlp_layers: self.mlp_layers,
            batch_norm: self.batch_norm,
            dropout: self.dropout,
            block_widths,
        };
        spec.validate()?;
        Ok(spec)
    }
}

/// Per-target affine standardisation fitted on training targets.
#[derive(Debug, Clone, PartialEq)]
pub struct Standardizer {
    pub mean: Vec<f64>,
    pub std: Vec<f64>,
}

impl Standardizer {
    /// Population statistics; a zero spread is replaced by 1.
    pub fn fit(targets: &[&[f64]]) -> Result<Self> {
        let Some(first) = targets.first() else {
            return Err(Error::EmptySplit("train"));
        };
        let d = first.len();
        let n = targets.len() as f64;
        let mut mean = vec![0.0; d];
        for t in targets {
            for (m, v) in mean.iter_mut().zip(t.iter()) {
                *m += v / n;
            }
        }
        let mut std = vec![0.0; d];
        for t in targets {
            for ((s, v), m) in std.iter_mut().zip(t.iter()).zip(&mean) {
                *s += (v - m) * (v - m) / n;
            }
        }
        for s in std.iter_mut() {
            *s = s.sqrt();
            if !(*s > 1e-12) {
                *s = 1.0;
            }
        }
        Ok(Standardizer { mean, std })
    }

    pub fn forward(&self, t: &[f64]) -> Vec<f64> {
        t.iter()
            .zip(&self.mean)
            .zip(&self.std)
            .map(|((v, m), s)| (v - m) / s)
            .collect()
    }

    pub fn inverse(&self, m: &Matrix) -> Matrix {
        Matrix::from_fn(m.rows(), m.cols(), |i, j| m[(i, j)] * self.std[j] + self.mean[j])
    }
}

/// Loss and metric of one evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Evaluation {
    pub loss: f64,
    /// Accuracy for classification, de-standardised MAE for regression.
    pub metric: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EpochRecord {
    /// 0 is the untrained model.
    pub epoch: usize,
    pub train: Evaluation,
    pub val: Evaluation,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainOutcome {
    /// Parameters of the best validation epoch.
    pub model: HaarNet,
    pub history: Vec<EpochRecord>,
    pub best_epoch: usize,
    pub test: Evaluation,
    pub stopped_early: bool,
    pub scaler: Option<Standardizer>,
}

impl TrainOutcome {
    pub fn best(&self) -> &EpochRecord {
        &self.history[self.best_epoch]
    }
}

/// Training state shared by the loop and the gradient helpers.
struct Batcher<'d> {
    task: Task,
    data: &'d [PreparedGraph],
    scaler: Option<Standardizer>,
}

const EVAL_CHUNK: usize = 128;

impl<'d> Batcher<'d> {
    fn targets(&self, idx: &[usize]) -> Result<Targets> {
        match self.task {
            Task::Classification { num_classes } => idx
                .iter()
                .map(|&i| match &self.data[i].label {
                    Label::Class(c) if *c < num_classes => Ok(*c),
                    Label::Class(c) => Err(Error::LabelOutOfRange {
                        label: *c,
                        num_classes,
                    }),
                    Label::Target(_) => Err(Error::InvalidArgument("regression label in a classification task".into())),
                })
                .collect::<Result<Vec<_>>>()
                .map(Targets::Classes),
            Task::Regression { num_targets } => {
                let scaler = self.scaler.as_ref().expect("regression scaler is fitted");
                let mut raw = Matrix::zeros(idx.len(), num_targets);
                let mut scaled = Matrix::zeros(idx.len(), num_targets);
                for (r, &i) in idx.iter().enumerate() {
                    let Label::Target(t) = &self.data[i].label else {
                        return Err(Error::InvalidArgument("class label in a regression task".into()));
                    };
                    if t.len() != num_targets {
                        return Err(Error::Shape {
                            op: "regression target",
                            expected: (1, num_targets),
                            found: (1, t.len()),
                        });
                    }
                    raw.row_mut(r).copy_from_slice(t);
                    scaled.row_mut(r).copy_from_slice(&scaler.forward(t));
                }
                Ok(Targets::Values { raw, scaled })
            }
        }
    }

    /// Mean loss and its gradient for every parameter on one batch.
    fn gradients(&self, model: &mut HaarNet, idx: &[usize], rng: &mut crate::Rng) -> Result<(f64, Vec<Matrix>)> {
        let targets = self.targets(idx)?;
        let batch: Vec<&GraphInput> = idx.iter().map(|&i| &self.data[i].input).collect();
        let mut tape = Tape::new();
        let vars = model.register(&mut tape);
        let out = model.forward(&mut tape, &vars, &batch, Mode::Train, rng)?;
        let loss = match &targets {
            Targets::Classes(c) => tape.softmax_cross_entropy(out, c)?,
            Targets::Values { scaled, .. } => tape.mse(out, scaled)?,
        };
        let value = tape.scalar(loss);
        if !value.is_finite() {
            return Err(Error::Numerical(format!("non-finite training loss {value}")));
        }
        let grads = tape.backward(loss)?;
        let g = vars
            .iter()
            .zip(model.params())
            .map(|(&v, p)| grads.get_or_zero(v, p.value.shape()))
            .collect();
        Ok((value, g))
    }

    fn evaluate(&self, model: &HaarNet, idx: &[usize]) -> Result<Evaluation> {
        if idx.is_empty() {
            return Err(Error::InvalidArgument("nothing to evaluate".into()));
        }
        let mut loss = 0.0;
        let mut metric = 0.0;
        for chunk in idx.chunks(EVAL_CHUNK) {
            let batch: Vec<&GraphInput> = chunk.iter().map(|&i| &self.data[i].input).collect();
            let out = model.predict(&batch)?;
            let w = chunk.len() as f64;
            match self.targets(chunk)? {
                Targets::Classes(c) => {
                    loss += w * tape::softmax_cross_entropy(&out, &c)?;
                    metric += w * accuracy(&out, &c);
                }
                Targets::Values { raw, scaled } => {
                    loss += w * tape::mse(&out, &scaled)?;
                    let scaler = self.scaler.as_ref().expect("regression scaler is fitted");
                    metric += w * tape::mae(&scaler.inverse(&out), &raw)?;
                }
            }
        }
        let n = idx.len() as f64;
        Ok(Evaluation {
            loss: loss / n,
            metric: metric / n,
        })
    }
}

enum Targets {
    Classes(Vec<usize>),
    Values { raw: Matrix, scaled: Matrix },
}

/// Fraction of rows whose arg-max (first on ties) equals the label.
pub fn accuracy(logits: &Matrix, labels: &[usize]) -> f64 {
    if labels.is_empty() {
        return 0.0;
    }
    let hits = labels
        .iter()
        .enumerate()
        .filter(|&(i, &l)| {
            let row = logits.row(i);
            let mut best = 0;
            for (c, &v) in row.iter().enumerate() {
                if v > row[best] {
                    best = c;
                }
            }
            best == l
        })
        .count();
    hits as f64 / labels.len() as f64
}

fn resolve(ids: &[usize], index: &BTreeMap<usize, usize>, part: &'static str) -> Result<Vec<usize>> {
    if ids.is_empty() {
        return Err(Error::EmptySplit(part));
    }
    ids.iter()
        .map(|id| {
            index
                .get(id)
                .copied()
                .ok_or_else(|| Error::InvalidArgument(format!("{part} split names unknown graph {id}")))
        })
        .collect()
}

fn build_batcher<'d>(task: Task, data: &'d [PreparedGraph], train_idx: &[usize]) -> Result<Batcher<'d>> {
    let scaler = match task {
        Task::Regression { .. } => {
            let targets = train_idx
                .iter()
                .map(|&i| match &data[i].label {
                    Label::Target(t) => Ok(t.as_slice()),
                    Label::Class(_) => Err(Error::InvalidArgument("class label in a regression task".into())),
                })
                .collect::<Result<Vec<_>>>()?;
            Some(Standardizer::fit(&targets)?)
        }
        Task::Classification { .. } => None,
    };
    Ok(Batcher { task, data, scaler })
}

fn id_index(data: &[PreparedGraph]) -> BTreeMap<usize, usize> {
    data.iter().enumerate().map(|(i, g)| (g.graph_id, i)).collect()
}

/// Parameter gradients of the mean loss over `ids`, at the model's current
/// parameters, in training mode. Regression targets are standardised with
/// statistics of `scaler_ids`.
pub fn batch_gradients(
    model: &HaarNet,
    task: Task,
    data: &[PreparedGraph],
    ids: &[usize],
    scaler_ids: &[usize],
    seed: u64,
) -> Result<(f64, Vec<Matrix>)> {
    let index = id_index(data);
    let idx = resolve(ids, &index, "batch")?;
    let fit = resolve(scaler_ids, &index, "train")?;
    let batcher = build_batcher(task, data, &fit)?;
    let mut model = model.clone();
    let mut rng = crate::rng_from_seed(seed);
    batcher.gradients(&mut model, &idx, &mut rng)
}

/// Build a fresh model for `data` from the configuration.
pub fn build_model(task: &Task, data: &[PreparedGraph], cfg: &TrainConfig) -> Result<HaarNet> {
    let first = data.first().ok_or(Error::EmptySplit("train"))?;
    let maxima: Vec<usize> = first.input.bases.iter().map(|b| b.width()).collect();
    let spec = cfg.model_spec(task, first.input.features.cols(), &maxima)?;
    HaarNet::new(spec, cfg.seed)
}

/// Train with per-epoch callbacks.
pub fn train_with<F: FnMut(&EpochRecord)>(
    mut model: HaarNet,
    task: Task,
    data: &[PreparedGraph],
    split: &Split,
    cfg: &TrainConfig,
    mut on_epoch: F,
) -> Result<TrainOutcome> {
    cfg.validate()?;
    let index = id_index(data);
    let train_idx = resolve(&split.train, &index, "train")?;
    let val_idx = resolve(&split.val, &index, "val")?;
    let test_idx = resolve(&split.test, &index, "test")?;
    for &i in train_idx.iter().chain(&val_idx).chain(&test_idx) {
        model.check_input(&data[i].input)?;
    }
    let batcher = build_batcher(task, data, &train_idx)?;

    let shapes: Vec<(usize, usize)> = model.params().iter().map(|p| p.value.shape()).collect();
    let decay: Vec<bool> = model
        .params()
        .iter()
        .map(|p| match p.kind {
            ParamKind::Weight => true,
            ParamKind::Filter => cfg.decay_filters,
            ParamKind::Bias | ParamKind::Norm => false,
        })
        .collect();
    let mut adam = Adam::new(cfg.learning_rate, cfg.weight_decay, &shapes);
    let mut order_rng = crate::rng_from_seed(cfg.seed);
    let mut dropout_rng = crate::rng_from_seed(cfg.seed ^ 0xD1B5_4A32_D192_ED03);

    let record = |model: &HaarNet, epoch: usize| -> Result<EpochRecord> {
        Ok(EpochRecord {
            epoch,
            train: batcher.evaluate(model, &train_idx)?,
            val: batcher.evaluate(model, &val_idx)?,
        })
    };
    let initial = record(&model, 0)?;
    on_epoch(&initial);
    let mut history = vec![initial];
    let mut best_epoch = 0;
    let mut best_loss = initial.val.loss;
    let mut best_model = model.clone();
    let mut stale = 0;
    let mut stopped_early = false;

    let mut order = train_idx.clone();
    for epoch in 1..=cfg.max_epochs {
        order.shuffle(&mut order_rng);
        for batch in order.chunks(cfg.batch_size) {
            let (_, grads) = batcher.gradients(&mut model, batch, &mut dropout_rng)?;
            let mut params: Vec<&mut Matrix> = model.params_mut().iter_mut().map(|p| &mut p.value).collect();
            adam.step(&mut params, &grads, &decay)?;
        }
        let rec = record(&model, epoch)?;
        on_epoch(&rec);
        history.push(rec);
        if !rec.val.loss.is_finite() {
            return Err(Error::Numerical(format!("validation loss became {} at epoch {epoch}", rec.val.loss)));
        }
        if rec.val.loss < best_loss {
            best_loss = rec.val.loss;
            best_epoch = epoch;
            best_model = model.clone();
            stale = 0;
        } else {
            stale += 1;
            if stale >= cfg.patience {
                stopped_early = true;
                break;
            }
        }
    }
    let test = batcher.evaluate(&best_model, &test_idx)?;
    Ok(TrainOutcome {
        model: best_model,
        history,
        best_epoch,
        test,
        stopped_early,
        scaler: batcher.scaler,
    })
}

/// Train a model on `split` and return the best validation parameters.
pub fn train(
    model: HaarNet,
    task: Task,
    data: &[PreparedGraph],
    split: &Split,
    cfg: &TrainConfig,
) -> Result<TrainOutcome> {
    train_with(model, task, data, split, cfg, |_| {})
}
