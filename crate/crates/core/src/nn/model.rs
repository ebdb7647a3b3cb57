//! The HaarNet model: Haar blocks (convolutions on one chain level, then a
//! pool to the next coarser level), a readout, and an MLP head.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::basis::PaddedBasis;
use crate::dense::Matrix;
use crate::graph::Task;
use crate::nn::layers::{dropout_mask, glorot_uniform, haar_conv, haar_pool, Activation, RunningStats, BN_EPS};
use crate::nn::tape::{Tape, Var};
use crate::{Error, Result, Rng};

/// Architecture of a [`HaarNet`].
#[derive(Debug, Clone, PartialEq)]
pub struct ModelSpec {
    pub input_dim: usize,
    pub hidden_size: usize,
    pub output_dim: usize,
    pub num_poolings: usize,
    pub convs_per_block: usize,
    /// Number of dense layers in the head (2 or 3).
    pub mlp_layers: usize,
    pub batch_norm: bool,
    /// Dropout probability after the first MLP layer.
    pub dropout: f64,
    /// Padded basis width for each block, finest level first.
    pub block_widths: Vec<usize>,
}

impl ModelSpec {
    pub fn validate(&self) -> Result<()> {
        let fail = |m: String| Err(Error::InvalidArgument(m));
        if self.input_dim == 0 || self.hidden_size == 0 || self.output_dim == 0 {
            return fail(format!(
                "dimensions must be positive (input {}, hidden {}, output {})",
                self.input_dim, self.hidden_size, self.output_dim
            ));
        }
        if self.num_poolings == 0 {
            return fail("at least one pooling step is required".into());
        }
        if self.block_widths.len() != self.num_poolings {
            return fail(format!(
                "{} block widths for {} pooling steps",
                self.block_widths.len(),
                self.num_poolings
            ));
        }
        if self.convs_per_block == 0 {
            return fail("convs_per_block must be at least 1".into());
        }
        if !(2..=3).contains(&self.mlp_layers) {
            return fail(format!("mlp_layers must be 2 or 3, got {}", self.mlp_layers));
        }
        if !(0.0..1.0).contains(&self.dropout) {
            return fail(format!("dropout must lie in [0, 1), got {}", self.dropout));
        }
        Ok(())
    }

    /// Output width of each MLP layer.
    fn mlp_dims(&self) -> Vec<(usize, usize)> {
        let mut dims = Vec::new();
        for l in 0..self.mlp_layers {
            let out = if l + 1 == self.mlp_layers {
                self.output_dim
            } else {
                self.hidden_size
            };
            dims.push((self.hidden_size, out));
        }
        dims
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ParamKind {
    /// Dense weights of convolutions and the MLP.
    Weight,
    /// Spectral filter diagonal.
    Filter,
    Bias,
    /// Batch-norm scale and shift.
    Norm,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Param {
    pub name: String,
    pub kind: ParamKind,
    pub value: Matrix,
}

/// Indices into the parameter list, fixed by the architecture.
#[derive(Debug, Clone, PartialEq)]
struct Layout {
    /// `[block][conv] -> (weight, filter)`.
    convs: Vec<Vec<(usize, usize)>>,
    /// `[layer] -> (weight, bias)`.
    mlp: Vec<(usize, usize)>,
    /// `[hidden layer] -> (gamma, beta)` when batch norm is on.
    norms: Vec<(usize, usize)>,
}

/// One graph ready for the network: features and padded bases for every
/// chain level (coarsest first).
#[derive(Debug, Clone, PartialEq)]
pub struct GraphInput {
    pub features: Matrix,
    pub bases: Vec<PaddedBasis>,
}

impl GraphInput {
    pub fn finest(&self) -> usize {
        self.bases.len().saturating_sub(1)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Train,
    Eval,
}

#[derive(Debug, Clone, PartialEq)]
pub struct HaarNet {
    spec: ModelSpec,
    params: Vec<Param>,
    layout: Layout,
    running: Vec<RunningStats>,
}

fn layout_for(spec: &ModelSpec) -> Layout {
    let mut next = 0;
    let mut take = || {
        next += 1;
        next - 1
    };
    let convs = (0..spec.num_poolings)
        .map(|_| (0..spec.convs_per_block).map(|_| (take(), take())).collect())
        .collect();
    let mlp = (0..spec.mlp_layers).map(|_| (take(), take())).collect();
    let norms = if spec.batch_norm {
        (0..spec.mlp_layers - 1).map(|_| (take(), take())).collect()
    } else {
        Vec::new()
    };
    Layout { convs, mlp, norms }
}

impl HaarNet {
    /// Fresh parameters: Glorot-uniform weights, unit filters, zero biases.
    pub fn new(spec: ModelSpec, seed: u64) -> Result<Self> {
        spec.validate()?;
        let mut rng = crate::rng_from_seed(seed);
        let mut params = Vec::new();
        for b in 0..spec.num_poolings {
            for c in 0..spec.convs_per_block {
                let d_in = if b == 0 && c == 0 {
                    spec.input_dim
                } else {
                    spec.hidden_size
                };
                params.push(Param {
                    name: format!("block{b}.conv{c}.weight"),
                    kind: ParamKind::Weight,
                    value: glorot_uniform(d_in, spec.hidden_size, &mut rng),
                });
                params.push(Param {
                    name: format!("block{b}.conv{c}.filter"),
                    kind: ParamKind::Filter,
                    value: Matrix::filled(spec.block_widths[b], 1, 1.0),
                });
            }
        }
        for (l, (d_in, d_out)) in spec.mlp_dims().into_iter().enumerate() {
            params.push(Param {
                name: format!("mlp{l}.weight"),
                kind: ParamKind::Weight,
                value: glorot_uniform(d_in, d_out, &mut rng),
            });
            params.push(Param {
                name: format!("mlp{l}.bias"),
                kind: ParamKind::Bias,
                value: Matrix::zeros(1, d_out),
            });
        }
        let mut running = Vec::new();
        if spec.batch_norm {
            for l in 0..spec.mlp_layers - 1 {
                params.push(Param {
                    name: format!("mlp{l}.bn.gamma"),
                    kind: ParamKind::Norm,
                    value: Matrix::filled(1, spec.hidden_size, 1.0),
                });
                params.push(Param {
                    name: format!("mlp{l}.bn.beta"),
                    kind: ParamKind::Norm,
                    value: Matrix::zeros(1, spec.hidden_size),
                });
                running.push(RunningStats::new(spec.hidden_size));
            }
        }
        let layout = layout_for(&spec);
        Ok(HaarNet {
            spec,
            params,
            layout,
            running,
        })
    }

    /// Rebuild from stored parameters (in [`HaarNet::params`] order).
    pub fn from_parts(spec: ModelSpec, values: Vec<Matrix>, running: Vec<RunningStats>) -> Result<Self> {
        let mut model = HaarNet::new(spec, 0)?;
        if values.len() != model.params.len() {
            return Err(Error::InvalidArgument(format!(
                "expected {} parameter matrices, got {}",
                model.params.len(),
                values.len()
            )));
        }
        for (p, v) in model.params.iter_mut().zip(values) {
            if p.value.shape() != v.shape() {
                return Err(Error::Shape {
                    op: "HaarNet::from_parts",
                    expected: p.value.shape(),
                    found: v.shape(),
                });
            }
            p.value = v;
        }
        if running.len() != model.running.len()
            || running.iter().any(|r| r.mean.len() != model.spec.hidden_size || r.var.len() != model.spec.hidden_size)
        {
            return Err(Error::InvalidArgument("batch-norm statistics do not match the architecture".into()));
        }
        model.running = running;
        Ok(model)
    }

    pub fn spec(&self) -> &ModelSpec {
        &self.spec
    }

    pub fn params(&self) -> &[Param] {
        &self.params
    }

    pub fn params_mut(&mut self) -> &mut [Param] {
        &mut self.params
    }

    pub fn running_stats(&self) -> &[RunningStats] {
        &self.running
    }

    pub fn num_parameters(&self) -> usize {
        self.params.iter().map(|p| p.value.as_slice().len()).sum()
    }

    /// Push every parameter onto the tape as a leaf.
    pub fn register<'a>(&self, tape: &mut Tape<'a>) -> Vec<Var> {
        self.params.iter().map(|p| tape.leaf(p.value.clone())).collect()
    }

    /// Checks that a graph fits the architecture.
    pub fn check_input(&self, input: &GraphInput) -> Result<()> {
        let spec = &self.spec;
        if input.features.cols() != spec.input_dim {
            return Err(Error::Shape {
                op: "HaarNet input",
                expected: (input.features.rows(), spec.input_dim),
                found: input.features.shape(),
            });
        }
        if input.bases.len() < spec.num_poolings + 1 {
            return Err(Error::InvalidArgument(format!(
                "{} pooling steps need a chain with at least {} levels, got {}",
                spec.num_poolings,
                spec.num_poolings + 1,
                input.bases.len()
            )));
        }
        let finest = input.finest();
        for (b, &w) in spec.block_widths.iter().enumerate() {
            let basis = &input.bases[finest - b];
            if basis.width() != w {
                return Err(Error::InvalidArgument(format!(
                    "basis at level {} has width {}, the model expects {w}",
                    finest - b,
                    basis.width()
                )));
            }
        }
        Ok(())
    }

    /// Pooled `1 × hidden` representation of one graph (rows averaged if
    /// the last pooled level keeps more than one node).
    pub fn embed<'a>(&self, tape: &mut Tape<'a>, vars: &[Var], input: &'a GraphInput) -> Result<Var> {
        self.check_input(input)?;
        let finest = input.finest();
        let mut h = tape.leaf(input.features.clone());
        for (b, block) in self.layout.convs.iter().enumerate() {
            let basis = &input.bases[finest - b];
            for &(w, g) in block {
                h = haar_conv(tape, basis, h, vars[w], vars[g], Activation::Relu)?;
            }
            h = haar_pool(tape, basis, h)?;
        }
        Ok(if tape.value(h).rows() == 1 {
            h
        } else {
            tape.mean_rows(h)
        })
    }

    /// Pooled representation of each graph, without the head.
    pub fn pooled<'a>(&self, tape: &mut Tape<'a>, vars: &[Var], batch: &[&'a GraphInput]) -> Result<Vec<Var>> {
        batch.iter().map(|g| self.embed(tape, vars, g)).collect()
    }

    /// Network outputs for a batch, one row per graph.
    ///
    /// In training mode batch norm uses batch statistics (and updates the
    /// running estimates) and dropout draws masks from `rng`.
    pub fn forward<'a>(
        &mut self,
        tape: &mut Tape<'a>,
        vars: &[Var],
        batch: &[&'a GraphInput],
        mode: Mode,
        rng: &mut Rng,
    ) -> Result<Var> {
        if batch.is_empty() {
            return Err(Error::InvalidArgument("empty batch".into()));
        }
        let rows = self.pooled(tape, vars, batch)?;
        let mut h = tape.vstack(&rows)?;
        let last = self.layout.mlp.len() - 1;
        for (l, &(w, b)) in self.layout.mlp.clone().iter().enumerate() {
            h = tape.matmul(h, vars[w])?;
            h = tape.add_row(h, vars[b])?;
            if l == last {
                break;
            }
            if let Some(&(gamma, beta)) = self.layout.norms.get(l) {
                h = match mode {
                    Mode::Train if tape.value(h).rows() > 1 => {
                        self.running[l].update(tape.value(h));
                        tape.batch_norm(h, vars[gamma], vars[beta], BN_EPS)?
                    }
                    _ => self.running[l].apply(tape, h, vars[gamma], vars[beta])?,
                };
            }
            h = tape.relu(h);
            if l == 0 && mode == Mode::Train && self.spec.dropout > 0.0 {
                let (r, c) = tape.value(h).shape();
                let mask = dropout_mask(r, c, self.spec.dropout, rng);
                h = tape.mask(h, mask)?;
            }
        }
        Ok(h)
    }

    /// Evaluation-mode outputs as a plain matrix.
    pub fn predict(&self, batch: &[&GraphInput]) -> Result<Matrix> {
        let mut model = self.clone();
        let mut tape = Tape::new();
        let vars = model.register(&mut tape);
        let mut rng = crate::rng_from_seed(0);
        let out = model.forward(&mut tape, &vars, batch, Mode::Eval, &mut rng)?;
        Ok(tape.value(out).clone())
    }
}

/// Architecture defaults for a task.
pub fn default_spec(task: &Task, input_dim: usize, hidden_size: usize, block_widths: Vec<usize>) -> ModelSpec {
    ModelSpec {
        input_dim,
        hidden_size,
        output_dim: task.output_dim(),
        num_poolings: block_widths.len(),
        convs_per_block: 2,
        mlp_layers: 3,
        batch_norm: false,
        dropout: 0.0,
        block_widths,
    }
}
