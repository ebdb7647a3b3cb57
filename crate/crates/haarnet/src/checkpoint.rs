//! Trained-model checkpoints.
//!
//! ```text
//! magic    8 bytes  "HAARCKP\0"
//! version  u32
//! "SPEC"   input_dim, hidden_size, output_dim, num_poolings, convs_per_block,
//!          mlp_layers, batch_norm (u8), dropout (f64), block widths
//! "CONF"   training configuration
//! "TASK"   task kind (u8) and output count
//! "PARM"   parameter count, then each matrix as rows, cols and row-major f64
//! "STAT"   batch-norm running mean/variance per hidden layer
//! "SCAL"   regression target standardiser (u8 flag, then mean and std)
//! ```

use std::fs;
use std::path::Path;

use haarnet_core::graph::Task;
use haarnet_core::nn::layers::RunningStats;
use haarnet_core::nn::train::Standardizer;
use haarnet_core::nn::{HaarNet, ModelSpec, TrainConfig};

use crate::archive::{read_task, write_task};
use crate::binio::{Reader, Writer};
use crate::{Error, Result};

pub const MAGIC: &[u8; 8] = b"HAARCKP\0";
pub const VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq)]
pub struct Checkpoint {
    pub model: HaarNet,
    pub config: TrainConfig,
    pub task: Task,
    pub scaler: Option<Standardizer>,
}

fn write_spec(w: &mut Writer, s: &ModelSpec) {
    for v in [s.input_dim, s.hidden_size, s.output_dim, s.num_poolings, s.convs_per_block, s.mlp_layers] {
        w.usize(v);
    }
    w.bool(s.batch_norm);
    w.f64(s.dropout);
    w.usizes(&s.block_widths);
}

fn read_spec(r: &mut Reader) -> Result<ModelSpec> {
    Ok(ModelSpec {
        input_dim: r.usize()?,
        hidden_size: r.usize()?,
        output_dim: r.usize()?,
        num_poolings: r.usize()?,
        convs_per_block: r.usize()?,
        mlp_layers: r.usize()?,
        batch_norm: r.bool()?,
        dropout: r.f64()?,
        block_widths: r.usizes()?,
    })
}

pub(crate) fn write_config(w: &mut Writer, c: &TrainConfig) {
    w.f64(c.learning_rate);
    w.f64(c.weight_decay);
    for v in [c.batch_size, c.hidden_size, c.num_poolings, c.max_epochs, c.patience] {
        w.usize(v);
    }
    w.u64(c.seed);
    w.usize(c.convs_per_block);
    w.usize(c.mlp_layers);
    w.bool(c.batch_norm);
    w.f64(c.dropout);
    w.bool(c.decay_filters);
}

pub(crate) fn read_config(r: &mut Reader) -> Result<TrainConfig> {
    Ok(TrainConfig {
        learning_rate: r.f64()?,
        weight_decay: r.f64()?,
        batch_size: r.usize()?,
        hidden_size: r.usize()?,
        num_poolings: r.usize()?,
        max_epochs: r.usize()?,
        patience: r.usize()?,
        seed: r.u64()?,
        convs_per_block: r.usize()?,
        mlp_layers: r.usize()?,
        batch_norm: r.bool()?,
        dropout: r.f64()?,
        decay_filters: r.bool()?,
    })
}

impl Checkpoint {
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Writer::default();
        out.buf.extend_from_slice(MAGIC);
        out.u32(VERSION);

        let mut w = Writer::default();
        write_spec(&mut w, self.model.spec());
        out.section(b"SPEC", w);

        let mut w = Writer::default();
        write_config(&mut w, &self.config);
        out.section(b"CONF", w);

        let mut w = Writer::default();
        write_task(&mut w, self.task);
        out.section(b"TASK", w);

        let mut w = Writer::default();
        w.usize(self.model.params().len());
        self.model.params().iter().for_each(|p| w.matrix(&p.value));
        out.section(b"PARM", w);

        let mut w = Writer::default();
        w.usize(self.model.running_stats().len());
        for s in self.model.running_stats() {
            w.f64s(&s.mean);
            w.f64s(&s.var);
        }
        out.section(b"STAT", w);

        let mut w = Writer::default();
        match &self.scaler {
            None => w.u8(0),
            Some(s) => {
                w.u8(1);
                w.f64s(&s.mean);
                w.f64s(&s.std);
            }
        }
        out.section(b"SCAL", w);
        out.buf
    }

    pub fn from_bytes(bytes: &[u8], path: &Path) -> Result<Self> {
        let mut r = Reader::new(bytes, path);
        if r.bytes(8).ok() != Some(&MAGIC[..]) {
            return Err(Error::format(path, None, "not a model checkpoint (bad magic bytes)"));
        }
        let version = r.u32()?;
        if version != VERSION {
            return Err(Error::format(
                path,
                None,
                format!("checkpoint format version {version} is not supported (expected {VERSION})"),
            ));
        }
        let mut s = r.expect_tag(b"SPEC")?;
        let spec = read_spec(&mut s)?;
        s.finish()?;
        let mut s = r.expect_tag(b"CONF")?;
        let config = read_config(&mut s)?;
        s.finish()?;
        let mut s = r.expect_tag(b"TASK")?;
        let task = read_task(&mut s)?;
        s.finish()?;

        let mut s = r.expect_tag(b"PARM")?;
        let n = s.count(16)?;
        let values = (0..n).map(|_| s.matrix()).collect::<Result<Vec<_>>>()?;
        s.finish()?;

        let mut s = r.expect_tag(b"STAT")?;
        let n = s.count(16)?;
        let running = (0..n)
            .map(|_| Ok(RunningStats { mean: s.f64s()?, var: s.f64s()? }))
            .collect::<Result<Vec<_>>>()?;
        s.finish()?;

        let mut s = r.expect_tag(b"SCAL")?;
        let scaler = match s.u8()? {
            0 => None,
            1 => Some(Standardizer { mean: s.f64s()?, std: s.f64s()? }),
            k => return Err(s.err(format!("unknown scaler flag {k}"))),
        };
        s.finish()?;
        r.finish()?;

        if task.output_dim() != spec.output_dim {
            return Err(r.err("task and architecture disagree on the output width"));
        }
        let model = HaarNet::from_parts(spec, values, running).map_err(|e| r.err(e.to_string()))?;
        Ok(Checkpoint { model, config, task, scaler })
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        fs::write(path, self.to_bytes()).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
        Checkpoint::from_bytes(&bytes, path)
    }
}
