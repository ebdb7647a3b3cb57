//! `key = value` experiment configuration.
//!
//! Lines starting with `#` and trailing `# ...` are comments. Values are
//! applied over the defaults in file order; command-line flags are applied
//! afterwards and win.
//!
//! ```text
//! # training
//! learning_rate = 0.001
//! weight_decay  = 0.0005
//! batch_size    = 32
//! hidden_size   = 64
//! num_poolings  = 1
//! max_epochs    = 150
//! patience      = 25
//! seed          = 0
//! convs_per_block = 2
//! mlp_layers    = 3
//! batch_norm    = false
//! dropout       = 0
//! decay_filters = false
//! # repeats
//! repeats       = 10        # split seeds 0..repeats
//! split_seeds   = 3,5,8     # explicit list, overrides repeats
//! # chains
//! levels        = 2
//! ratio         = 0.25
//! collapse_last = true
//! cluster_method = auto     # auto | spectral | heavy-edge
//! auto_threshold = 2000
//! threads       = 4
//! ```

use std::path::Path;
use std::str::FromStr;

use haarnet_core::chain::{ChainParams, ClusterMethod};
use haarnet_core::nn::TrainConfig;

use crate::text::{fields, TextFile};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub train: TrainConfig,
    pub chain: ChainParams,
    /// Seeds of the 80/10/10 splits, one training run each.
    pub split_seeds: Vec<u64>,
    /// Worker threads; `None` lets the pool decide.
    pub threads: Option<usize>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            train: TrainConfig::default(),
            chain: ChainParams::default(),
            split_seeds: (0..10).collect(),
            threads: None,
        }
    }
}

pub const KEYS: &[&str] = &[
    "learning_rate",
    "weight_decay",
    "batch_size",
    "hidden_size",
    "num_poolings",
    "max_epochs",
    "patience",
    "seed",
    "convs_per_block",
    "mlp_layers",
    "batch_norm",
    "dropout",
    "decay_filters",
    "repeats",
    "split_seeds",
    "levels",
    "ratio",
    "collapse_last",
    "cluster_method",
    "auto_threshold",
    "threads",
];

fn num<T: FromStr>(key: &str, v: &str) -> std::result::Result<T, String> {
    v.parse().map_err(|_| format!("invalid value `{v}` for {key}"))
}

fn flag(key: &str, v: &str) -> std::result::Result<bool, String> {
    match v {
        "true" | "yes" | "1" | "on" => Ok(true),
        "false" | "no" | "0" | "off" => Ok(false),
        _ => Err(format!("invalid value `{v}` for {key} (expected true or false)")),
    }
}

pub fn parse_method(v: &str, threshold: usize) -> std::result::Result<ClusterMethod, String> {
    match v {
        "auto" => Ok(ClusterMethod::Auto { threshold }),
        "spectral" => Ok(ClusterMethod::Spectral),
        "heavy-edge" | "heavy_edge" => Ok(ClusterMethod::HeavyEdge),
        _ => Err(format!("unknown cluster_method `{v}` (expected auto, spectral or heavy-edge)")),
    }
}

impl ExperimentConfig {
    /// Apply one setting.
    pub fn set(&mut self, key: &str, v: &str) -> std::result::Result<(), String> {
        let t = &mut self.train;
        match key {
            "learning_rate" => t.learning_rate = num(key, v)?,
            "weight_decay" => t.weight_decay = num(key, v)?,
            "batch_size" => t.batch_size = num(key, v)?,
            "hidden_size" => t.hidden_size = num(key, v)?,
            "num_poolings" => t.num_poolings = num(key, v)?,
            "max_epochs" => t.max_epochs = num(key, v)?,
            "patience" => t.patience = num(key, v)?,
            "seed" => {
                t.seed = num(key, v)?;
                self.chain.seed = t.seed;
            }
            "convs_per_block" => t.convs_per_block = num(key, v)?,
            "mlp_layers" => t.mlp_layers = num(key, v)?,
            "batch_norm" => t.batch_norm = flag(key, v)?,
            "dropout" => t.dropout = num(key, v)?,
            "decay_filters" => t.decay_filters = flag(key, v)?,
            "repeats" => {
                let n: u64 = num(key, v)?;
                if n == 0 {
                    return Err("repeats must be at least 1".into());
                }
                self.split_seeds = (0..n).collect();
            }
            "split_seeds" => {
                let seeds = fields(v).map(|s| num(key, s)).collect::<std::result::Result<Vec<u64>, _>>()?;
                if seeds.is_empty() {
                    return Err("split_seeds needs at least one seed".into());
                }
                self.split_seeds = seeds;
            }
            "levels" => self.chain.num_levels = num(key, v)?,
            "ratio" => self.chain.ratio = num(key, v)?,
            "collapse_last" => self.chain.collapse_last = flag(key, v)?,
            "cluster_method" => {
                let threshold = match self.chain.method {
                    ClusterMethod::Auto { threshold } => threshold,
                    _ => 2000,
                };
                self.chain.method = parse_method(v, threshold)?;
            }
            "auto_threshold" => {
                let threshold = num(key, v)?;
                if let ClusterMethod::Auto { .. } = self.chain.method {
                    self.chain.method = ClusterMethod::Auto { threshold };
                }
            }
            "threads" => {
                let n: usize = num(key, v)?;
                self.threads = (n > 0).then_some(n);
            }
            _ => return Err(format!("unknown configuration key `{key}`")),
        }
        Ok(())
    }

    /// Apply every setting of a config file. Problems are usage errors
    /// naming `file:line`.
    pub fn apply_file(&mut self, path: &Path) -> Result<()> {
        let file = TextFile::read(path)?;
        for (n, line) in file.lines() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((k, v)) = line.split_once('=') else {
                return Err(Error::Usage(format!("{}:{n}: expected `key = value`", path.display())));
            };
            self.set(k.trim(), v.trim())
                .map_err(|m| Error::Usage(format!("{}:{n}: {m}", path.display())))?;
        }
        Ok(())
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let mut cfg = ExperimentConfig::default();
        cfg.apply_file(path)?;
        Ok(cfg)
    }

    /// Model seed of the repeat that uses split `split_seed`.
    pub fn run_seed(&self, split_seed: u64) -> u64 {
        self.train.seed.wrapping_add(split_seed)
    }
}
