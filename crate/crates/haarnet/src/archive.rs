//! Chain archives: a dataset together with the chain and Haar bases of
//! every graph, so training never rebuilds them.
//!
//! Layout (all integers `u64` little-endian unless noted, floats as raw
//! IEEE-754 bits):
//!
//! ```text
//! magic    8 bytes  "HAARCHN\0"
//! version  u32
//! section  "HEAD": dataset name, chain parameters, graph count
//! section  "DSET": task, then per graph: id, adjacency (CSC), features, label
//! section  "GRPH" per graph: id, levels (adjacency CSC, parents, cluster
//!          sizes, node order), bases (level, CSC, num_lowpass, creation
//!          levels, home clusters with u64::MAX for none)
//! ```
//!
//! A section is a 4-byte tag, a `u64` byte length and the payload. Nothing
//! time-dependent is stored, so equal inputs give equal bytes.

use std::fs;
use std::path::Path;

use haarnet_core::basis::{build_all_bases, nnz_bound_general, HaarBasis, ORTHONORMAL_TOL};
use haarnet_core::chain::{build_chain, Chain, ChainLevel, ChainParams, ClusterMethod};
use haarnet_core::graph::{Dataset, Graph, Label, Task};
use haarnet_core::nn::{prepare_graphs, PreparedGraph};
use rand::seq::SliceRandom;
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::binio::{Reader, Writer};
use crate::{Error, Result};

pub const MAGIC: &[u8; 8] = b"HAARCHN\0";
pub const VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq)]
pub struct GraphRecord {
    pub graph_id: usize,
    pub chain: Chain,
    /// Coarsest level first.
    pub bases: Vec<HaarBasis>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChainArchive {
    pub params: ChainParams,
    pub dataset: Dataset,
    /// One record per graph, in dataset order.
    pub records: Vec<GraphRecord>,
}

/// Per-level statistics printed by `prepare`.
#[derive(Debug, Clone, PartialEq)]
pub struct LevelStats {
    pub level: usize,
    pub max_nodes: usize,
    pub total_nnz: usize,
    /// Largest `nnz / N²` over graphs.
    pub max_density: f64,
    /// Largest `nnz / bound` over graphs, with the bound
    /// `N·(N⁽⁰⁾ + j·(ξ_max − 1))`.
    pub max_bound_ratio: f64,
}

impl ChainArchive {
    /// Build chains and bases for every graph, in parallel.
    pub fn build(dataset: Dataset, params: ChainParams) -> Result<Self> {
        let records = dataset
            .graphs()
            .par_iter()
            .map(|g| build_record(g, &params))
            .collect::<Result<Vec<_>>>()?;
        Ok(ChainArchive {
            params,
            dataset,
            records,
        })
    }

    pub fn depth(&self) -> usize {
        self.params.num_levels
    }

    /// Largest node count per level, coarsest first.
    pub fn level_maxima(&self) -> Vec<usize> {
        (0..=self.depth())
            .map(|j| self.records.iter().map(|r| r.chain.num_nodes(j)).max().unwrap_or(0))
            .collect()
    }

    pub fn level_stats(&self) -> Vec<LevelStats> {
        (0..=self.depth())
            .map(|j| {
                let mut s = LevelStats {
                    level: j,
                    max_nodes: 0,
                    total_nnz: 0,
                    max_density: 0.0,
                    max_bound_ratio: 0.0,
                };
                for r in &self.records {
                    let b = &r.bases[j];
                    let n = b.size();
                    let nnz = b.matrix().nnz();
                    s.max_nodes = s.max_nodes.max(n);
                    s.total_nnz += nnz;
                    s.max_density = s.max_density.max(nnz as f64 / (n * n) as f64);
                    let bound = nnz_bound_general(&r.chain, j).max(1);
                    s.max_bound_ratio = s.max_bound_ratio.max(nnz as f64 / bound as f64);
                }
                s
            })
            .collect()
    }

    pub fn record(&self, graph_id: usize) -> Option<&GraphRecord> {
        self.records.iter().find(|r| r.graph_id == graph_id)
    }

    /// Graphs padded to the archive's level maxima, ready for training.
    pub fn prepared(&self) -> Result<Vec<PreparedGraph>> {
        let bases: Vec<Vec<HaarBasis>> = self.records.iter().map(|r| r.bases.clone()).collect();
        Ok(prepare_graphs(&self.dataset, &bases)?)
    }

    /// Indices of the graphs re-verified on load: a seeded tenth of the
    /// archive (at least one graph).
    pub fn verification_sample(&self) -> Vec<usize> {
        let m = self.records.len();
        if m == 0 {
            return Vec::new();
        }
        let k = m.div_ceil(10);
        let mut idx: Vec<usize> = (0..m).collect();
        idx.shuffle(&mut haarnet_core::rng_from_seed(self.params.seed ^ 0xA5C4_1E0F));
        idx.truncate(k);
        idx.sort_unstable();
        idx
    }

    /// Check `ΦᵀΦ = I` on the sampled graphs.
    pub fn verify_sample(&self) -> Result<Vec<usize>> {
        let sample = self.verification_sample();
        for &i in &sample {
            let r = &self.records[i];
            for b in &r.bases {
                let defect = b.orthonormality_defect();
                if !(defect < ORTHONORMAL_TOL) {
                    return Err(Error::Numerical(format!(
                        "graph {}: basis at level {} has orthonormality defect {defect:e}",
                        r.graph_id, b.level
                    )));
                }
            }
        }
        Ok(sample)
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Writer::default();
        out.buf.extend_from_slice(MAGIC);
        out.u32(VERSION);

        let mut head = Writer::default();
        head.str(&self.dataset.name);
        write_params(&mut head, &self.params);
        head.usize(self.records.len());
        out.section(b"HEAD", head);

        let mut data = Writer::default();
        write_dataset(&mut data, &self.dataset);
        out.section(b"DSET", data);

        for r in &self.records {
            let mut w = Writer::default();
            write_record(&mut w, r);
            out.section(b"GRPH", w);
        }
        out.buf
    }

    /// Parse an archive. `path` only labels error messages.
    pub fn from_bytes(bytes: &[u8], path: &Path) -> Result<Self> {
        let mut r = Reader::new(bytes, path);
        if r.bytes(8).ok() != Some(&MAGIC[..]) {
            return Err(Error::format(path, None, "not a chain archive (bad magic bytes)"));
        }
        let version = r.u32()?;
        if version != VERSION {
            return Err(Error::format(
                path,
                None,
                format!("archive format version {version} is not supported (expected {VERSION})"),
            ));
        }
        let mut head = r.expect_tag(b"HEAD")?;
        let name = head.str()?;
        let params = read_params(&mut head)?;
        let count = head.usize()?;
        head.finish()?;

        let mut data = r.expect_tag(b"DSET")?;
        let dataset = read_dataset(&mut data, name)?;
        data.finish()?;
        if dataset.len() != count {
            return Err(r.err(format!("header promises {count} graphs, dataset holds {}", dataset.len())));
        }
        let mut records = Vec::with_capacity(count);
        for g in dataset.graphs() {
            let mut s = r.expect_tag(b"GRPH")?;
            let rec = read_record(&mut s)?;
            s.finish()?;
            if rec.graph_id != g.graph_id || rec.chain.num_nodes(rec.chain.finest()) != g.num_nodes() {
                return Err(r.err(format!("chain record {} does not match graph {}", rec.graph_id, g.graph_id)));
            }
            if rec.chain.depth() != params.num_levels {
                return Err(r.err(format!("graph {}: chain depth differs from the header", rec.graph_id)));
            }
            records.push(rec);
        }
        r.finish()?;
        Ok(ChainArchive {
            params,
            dataset,
            records,
        })
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        fs::write(path, self.to_bytes()).map_err(|e| Error::io(path, e))
    }

    /// Read, parse and re-verify orthonormality on a sampled tenth.
    pub fn load(path: &Path) -> Result<Self> {
        let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
        let archive = ChainArchive::from_bytes(&bytes, path)?;
        let checked = archive.verify_sample()?;
        log::info!("{}: re-verified orthonormality on {} graph(s)", path.display(), checked.len());
        Ok(archive)
    }

    /// Debugging view of the archive. Floats are printed as JSON numbers.
    pub fn to_json(&self) -> Value {
        let csc = |m: &haarnet_core::sparse::CscMatrix| {
            json!({
                "rows": m.rows(),
                "cols": m.cols(),
                "triplets": m.triplets().map(|(i, j, v)| json!([i, j, v])).collect::<Vec<_>>(),
            })
        };
        json!({
            "format_version": VERSION,
            "dataset": self.dataset.name,
            "params": {
                "num_levels": self.params.num_levels,
                "ratio": self.params.ratio,
                "collapse_last": self.params.collapse_last,
                "seed": self.params.seed,
                "method": method_name(self.params.method),
            },
            "graphs": self.records.iter().map(|r| json!({
                "graph_id": r.graph_id,
                "levels": r.chain.levels().iter().enumerate().map(|(j, l)| json!({
                    "adjacency": csc(&l.adjacency),
                    "parent": l.parent,
                    "cluster_sizes": if j == 0 { Vec::new() } else { r.chain.cluster_sizes(j) },
                    "node_order": l.node_order,
                })).collect::<Vec<_>>(),
                "bases": r.bases.iter().map(|b| json!({
                    "level": b.level,
                    "num_lowpass": b.num_lowpass(),
                    "creation_level": b.creation_level(),
                    "home_cluster": b.home_cluster(),
                    "matrix": csc(b.matrix()),
                })).collect::<Vec<_>>(),
            })).collect::<Vec<_>>(),
        })
    }
}

fn build_record(g: &Graph, params: &ChainParams) -> Result<GraphRecord> {
    let wrap = |source| Error::Graph {
        graph_id: g.graph_id,
        source,
    };
    let chain = build_chain(g, params).map_err(wrap)?;
    let bases = build_all_bases(&chain).map_err(wrap)?;
    Ok(GraphRecord {
        graph_id: g.graph_id,
        chain,
        bases,
    })
}

pub fn method_name(m: ClusterMethod) -> String {
    match m {
        ClusterMethod::Spectral => "spectral".into(),
        ClusterMethod::HeavyEdge => "heavy-edge".into(),
        ClusterMethod::Auto { threshold } => format!("auto:{threshold}"),
    }
}

fn write_params(w: &mut Writer, p: &ChainParams) {
    w.usize(p.num_levels);
    w.f64(p.ratio);
    w.bool(p.collapse_last);
    w.u64(p.seed);
    match p.method {
        ClusterMethod::Spectral => {
            w.u8(0);
            w.usize(0);
        }
        ClusterMethod::HeavyEdge => {
            w.u8(1);
            w.usize(0);
        }
        ClusterMethod::Auto { threshold } => {
            w.u8(2);
            w.usize(threshold);
        }
    }
}

fn read_params(r: &mut Reader) -> Result<ChainParams> {
    let num_levels = r.usize()?;
    let ratio = r.f64()?;
    let collapse_last = r.bool()?;
    let seed = r.u64()?;
    let kind = r.u8()?;
    let threshold = r.usize()?;
    let method = match kind {
        0 => ClusterMethod::Spectral,
        1 => ClusterMethod::HeavyEdge,
        2 => ClusterMethod::Auto { threshold },
        k => return Err(r.err(format!("unknown clustering method {k}"))),
    };
    Ok(ChainParams {
        num_levels,
        ratio,
        collapse_last,
        seed,
        method,
    })
}

pub(crate) fn write_task(w: &mut Writer, task: Task) {
    match task {
        Task::Classification { num_classes } => {
            w.u8(0);
            w.usize(num_classes);
        }
        Task::Regression { num_targets } => {
            w.u8(1);
            w.usize(num_targets);
        }
    }
}

pub(crate) fn read_task(r: &mut Reader) -> Result<Task> {
    let kind = r.u8()?;
    let n = r.usize()?;
    match kind {
        0 => Ok(Task::Classification { num_classes: n }),
        1 => Ok(Task::Regression { num_targets: n }),
        k => Err(r.err(format!("unknown task kind {k}"))),
    }
}

fn write_dataset(w: &mut Writer, ds: &Dataset) {
    write_task(w, ds.task);
    w.usize(ds.len());
    for g in ds.graphs() {
        w.usize(g.graph_id);
        w.csc(g.adjacency());
        w.matrix(g.features());
        match &g.label {
            None => w.u8(0),
            Some(Label::Class(c)) => {
                w.u8(1);
                w.usize(*c);
            }
            Some(Label::Target(t)) => {
                w.u8(2);
                w.f64s(t);
            }
        }
    }
}

fn read_dataset(r: &mut Reader, name: String) -> Result<Dataset> {
    let task = read_task(r)?;
    let n = r.count(1)?;
    let mut graphs = Vec::with_capacity(n);
    for _ in 0..n {
        let id = r.usize()?;
        let adjacency = r.csc()?;
        let features = r.matrix()?;
        let label = match r.u8()? {
            0 => None,
            1 => Some(Label::Class(r.usize()?)),
            2 => Some(Label::Target(r.f64s()?)),
            k => return Err(r.err(format!("unknown label kind {k}"))),
        };
        graphs.push(Graph::new(id, adjacency, features, label).map_err(|e| r.err(e.to_string()))?);
    }
    Dataset::new(name, task, graphs).map_err(|e| r.err(e.to_string()))
}

fn write_record(w: &mut Writer, rec: &GraphRecord) {
    w.usize(rec.graph_id);
    let levels = rec.chain.levels();
    w.usize(levels.len());
    for (j, l) in levels.iter().enumerate() {
        w.csc(&l.adjacency);
        w.usizes(&l.parent);
        w.usizes(&if j == 0 { Vec::new() } else { rec.chain.cluster_sizes(j) });
        w.usizes(&l.node_order);
    }
    w.usize(rec.bases.len());
    for b in &rec.bases {
        w.usize(b.level);
        w.csc(b.matrix());
        w.usize(b.num_lowpass());
        w.usizes(b.creation_level());
        let homes: Vec<u64> = b.home_cluster().iter().map(|h| h.map_or(u64::MAX, |p| p as u64)).collect();
        w.usize(homes.len());
        homes.into_iter().for_each(|h| w.u64(h));
    }
}

fn read_record(r: &mut Reader) -> Result<GraphRecord> {
    let graph_id = r.usize()?;
    let n_levels = r.count(1)?;
    let mut levels = Vec::with_capacity(n_levels);
    let mut stored_sizes = Vec::with_capacity(n_levels);
    for _ in 0..n_levels {
        let adjacency = r.csc()?;
        let parent = r.usizes()?;
        stored_sizes.push(r.usizes()?);
        let node_order = r.usizes()?;
        levels.push(ChainLevel {
            adjacency,
            parent,
            node_order,
        });
    }
    let chain = Chain::from_levels(levels).map_err(|e| r.err(format!("graph {graph_id}: {e}")))?;
    for (j, sizes) in stored_sizes.iter().enumerate().skip(1) {
        if *sizes != chain.cluster_sizes(j) {
            return Err(r.err(format!("graph {graph_id}: stored cluster sizes at level {j} disagree with the parents")));
        }
    }
    let n_bases = r.count(1)?;
    if n_bases != chain.num_levels() {
        return Err(r.err(format!("graph {graph_id}: {n_bases} bases for {} levels", chain.num_levels())));
    }
    let mut bases = Vec::with_capacity(n_bases);
    for _ in 0..n_bases {
        let level = r.usize()?;
        let matrix = r.csc()?;
        let num_lowpass = r.usize()?;
        let creation = r.usizes()?;
        let n_home = r.count(8)?;
        let home = (0..n_home)
            .map(|_| r.u64().map(|h| if h == u64::MAX { None } else { Some(h as usize) }))
            .collect::<Result<Vec<_>>>()?;
        let b = HaarBasis::from_parts(level, matrix, num_lowpass, creation, home)
            .map_err(|e| r.err(format!("graph {graph_id}: {e}")))?;
        if b.level != bases.len() || b.size() != chain.num_nodes(b.level) {
            return Err(r.err(format!("graph {graph_id}: basis {} does not fit its chain level", b.level)));
        }
        bases.push(b);
    }
    Ok(GraphRecord {
        graph_id,
        chain,
        bases,
    })
}
