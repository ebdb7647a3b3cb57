//! Coarse-grained chains.
//!
//! A chain stores graphs from the coarsest level `0` up to the finest level
//! `depth()`, which is the input graph. Level numbering grows towards the
//! finer graphs, so level `j` has parents at level `j − 1`.
//!
//! Every level carries a canonical node order: descending weighted degree,
//! ties broken by the smallest finest-level node index the (super)node
//! contains. Coarse levels are relabelled so their canonical order is the
//! identity; the finest level keeps the input labelling and stores its order
//! explicitly. Children of a parent are always listed in canonical order.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)] // inherent float methods win whenever std is linked
use num_traits::Float;

use crate::cluster::{heavy_edge_cluster, spectral_cluster};
use crate::graph::Graph;
use crate::sparse::CscMatrix;
use crate::{Error, Result};

/// One level of a chain.
#[derive(Debug, Clone, PartialEq)]
pub struct ChainLevel {
    pub adjacency: CscMatrix,
    /// Parent (at the next coarser level) of each node; empty at level 0.
    pub parent: Vec<usize>,
    /// Canonical order: `node_order[r]` is the node of rank `r`.
    pub node_order: Vec<usize>,
}

impl ChainLevel {
    pub fn num_nodes(&self) -> usize {
        self.adjacency.rows()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Chain {
    levels: Vec<ChainLevel>,
    /// `children[j][p]`: level-`j` children of parent `p`, canonical order.
    /// `children[0]` is empty.
    children: Vec<Vec<Vec<usize>>>,
}

impl Chain {
    /// Assemble and validate a chain from levels ordered coarsest first.
    pub fn from_levels(levels: Vec<ChainLevel>) -> Result<Self> {
        if levels.is_empty() {
            return Err(Error::InvalidChain("no levels".into()));
        }
        let mut children = Vec::with_capacity(levels.len());
        for (j, level) in levels.iter().enumerate() {
            let n = level.num_nodes();
            if n == 0 {
                return Err(Error::InvalidChain(format!("level {j} is empty")));
            }
            if level.adjacency.cols() != n {
                return Err(Error::InvalidChain(format!("level {j}: adjacency not square")));
            }
            let mut rank = vec![usize::MAX; n];
            if level.node_order.len() != n {
                return Err(Error::InvalidChain(format!("level {j}: node order length")));
            }
            for (r, &v) in level.node_order.iter().enumerate() {
                if v >= n || rank[v] != usize::MAX {
                    return Err(Error::InvalidChain(format!(
                        "level {j}: node order is not a permutation"
                    )));
                }
                rank[v] = r;
            }
            if j == 0 {
                if !level.parent.is_empty() {
                    return Err(Error::InvalidChain("coarsest level has parents".into()));
                }
                children.push(Vec::new());
                continue;
            }
            let coarse_n = levels[j - 1].num_nodes();
            if level.parent.len() != n {
                return Err(Error::InvalidChain(format!("level {j}: parent map length")));
            }
            let mut kids: Vec<Vec<usize>> = vec![Vec::new(); coarse_n];
            for &v in &level.node_order {
                let p = level.parent[v];
                if p >= coarse_n {
                    return Err(Error::InvalidChain(format!(
                        "level {j}: parent {p} outside level {} of {coarse_n} nodes",
                        j - 1
                    )));
                }
                kids[p].push(v);
            }
            if let Some(p) = kids.iter().position(Vec::is_empty) {
                return Err(Error::InvalidChain(format!(
                    "level {j}: parent {p} at level {} has no children",
                    j - 1
                )));
            }
            children.push(kids);
        }
        Ok(Chain { levels, children })
    }

    /// Number of coarsening steps (`J − J0`).
    pub fn depth(&self) -> usize {
        self.levels.len() - 1
    }

    pub fn num_levels(&self) -> usize {
        self.levels.len()
    }

    /// Level index of the input graph.
    pub fn finest(&self) -> usize {
        self.depth()
    }

    pub fn levels(&self) -> &[ChainLevel] {
        &self.levels
    }

    pub fn level(&self, j: usize) -> &ChainLevel {
        &self.levels[j]
    }

    pub fn num_nodes(&self, j: usize) -> usize {
        self.levels[j].num_nodes()
    }

    /// Children of parent `p` (a level `j − 1` node) at level `j`.
    pub fn children(&self, j: usize, p: usize) -> &[usize] {
        &self.children[j][p]
    }

    /// Cluster sizes `ξ^{(j)}` indexed by level-`j − 1` parent.
    pub fn cluster_sizes(&self, j: usize) -> Vec<usize> {
        self.children[j].iter().map(Vec::len).collect()
    }

    /// Largest cluster size anywhere in the chain (1 for a single level).
    pub fn max_cluster_size(&self) -> usize {
        (1..self.levels.len())
            .flat_map(|j| self.children[j].iter().map(Vec::len))
            .max()
            .unwrap_or(1)
    }

    /// Level-`i` ancestor of every finest-level node.
    pub fn ancestors(&self, i: usize) -> Vec<usize> {
        let mut anc: Vec<usize> = (0..self.num_nodes(self.finest())).collect();
        for j in ((i + 1)..=self.finest()).rev() {
            let parent = &self.levels[j].parent;
            for a in anc.iter_mut() {
                *a = parent[*a];
            }
        }
        anc
    }

    /// Level-`j` descendants of node `u` at level `i ≤ j`.
    pub fn descendants(&self, i: usize, u: usize, j: usize) -> Vec<usize> {
        let mut current = vec![u];
        for level in (i + 1)..=j {
            current = current
                .iter()
                .flat_map(|&p| self.children[level][p].iter().copied())
                .collect();
        }
        current.sort_unstable();
        current
    }

    /// Rename finest node `v` to `perm[v]`, keeping the clustering and the
    /// canonical order attached to the same nodes.
    pub fn relabel_finest(&self, perm: &[usize]) -> Result<Chain> {
        let j = self.finest();
        let n = self.num_nodes(j);
        if perm.len() != n {
            return Err(Error::InvalidArgument("permutation length".into()));
        }
        let mut levels = self.levels.clone();
        let old = &self.levels[j];
        let level = &mut levels[j];
        level.adjacency = CscMatrix::from_triplets(
            n,
            n,
            old.adjacency.triplets().map(|(a, b, w)| (perm[a], perm[b], w)),
        )?;
        if j > 0 {
            let mut parent = vec![0; n];
            for v in 0..n {
                parent[perm[v]] = old.parent[v];
            }
            level.parent = parent;
        }
        level.node_order = old.node_order.iter().map(|&v| perm[v]).collect();
        Chain::from_levels(levels)
    }
}

/// How clusters are formed at each coarsening step.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ClusterMethod {
    Spectral,
    HeavyEdge,
    /// Spectral below `threshold` nodes, heavy-edge matching at or above it.
    Auto { threshold: usize },
}

impl Default for ClusterMethod {
    fn default() -> Self {
        ClusterMethod::Auto { threshold: 2000 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChainParams {
    /// Coarsening steps.
    pub num_levels: usize,
    /// Fraction of nodes kept per step.
    pub ratio: f64,
    /// Force the last step down to a single node.
    pub collapse_last: bool,
    pub seed: u64,
    pub method: ClusterMethod,
}

impl Default for ChainParams {
    fn default() -> Self {
        ChainParams {
            num_levels: 2,
            ratio: 0.25,
            collapse_last: true,
            seed: 0,
            method: ClusterMethod::default(),
        }
    }
}

/// Target cluster count for one step from `n` nodes.
pub fn target_clusters(n: usize, ratio: f64, last_collapses: bool) -> usize {
    if n <= 1 || last_collapses {
        return 1;
    }
    // The small slack keeps exact products such as 0.25 · 100 from rounding up.
    let k = ((ratio * n as f64) - 1e-9).ceil().max(1.0) as usize;
    if k >= n {
        n - 1
    } else {
        k
    }
}

/// Merge clusters into supernodes: `w(p, q) = Σ_{i∈p, j∈q} W[i][j]` for
/// `p ≠ q`, intra-cluster weight dropped.
pub fn coarsen(adjacency: &CscMatrix, assignment: &[usize]) -> Result<CscMatrix> {
    let n = adjacency.rows();
    if assignment.len() != n {
        return Err(Error::InvalidArgument(format!(
            "assignment covers {} of {n} nodes",
            assignment.len()
        )));
    }
    let k = assignment.iter().max().map_or(0, |&m| m + 1);
    let mut counts = vec![0usize; k];
    for &c in assignment {
        counts[c] += 1;
    }
    if let Some(cluster) = counts.iter().position(|&c| c == 0) {
        return Err(Error::EmptyCluster { cluster });
    }
    CscMatrix::from_triplets(
        k,
        k,
        adjacency
            .triplets()
            .map(|(i, j, w)| (assignment[i], assignment[j], w))
            .filter(|&(p, q, _)| p != q),
    )
}

fn canonical_order(adjacency: &CscMatrix, min_index: &[usize]) -> Vec<usize> {
    let degree = adjacency.column_sums();
    let mut order: Vec<usize> = (0..adjacency.rows()).collect();
    order.sort_by(|&a, &b| {
        degree[b]
            .total_cmp(&degree[a])
            .then(min_index[a].cmp(&min_index[b]))
    });
    order
}

fn step_seed(seed: u64, step: usize) -> u64 {
    seed ^ (step as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15)
}

/// Build the chain of a graph with repeated clustering and coarsening.
pub fn build_chain(graph: &Graph, params: &ChainParams) -> Result<Chain> {
    build_chain_from_adjacency(graph.adjacency(), params)
}

pub fn build_chain_from_adjacency(adjacency: &CscMatrix, params: &ChainParams) -> Result<Chain> {
    if params.num_levels == 0 {
        return Err(Error::InvalidArgument("a chain needs at least one coarsening step".into()));
    }
    if !(params.ratio > 0.0 && params.ratio < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "coarsening ratio {} outside (0, 1)",
            params.ratio
        )));
    }
    let n = adjacency.rows();
    if n == 0 {
        return Err(Error::InvalidArgument("empty graph".into()));
    }
    let finest_order = canonical_order(adjacency, &(0..n).collect::<Vec<_>>());
    // Built finest first, reversed at the end.
    let mut levels = vec![ChainLevel {
        adjacency: adjacency.clone(),
        parent: Vec::new(),
        node_order: finest_order,
    }];
    let mut min_index: Vec<usize> = (0..n).collect();
    for step in 0..params.num_levels {
        let current = &levels.last().unwrap().adjacency;
        let size = current.rows();
        let last = step + 1 == params.num_levels;
        let k = target_clusters(size, params.ratio, last && params.collapse_last);
        let assignment = match params.method {
            ClusterMethod::Spectral => spectral_cluster(current, k, step_seed(params.seed, step))?,
            ClusterMethod::HeavyEdge => heavy_edge_cluster(current, k)?,
            ClusterMethod::Auto { threshold } if size >= threshold => heavy_edge_cluster(current, k)?,
            ClusterMethod::Auto { .. } => spectral_cluster(current, k, step_seed(params.seed, step))?,
        };
        let raw = coarsen(current, &assignment)?;
        let mut raw_min = vec![usize::MAX; k];
        for (v, &c) in assignment.iter().enumerate() {
            raw_min[c] = raw_min[c].min(min_index[v]);
        }
        let order = canonical_order(&raw, &raw_min);
        let mut rank = vec![0usize; k];
        for (r, &c) in order.iter().enumerate() {
            rank[c] = r;
        }
        let coarse = CscMatrix::from_triplets(
            k,
            k,
            raw.triplets().map(|(p, q, w)| (rank[p], rank[q], w)),
        )?;
        levels.last_mut().unwrap().parent = assignment.iter().map(|&c| rank[c]).collect();
        min_index = (0..k).map(|r| raw_min[order[r]]).collect();
        levels.push(ChainLevel {
            adjacency: coarse,
            parent: Vec::new(),
            node_order: (0..k).collect(),
        });
    }
    levels.reverse();
    // Parent maps were attached to the finer level before reversing; they
    // now sit on level j and point into level j − 1 as required.
    Chain::from_levels(levels)
}
