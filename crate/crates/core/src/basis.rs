//! Sparse Haar orthonormal bases along a chain.
//!
//! The basis of the coarsest level is built directly; every finer basis is
//! obtained by lifting the coarser columns onto the children (scaled by
//! `1/√ξ` of the child's own cluster) and appending, cluster by cluster, the
//! `ξ − 1` within-cluster difference vectors. The lifted block comes first,
//! so the leading `N^{(j−1)}` columns of `Φ^{(j)}` are exactly the low-pass
//! part the pooling layer keeps.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)] // inherent float methods win whenever std is linked
use num_traits::Float;

use crate::chain::Chain;
use crate::sparse::CscMatrix;
use crate::{Error, Result};

/// Orthonormality tolerance used when bases are (re)verified.
pub const ORTHONORMAL_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct HaarBasis {
    /// Chain level (0 = coarsest).
    pub level: usize,
    matrix: CscMatrix,
    num_lowpass: usize,
    creation_level: Vec<usize>,
    /// Parent node (at `creation_level − 1`) whose children carry the column;
    /// `None` for columns of the coarsest level, which span the whole level.
    home_cluster: Vec<Option<usize>>,
}

impl HaarBasis {
    /// Reassemble a basis from stored parts (e.g. an archive), checking
    /// the bookkeeping but not the numerics.
    pub fn from_parts(
        level: usize,
        matrix: CscMatrix,
        num_lowpass: usize,
        creation_level: Vec<usize>,
        home_cluster: Vec<Option<usize>>,
    ) -> Result<Self> {
        let n = matrix.rows();
        if matrix.cols() != n
            || creation_level.len() != n
            || home_cluster.len() != n
            || num_lowpass == 0
            || num_lowpass > n
        {
            return Err(Error::InvalidChain(format!(
                "basis at level {level}: inconsistent metadata"
            )));
        }
        Ok(HaarBasis {
            level,
            matrix,
            num_lowpass,
            creation_level,
            home_cluster,
        })
    }

    pub fn matrix(&self) -> &CscMatrix {
        &self.matrix
    }

    pub fn size(&self) -> usize {
        self.matrix.rows()
    }

    pub fn num_lowpass(&self) -> usize {
        self.num_lowpass
    }

    pub fn creation_level(&self) -> &[usize] {
        &self.creation_level
    }

    pub fn home_cluster(&self) -> &[Option<usize>] {
        &self.home_cluster
    }

    /// The low-pass block `Φ̃`.
    pub fn lowpass(&self) -> CscMatrix {
        self.matrix.leading_columns(self.num_lowpass)
    }

    pub fn orthonormality_defect(&self) -> f64 {
        self.matrix.orthonormality_defect()
    }

    pub fn verify(&self, tol: f64) -> Result<()> {
        let defect = self.orthonormality_defect();
        if defect < tol {
            Ok(())
        } else {
            Err(Error::Numerical(format!(
                "basis at level {} has ‖ΦᵀΦ − I‖∞ = {defect:e}",
                self.level
            )))
        }
    }
}

/// Difference vectors over `members` (in order): for `k = 2..=m`,
/// `√((m−k+1)/(m−k+2)) · (χ_{k−1} − Σ_{i≥k} χ_i / (m−k+1))`.
fn difference_columns(members: &[usize]) -> Vec<Vec<(usize, f64)>> {
    let m = members.len();
    (2..=m)
        .map(|k| {
            let rest = (m - k + 1) as f64;
            let scale = (rest / (rest + 1.0)).sqrt();
            let mut col = Vec::with_capacity(m - k + 2);
            col.push((members[k - 2], scale));
            let tail = -scale / rest;
            col.extend(members[k - 1..].iter().map(|&v| (v, tail)));
            col
        })
        .collect()
}

/// Basis of the coarsest level for `n` nodes in index order.
pub fn coarsest_basis(n: usize) -> Result<HaarBasis> {
    coarsest_basis_ordered(&(0..n).collect::<Vec<_>>())
}

/// Coarsest basis where the `i`-th indicator refers to node `order[i]`.
pub fn coarsest_basis_ordered(order: &[usize]) -> Result<HaarBasis> {
    let n = order.len();
    if n == 0 {
        return Err(Error::InvalidArgument("coarsest basis needs at least one node".into()));
    }
    let constant = 1.0 / (n as f64).sqrt();
    let mut columns = Vec::with_capacity(n);
    columns.push(order.iter().map(|&v| (v, constant)).collect());
    columns.extend(difference_columns(order));
    Ok(HaarBasis {
        level: 0,
        matrix: CscMatrix::from_columns(n, columns)?,
        num_lowpass: 1,
        creation_level: vec![0; n],
        home_cluster: vec![None; n],
    })
}

/// Extend the level `j − 1` basis to level `j` of the chain.
pub fn extend_basis(coarser: &HaarBasis, chain: &Chain, j: usize) -> Result<HaarBasis> {
    if j == 0 || j > chain.finest() || coarser.level + 1 != j {
        return Err(Error::InvalidChain(format!(
            "cannot extend a level-{} basis to level {j} of a chain with {} levels",
            coarser.level,
            chain.num_levels()
        )));
    }
    let coarse_n = chain.num_nodes(j - 1);
    let n = chain.num_nodes(j);
    if coarser.size() != coarse_n {
        return Err(Error::InvalidChain(format!(
            "basis has {} columns but level {} has {coarse_n} nodes",
            coarser.size(),
            j - 1
        )));
    }
    let inv_sqrt: Vec<f64> = chain
        .cluster_sizes(j)
        .into_iter()
        .map(|xi| 1.0 / (xi as f64).sqrt())
        .collect();

    let mut columns: Vec<Vec<(usize, f64)>> = Vec::with_capacity(n);
    let mut creation_level = Vec::with_capacity(n);
    let mut home_cluster = Vec::with_capacity(n);
    for c in 0..coarse_n {
        let mut col = Vec::new();
        for (p, value) in coarser.matrix.col_iter(c) {
            let scaled = value * inv_sqrt[p];
            col.extend(chain.children(j, p).iter().map(|&v| (v, scaled)));
        }
        columns.push(col);
        creation_level.push(coarser.creation_level[c]);
        home_cluster.push(coarser.home_cluster[c]);
    }
    for &p in &chain.level(j - 1).node_order {
        for col in difference_columns(chain.children(j, p)) {
            columns.push(col);
            creation_level.push(j);
            home_cluster.push(Some(p));
        }
    }
    debug_assert_eq!(columns.len(), n);
    Ok(HaarBasis {
        level: j,
        matrix: CscMatrix::from_columns(n, columns)?,
        num_lowpass: coarse_n,
        creation_level,
        home_cluster,
    })
}

/// Bases for every level, coarsest first; the last one is the global basis
/// of the input graph.
pub fn build_all_bases(chain: &Chain) -> Result<Vec<HaarBasis>> {
    let mut bases = Vec::with_capacity(chain.num_levels());
    bases.push(coarsest_basis_ordered(&chain.level(0).node_order)?);
    for j in 1..chain.num_levels() {
        let next = extend_basis(&bases[j - 1], chain, j)?;
        bases.push(next);
    }
    Ok(bases)
}

/// Upper bound on stored entries: `N · (number of levels) · ξ_max`.
///
/// Valid when the coarsest level is a single node; a wider coarsest level
/// carries a dense triangular block, see [`nnz_bound_general`].
pub fn nnz_bound(chain: &Chain, level: usize) -> usize {
    chain.num_nodes(level) * (level + 1) * chain.max_cluster_size()
}

/// Bound for any chain: `N · (N^{(0)} + level · (ξ_max − 1))`. Each coarsest
/// column touches at most `N` nodes, and the columns created in a cluster of
/// `ξ` children touch its descendants at most `ξ − 1` times in total.
pub fn nnz_bound_general(chain: &Chain, level: usize) -> usize {
    chain.num_nodes(level) * (chain.num_nodes(0) + level * (chain.max_cluster_size() - 1))
}

/// A basis widened to `n_max` columns with zero columns.
#[derive(Debug, Clone, PartialEq)]
pub struct PaddedBasis {
    pub level: usize,
    matrix: CscMatrix,
    num_nodes: usize,
    num_lowpass: usize,
}

impl PaddedBasis {
    pub fn matrix(&self) -> &CscMatrix {
        &self.matrix
    }

    /// Rows of the basis (nodes of the graph at this level).
    pub fn num_nodes(&self) -> usize {
        self.num_nodes
    }

    /// Padded column count `N_max`.
    pub fn width(&self) -> usize {
        self.matrix.cols()
    }

    pub fn num_lowpass(&self) -> usize {
        self.num_lowpass
    }
}

pub fn pad_basis(basis: &HaarBasis, n_max: usize) -> Result<PaddedBasis> {
    if n_max < basis.size() {
        return Err(Error::InvalidArgument(format!(
            "cannot pad a {}-column basis to {n_max} columns",
            basis.size()
        )));
    }
    Ok(PaddedBasis {
        level: basis.level,
        matrix: basis.matrix.pad_columns(n_max)?,
        num_nodes: basis.size(),
        num_lowpass: basis.num_lowpass,
    })
}
