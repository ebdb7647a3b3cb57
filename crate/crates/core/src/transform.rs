//! Adjoint, forward and compressive Haar transforms.
//!
//! Each transform has a matrix route (a sparse product with the explicit
//! basis) and a chain route that aggregates child signals level by level.
//! The two are interchangeable; tests hold them to `1e-10`.

use alloc::vec::Vec;

#[allow(unused_imports)] // inherent float methods win whenever std is linked
use num_traits::Float;

use crate::basis::{HaarBasis, PaddedBasis};
use crate::chain::Chain;
use crate::dense::Matrix;
use crate::sparse::CscMatrix;
use crate::{Error, Result};

/// Anything that acts as a basis matrix for the transforms.
pub trait BasisMatrix {
    fn matrix(&self) -> &CscMatrix;
    fn num_lowpass(&self) -> usize;
}

impl BasisMatrix for HaarBasis {
    fn matrix(&self) -> &CscMatrix {
        HaarBasis::matrix(self)
    }
    fn num_lowpass(&self) -> usize {
        HaarBasis::num_lowpass(self)
    }
}

impl BasisMatrix for PaddedBasis {
    fn matrix(&self) -> &CscMatrix {
        PaddedBasis::matrix(self)
    }
    fn num_lowpass(&self) -> usize {
        PaddedBasis::num_lowpass(self)
    }
}

/// `Φᵀ x`. With a padded basis rows past the node count are zero.
pub fn adjoint_haar_dense<B: BasisMatrix + ?Sized>(basis: &B, x: &Matrix) -> Result<Matrix> {
    basis.matrix().t_mul_dense(x)
}

/// `Φ c`.
pub fn forward_haar<B: BasisMatrix + ?Sized>(basis: &B, c: &Matrix) -> Result<Matrix> {
    basis.matrix().mul_dense(c)
}

/// `Φ̃ᵀ x` with `Φ̃` the leading `keep` (low-pass) columns.
pub fn compressive_haar<B: BasisMatrix + ?Sized>(basis: &B, x: &Matrix, keep: usize) -> Result<Matrix> {
    if keep != basis.num_lowpass() {
        return Err(Error::InvalidArgument(alloc::format!(
            "pooling keeps {keep} rows but the basis has {} low-pass columns",
            basis.num_lowpass()
        )));
    }
    basis.matrix().t_mul_dense_cols(x, keep)
}

/// `(‖low-pass‖², ‖high-pass‖²)` of a coefficient matrix.
pub fn energy_split(coefficients: &Matrix, num_lowpass: usize) -> (f64, f64) {
    let mut low = 0.0;
    let mut high = 0.0;
    for i in 0..coefficients.rows() {
        let e: f64 = coefficients.row(i).iter().map(|v| v * v).sum();
        if i < num_lowpass {
            low += e;
        } else {
            high += e;
        }
    }
    (low, high)
}

/// Per-level child weights `ω = 1/√ξ` and their products down to the finest
/// level.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightCache {
    /// `omega[j][p]` for a level `j − 1` parent `p`; `omega[0]` is empty.
    pub omega: Vec<Vec<f64>>,
    /// `cumulative[i][v] = ∏_{m=i+1}^{J} omega[m][anc_{m−1}(v)]` for finest `v`.
    pub cumulative: Vec<Vec<f64>>,
    /// `ancestors[i][v]`: level-`i` ancestor of finest node `v`.
    pub ancestors: Vec<Vec<usize>>,
}

impl WeightCache {
    pub fn new(chain: &Chain) -> Self {
        let levels = chain.num_levels();
        let finest = chain.finest();
        let mut omega = Vec::with_capacity(levels);
        omega.push(Vec::new());
        for j in 1..levels {
            omega.push(
                chain
                    .cluster_sizes(j)
                    .into_iter()
                    .map(|xi| 1.0 / (xi as f64).sqrt())
                    .collect(),
            );
        }
        let ancestors: Vec<Vec<usize>> = (0..levels).map(|i| chain.ancestors(i)).collect();
        let n = chain.num_nodes(finest);
        let mut cumulative = alloc::vec![alloc::vec![1.0; n]; levels];
        for i in (0..finest).rev() {
            for v in 0..n {
                let parent = ancestors[i][v];
                cumulative[i][v] = cumulative[i + 1][v] * omega[i + 1][parent];
            }
        }
        WeightCache {
            omega,
            cumulative,
            ancestors,
        }
    }
}

fn check_rows(x: &Matrix, rows: usize, op: &'static str) -> Result<()> {
    if x.rows() != rows {
        return Err(Error::Shape {
            op,
            expected: (rows, x.cols()),
            found: x.shape(),
        });
    }
    Ok(())
}

/// Bottom-up weighted sums `S^{(j−1)}_p = ω_p Σ_{children v} S^{(j)}_v`,
/// starting from `S^{(top)} = x` at level `top`. Entry `i` is `S^{(i)}`.
pub fn weighted_sums(chain: &Chain, top: usize, x: &Matrix) -> Result<Vec<Matrix>> {
    check_rows(x, chain.num_nodes(top), "weighted_sums")?;
    let d = x.cols();
    let mut sums: Vec<Matrix> = Vec::with_capacity(top + 1);
    sums.push(x.clone());
    for j in (1..=top).rev() {
        let fine = sums.last().unwrap();
        let coarse_n = chain.num_nodes(j - 1);
        let mut coarse = Matrix::zeros(coarse_n, d);
        let parent = &chain.level(j).parent;
        for v in 0..fine.rows() {
            for (o, &s) in coarse.row_mut(parent[v]).iter_mut().zip(fine.row(v)) {
                *o += s;
            }
        }
        let sizes = chain.cluster_sizes(j);
        for (p, xi) in sizes.into_iter().enumerate() {
            let w = 1.0 / (xi as f64).sqrt();
            coarse.row_mut(p).iter_mut().for_each(|o| *o *= w);
        }
        sums.push(coarse);
    }
    sums.reverse();
    Ok(sums)
}

fn check_bases(chain: &Chain, bases: &[HaarBasis], top: usize) -> Result<()> {
    if bases.len() <= top || top > chain.finest() {
        return Err(Error::InvalidChain(alloc::format!(
            "need bases for levels 0..={top}, have {}",
            bases.len()
        )));
    }
    for (j, b) in bases.iter().enumerate().take(top + 1) {
        if b.level != j || b.size() != chain.num_nodes(j) {
            return Err(Error::InvalidChain(alloc::format!(
                "basis {j} does not belong to this chain"
            )));
        }
    }
    Ok(())
}

/// Columns `first..` of `basis` dotted with `signal`.
fn highpass_coefficients(basis: &CscMatrix, first: usize, signal: &Matrix) -> Matrix {
    let d = signal.cols();
    let mut out = Matrix::zeros(basis.cols() - first, d);
    for c in first..basis.cols() {
        let row = out.row_mut(c - first);
        for (v, w) in basis.col_iter(c) {
            for (o, &s) in row.iter_mut().zip(signal.row(v)) {
                *o += w * s;
            }
        }
    }
    out
}

/// Chain-route adjoint transform of a signal living on level `top`.
///
/// Returns `Φ^{(i)ᵀ} S^{(i)}` for every `i ≤ top`. Each level reuses the
/// coarser coefficients for its lifted block and only evaluates its own
/// within-cluster columns, which touch `ξ` entries each.
pub fn adjoint_haar_fast_at(
    chain: &Chain,
    bases: &[HaarBasis],
    top: usize,
    x: &Matrix,
) -> Result<Vec<Matrix>> {
    check_bases(chain, bases, top)?;
    let sums = weighted_sums(chain, top, x)?;
    let mut coeffs: Vec<Matrix> = Vec::with_capacity(top + 1);
    coeffs.push(bases[0].matrix().t_mul_dense(&sums[0])?);
    for j in 1..=top {
        let basis = &bases[j];
        let high = highpass_coefficients(basis.matrix(), basis.num_lowpass(), &sums[j]);
        let stacked = Matrix::vstack(&[&coeffs[j - 1], &high])?;
        coeffs.push(stacked);
    }
    Ok(coeffs)
}

/// Chain-route adjoint transform of a finest-level signal, one coefficient
/// matrix per level (coarsest first).
pub fn adjoint_haar_fast(chain: &Chain, bases: &[HaarBasis], x: &Matrix) -> Result<Vec<Matrix>> {
    adjoint_haar_fast_at(chain, bases, chain.finest(), x)
}

/// Chain-route compressive transform at level `j ≥ 1`: the signal is
/// pre-gathered onto level `j − 1` and transformed there.
pub fn compressive_haar_fast(
    chain: &Chain,
    bases: &[HaarBasis],
    j: usize,
    x: &Matrix,
) -> Result<Matrix> {
    if j == 0 {
        return Err(Error::InvalidArgument("the coarsest level cannot be pooled".into()));
    }
    let mut coeffs = adjoint_haar_fast_at(chain, bases, j, x)?;
    coeffs.truncate(j);
    Ok(coeffs.pop().unwrap())
}

/// Chain-route forward transform from finest-level coefficients.
///
/// The columns created at level `i` are combined on level `i` and carried to
/// each finest node with its cumulative weight product.
pub fn forward_haar_fast(
    chain: &Chain,
    bases: &[HaarBasis],
    cache: &WeightCache,
    c: &Matrix,
) -> Result<Matrix> {
    let finest = chain.finest();
    check_bases(chain, bases, finest)?;
    let n = chain.num_nodes(finest);
    check_rows(c, n, "forward_haar_fast")?;
    let d = c.cols();
    let mut out = Matrix::zeros(n, d);
    for (i, basis) in bases.iter().enumerate().take(finest + 1) {
        let first = if i == 0 { 0 } else { basis.num_lowpass() };
        let created = c.slice_rows(first, basis.size());
        let mut local = Matrix::zeros(basis.size(), d);
        for col in first..basis.size() {
            let coef = created.row(col - first);
            if coef.iter().all(|&v| v == 0.0) {
                continue;
            }
            for (u, w) in basis.matrix().col_iter(col) {
                for (o, &cv) in local.row_mut(u).iter_mut().zip(coef) {
                    *o += w * cv;
                }
            }
        }
        for v in 0..n {
            let anc = cache.ancestors[i][v];
            let scale = cache.cumulative[i][v];
            for (o, &l) in out.row_mut(v).iter_mut().zip(local.row(anc)) {
                *o += scale * l;
            }
        }
    }
    Ok(out)
}

/// Energy of a matrix, for Parseval checks.
pub fn energy(x: &Matrix) -> f64 {
    x.frobenius_sq()
}

/// Largest relative Parseval defect `|‖Φᵀx‖² − ‖x‖²| / max(‖x‖², 1)`.
pub fn parseval_defect<B: BasisMatrix + ?Sized>(basis: &B, x: &Matrix) -> Result<f64> {
    let c = adjoint_haar_dense(basis, x)?;
    let ex = energy(x);
    Ok((energy(&c) - ex).abs() / ex.max(1.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basis::build_all_bases;
    use crate::chain::ChainLevel;
    use alloc::vec;

    fn classical() -> (Chain, Vec<HaarBasis>) {
        let lvl0 = ChainLevel {
            adjacency: CscMatrix::empty(1, 1),
            parent: Vec::new(),
            node_order: vec![0],
        };
        let lvl1 = ChainLevel {
            adjacency: CscMatrix::empty(2, 2),
            parent: vec![0, 0],
            node_order: vec![0, 1],
        };
        let lvl2 = ChainLevel {
            adjacency: CscMatrix::empty(4, 4),
            parent: vec![0, 0, 1, 1],
            node_order: vec![0, 1, 2, 3],
        };
        let chain = Chain::from_levels(vec![lvl0, lvl1, lvl2]).unwrap();
        let bases = build_all_bases(&chain).unwrap();
        (chain, bases)
    }

    #[test]
    fn adjoint_of_ones() {
        let (_, bases) = classical();
        let c = adjoint_haar_dense(&bases[2], &Matrix::filled(4, 1, 1.0)).unwrap();
        let expected = [2.0, 0.0, 0.0, 0.0];
        for (a, b) in c.as_slice().iter().zip(expected) {
            assert!((a - b).abs() < 1e-15);
        }
    }

    #[test]
    fn basis_column_maps_to_unit_coefficient() {
        let (_, bases) = classical();
        let dense = bases[2].matrix().to_dense();
        for k in 0..4 {
            let col = Matrix::column_vector(&dense.column(k));
            let c = adjoint_haar_dense(&bases[2], &col).unwrap();
            for i in 0..4 {
                let target = if i == k { 1.0 } else { 0.0 };
                assert!((c[(i, 0)] - target).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn weighted_sum_example() {
        let (chain, _) = classical();
        let x = Matrix::column_vector(&[1.0, 2.0, 3.0, 4.0]);
        let sums = weighted_sums(&chain, 2, &x).unwrap();
        assert!((sums[1][(0, 0)] - 3.0 / 2f64.sqrt()).abs() < 1e-15);
        assert!((sums[1][(1, 0)] - 7.0 / 2f64.sqrt()).abs() < 1e-15);
        assert!((sums[1][(0, 0)] - 2.1213).abs() < 1e-4);
        assert!((sums[1][(1, 0)] - 4.9497).abs() < 1e-4);
    }

    #[test]
    fn pooling_example_and_errors() {
        let (chain, bases) = classical();
        let x = Matrix::column_vector(&[1.0, 2.0, 3.0, 4.0]);
        let pooled = compressive_haar(&bases[2], &x, 2).unwrap();
        assert!((pooled[(0, 0)] - 5.0).abs() < 1e-14);
        assert!((pooled[(1, 0)] + 2.0).abs() < 1e-14);
        assert!(compressive_haar(&bases[2], &x, 3).is_err());
        let fast = compressive_haar_fast(&chain, &bases, 2, &x).unwrap();
        assert!(fast.max_abs_diff(&pooled).unwrap() < 1e-14);
        assert!(adjoint_haar_dense(&bases[2], &Matrix::zeros(3, 1)).is_err());
    }

    #[test]
    fn forward_of_first_unit_vector() {
        let (chain, bases) = classical();
        let e1 = Matrix::column_vector(&[1.0, 0.0, 0.0, 0.0]);
        let y = forward_haar(&bases[2], &e1).unwrap();
        assert!(y.as_slice().iter().all(|&v| (v - 0.5).abs() < 1e-15));
        let cache = WeightCache::new(&chain);
        let fast = forward_haar_fast(&chain, &bases, &cache, &e1).unwrap();
        assert!(fast.max_abs_diff(&y).unwrap() < 1e-15);
        assert_eq!(forward_haar(&bases[2], &Matrix::zeros(4, 2)).unwrap(), Matrix::zeros(4, 2));
    }

    #[test]
    fn weight_cache_values() {
        let (chain, _) = classical();
        let cache = WeightCache::new(&chain);
        let s = core::f64::consts::FRAC_1_SQRT_2;
        assert!(cache.omega[2].iter().chain(&cache.omega[1]).all(|&w| (w - s).abs() < 1e-15));
        assert_eq!((cache.omega[2].len(), cache.omega[1].len()), (2, 1));
        assert!(cache.cumulative[0].iter().all(|&w| (w - 0.5).abs() < 1e-15));
        assert!(cache.cumulative[2].iter().all(|&w| w == 1.0));
    }
}
