//! HaarConv and HaarPool layers plus the dense pieces of the MLP head.

use alloc::vec::Vec;

#[allow(unused_imports)] // inherent float methods win whenever std is linked
use num_traits::Float;

use crate::basis::PaddedBasis;
use crate::dense::Matrix;
use crate::nn::tape::{Tape, Var};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Activation {
    Relu,
    Identity,
}

impl Activation {
    pub fn apply(self, tape: &mut Tape<'_>, x: Var) -> Var {
        match self {
            Activation::Relu => tape.relu(x),
            Activation::Identity => x,
        }
    }
}

/// Uniform Glorot initialisation, `U(-a, a)` with `a = √(6 / (fan_in + fan_out))`.
pub fn glorot_uniform<R: rand::Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> Matrix {
    let a = (6.0 / (rows + cols).max(1) as f64).sqrt();
    Matrix::from_fn(rows, cols, |_, _| rng.gen_range(-a..=a))
}

/// `σ(Φ diag(G) Φᵀ (x W))` on the tape.
///
/// `g` is an `n_max × 1` column; the basis must have exactly `n_max` columns
/// and one row per row of `x`.
pub fn haar_conv<'a>(
    tape: &mut Tape<'a>,
    basis: &'a PaddedBasis,
    x: Var,
    w: Var,
    g: Var,
    activation: Activation,
) -> Result<Var> {
    let rows = tape.value(x).rows();
    if basis.num_nodes() != rows {
        return Err(Error::Shape {
            op: "haar_conv",
            expected: (basis.num_nodes(), tape.value(x).cols()),
            found: tape.value(x).shape(),
        });
    }
    let glen = tape.value(g).shape();
    if glen != (basis.width(), 1) {
        return Err(Error::Shape {
            op: "haar_conv filter",
            expected: (basis.width(), 1),
            found: glen,
        });
    }
    let xw = tape.matmul(x, w)?;
    let c = tape.basis_adjoint(basis.matrix(), basis.width(), xw)?;
    let filtered = tape.scale_rows(c, g)?;
    let y = tape.basis_forward(basis.matrix(), filtered)?;
    Ok(activation.apply(tape, y))
}

/// `Φ̃ᵀ x`: keeps the low-pass coefficients, one row per coarser node.
pub fn haar_pool<'a>(tape: &mut Tape<'a>, basis: &'a PaddedBasis, x: Var) -> Result<Var> {
    if basis.num_nodes() != tape.value(x).rows() {
        return Err(Error::Shape {
            op: "haar_pool",
            expected: (basis.num_nodes(), tape.value(x).cols()),
            found: tape.value(x).shape(),
        });
    }
    tape.basis_adjoint(basis.matrix(), basis.num_lowpass(), x)
}

/// A standalone convolution layer.
#[derive(Debug, Clone, PartialEq)]
pub struct HaarConvLayer {
    pub weight: Matrix,
    /// Diagonal of the spectral filter, stored as an `n_max × 1` column.
    pub filter: Matrix,
    pub activation: Activation,
}

impl HaarConvLayer {
    pub fn new<R: rand::Rng + ?Sized>(
        d_in: usize,
        d_out: usize,
        n_max: usize,
        activation: Activation,
        rng: &mut R,
    ) -> Self {
        HaarConvLayer {
            weight: glorot_uniform(d_in, d_out, rng),
            filter: Matrix::filled(n_max, 1, 1.0),
            activation,
        }
    }

    /// Registers the parameters as leaves and applies the layer.
    /// Returns `(output, weight, filter)`.
    pub fn forward<'a>(
        &self,
        tape: &mut Tape<'a>,
        basis: &'a PaddedBasis,
        x: Var,
    ) -> Result<(Var, Var, Var)> {
        let w = tape.leaf(self.weight.clone());
        let g = tape.leaf(self.filter.clone());
        let y = haar_conv(tape, basis, x, w, g, self.activation)?;
        Ok((y, w, g))
    }

    /// Evaluation without a tape.
    pub fn apply(&self, basis: &PaddedBasis, x: &Matrix) -> Result<Matrix> {
        let mut tape = Tape::new();
        let xv = tape.leaf(x.clone());
        let (y, _, _) = self.forward(&mut tape, basis, xv)?;
        Ok(tape.value(y).clone())
    }
}

/// Inverted dropout mask: entries kept with probability `1 − p` and scaled
/// by `1 / (1 − p)`.
pub fn dropout_mask<R: rand::Rng + ?Sized>(rows: usize, cols: usize, p: f64, rng: &mut R) -> Matrix {
    if p <= 0.0 {
        return Matrix::filled(rows, cols, 1.0);
    }
    let keep = 1.0 - p;
    Matrix::from_fn(rows, cols, |_, _| {
        if rng.gen::<f64>() < keep {
            1.0 / keep
        } else {
            0.0
        }
    })
}

/// Batch-norm epsilon.
pub const BN_EPS: f64 = 1e-5;
/// Weight of the newest batch in the running statistics.
pub const BN_MOMENTUM: f64 = 0.1;

/// Running statistics used by batch norm at evaluation time.
#[derive(Debug, Clone, PartialEq)]
pub struct RunningStats {
    pub mean: Vec<f64>,
    pub var: Vec<f64>,
}

impl RunningStats {
    pub fn new(dim: usize) -> Self {
        RunningStats {
            mean: alloc::vec![0.0; dim],
            var: alloc::vec![1.0; dim],
        }
    }

    /// Blend in the statistics of a batch (biased variance, as used for
    /// normalisation).
    pub fn update(&mut self, batch: &Matrix) {
        let n = batch.rows();
        if n == 0 {
            return;
        }
        let mean = batch.mean_rows();
        for c in 0..batch.cols() {
            let m = mean[(0, c)];
            let v = (0..n).map(|i| (batch[(i, c)] - m).powi(2)).sum::<f64>() / n as f64;
            self.mean[c] = (1.0 - BN_MOMENTUM) * self.mean[c] + BN_MOMENTUM * m;
            self.var[c] = (1.0 - BN_MOMENTUM) * self.var[c] + BN_MOMENTUM * v;
        }
    }

    /// Evaluation-mode normalisation on the tape, as an affine map.
    pub fn apply<'a>(&self, tape: &mut Tape<'a>, x: Var, gamma: Var, beta: Var) -> Result<Var> {
        let d = self.mean.len();
        let gv = tape.value(gamma).clone();
        let bv = tape.value(beta).clone();
        let scale = Matrix::from_fn(d, 1, |c, _| gv[(0, c)] / (self.var[c] + BN_EPS).sqrt());
        let shift = Matrix::from_fn(1, d, |_, c| bv[(0, c)] - self.mean[c] * scale[(c, 0)]);
        let s = tape.leaf(Matrix::from_fn(d, d, |a, b| if a == b { scale[(a, 0)] } else { 0.0 }));
        let y = tape.matmul(x, s)?;
        let sh = tape.leaf(shift);
        tape.add_row(y, sh)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basis::{build_all_bases, pad_basis};
    use crate::chain::{build_chain_from_adjacency, ChainParams};
    use crate::sparse::CscMatrix;

    fn ring(n: usize) -> CscMatrix {
        CscMatrix::from_triplets(
            n,
            n,
            (0..n).flat_map(|i| [(i, (i + 1) % n, 1.0), ((i + 1) % n, i, 1.0)]),
        )
        .unwrap()
    }

    #[test]
    fn identity_filter_is_affine_map() {
        let chain = build_chain_from_adjacency(&ring(9), &ChainParams::default()).unwrap();
        let bases = build_all_bases(&chain).unwrap();
        let padded = pad_basis(&bases[chain.finest()], 14).unwrap();
        let mut rng = crate::rng_from_seed(4);
        let layer = HaarConvLayer::new(3, 2, 14, Activation::Identity, &mut rng);
        let x = glorot_uniform(9, 3, &mut rng);
        let y = layer.apply(&padded, &x).unwrap();
        let expected = x.matmul(&layer.weight).unwrap();
        assert!(y.max_abs_diff(&expected).unwrap() < 1e-12);

        let zero = layer.apply(&padded, &Matrix::zeros(9, 3)).unwrap();
        assert_eq!(zero.max_abs(), 0.0);
    }

    #[test]
    fn shape_errors() {
        let chain = build_chain_from_adjacency(&ring(6), &ChainParams::default()).unwrap();
        let bases = build_all_bases(&chain).unwrap();
        let padded = pad_basis(&bases[chain.finest()], 6).unwrap();
        let mut rng = crate::rng_from_seed(1);
        let layer = HaarConvLayer::new(2, 2, 7, Activation::Relu, &mut rng);
        assert!(layer.apply(&padded, &Matrix::zeros(6, 2)).is_err());
        let layer = HaarConvLayer::new(2, 2, 6, Activation::Relu, &mut rng);
        assert!(layer.apply(&padded, &Matrix::zeros(5, 2)).is_err());
    }

    #[test]
    fn dropout_mask_is_inverted() {
        let mut rng = crate::rng_from_seed(0);
        let m = dropout_mask(50, 40, 0.25, &mut rng);
        assert!(m.as_slice().iter().all(|&v| v == 0.0 || (v - 4.0 / 3.0).abs() < 1e-15));
        let mean = m.sum() / 2000.0;
        assert!((mean - 1.0).abs() < 0.1);
        assert_eq!(dropout_mask(2, 2, 0.0, &mut rng), Matrix::filled(2, 2, 1.0));
    }
}
