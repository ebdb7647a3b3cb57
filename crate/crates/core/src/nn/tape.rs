//! Reverse-mode automatic differentiation over dense matrices.
//!
//! Every operation appends a node holding its value; [`Tape::backward`]
//! walks the nodes in reverse and accumulates gradients. Sparse basis
//! matrices enter as borrowed constants, so a tape lives no longer than the
//! bases it references.

use alloc::vec::Vec;

#[allow(unused_imports)] // inherent float methods win whenever std is linked
use num_traits::Float;

use crate::dense::Matrix;
use crate::sparse::CscMatrix;
use crate::{Error, Result};

/// Handle to a node on a [`Tape`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Var(usize);

impl Var {
    pub fn index(self) -> usize {
        self.0
    }
}

enum Op<'a> {
    Leaf,
    MatMul(Var, Var),
    /// `Φ[:, ..keep]ᵀ x`.
    BasisAdjoint {
        basis: &'a CscMatrix,
        keep: usize,
        x: Var,
    },
    /// `Φ c`.
    BasisForward {
        basis: &'a CscMatrix,
        c: Var,
    },
    /// Row `i` of `x` scaled by `g[i]` (`g` is a column vector).
    ScaleRows {
        x: Var,
        g: Var,
    },
    /// `x + 1·b` with `b` a `1 × d` row.
    AddRow {
        x: Var,
        b: Var,
    },
    Add(Var, Var),
    Relu(Var),
    MeanRows(Var),
    VStack(Vec<Var>),
    /// Elementwise product with a constant (dropout masks).
    Mask {
        x: Var,
        mask: Matrix,
    },
    /// Batch normalisation over rows in training mode.
    BatchNorm {
        x: Var,
        gamma: Var,
        beta: Var,
        normalized: Matrix,
        inv_std: Vec<f64>,
    },
    SoftmaxCrossEntropy {
        logits: Var,
        labels: Vec<usize>,
        probs: Matrix,
    },
    Mse {
        pred: Var,
        target: Matrix,
    },
    Mae {
        pred: Var,
        target: Matrix,
    },
}

struct Node<'a> {
    value: Matrix,
    op: Op<'a>,
}

/// Gradients produced by [`Tape::backward`], indexed by [`Var`].
pub struct Gradients {
    grads: Vec<Option<Matrix>>,
}

impl Gradients {
    pub fn get(&self, var: Var) -> Option<&Matrix> {
        self.grads.get(var.0).and_then(Option::as_ref)
    }

    /// Gradient of `var`, zero-filled if nothing flowed into it.
    pub fn get_or_zero(&self, var: Var, shape: (usize, usize)) -> Matrix {
        self.get(var).cloned().unwrap_or_else(|| Matrix::zeros(shape.0, shape.1))
    }
}

#[derive(Default)]
pub struct Tape<'a> {
    nodes: Vec<Node<'a>>,
}

fn shape_err(op: &'static str, expected: (usize, usize), found: (usize, usize)) -> Error {
    Error::Shape {
        op,
        expected,
        found,
    }
}

impl<'a> Tape<'a> {
    pub fn new() -> Self {
        Tape { nodes: Vec::new() }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    fn push(&mut self, value: Matrix, op: Op<'a>) -> Var {
        self.nodes.push(Node { value, op });
        Var(self.nodes.len() - 1)
    }

    pub fn leaf(&mut self, value: Matrix) -> Var {
        self.push(value, Op::Leaf)
    }

    pub fn value(&self, var: Var) -> &Matrix {
        &self.nodes[var.0].value
    }

    /// Scalar value of a `1 × 1` node.
    pub fn scalar(&self, var: Var) -> f64 {
        self.value(var)[(0, 0)]
    }

    pub fn matmul(&mut self, a: Var, b: Var) -> Result<Var> {
        let v = self.value(a).matmul(self.value(b))?;
        Ok(self.push(v, Op::MatMul(a, b)))
    }

    pub fn basis_adjoint(&mut self, basis: &'a CscMatrix, keep: usize, x: Var) -> Result<Var> {
        let v = basis.t_mul_dense_cols(self.value(x), keep)?;
        Ok(self.push(v, Op::BasisAdjoint { basis, keep, x }))
    }

    pub fn basis_forward(&mut self, basis: &'a CscMatrix, c: Var) -> Result<Var> {
        let v = basis.mul_dense(self.value(c))?;
        Ok(self.push(v, Op::BasisForward { basis, c }))
    }

    pub fn scale_rows(&mut self, x: Var, g: Var) -> Result<Var> {
        let (xv, gv) = (self.value(x), self.value(g));
        if gv.cols() != 1 || gv.rows() != xv.rows() {
            return Err(shape_err("scale_rows", (xv.rows(), 1), gv.shape()));
        }
        let mut v = xv.clone();
        for i in 0..v.rows() {
            let s = gv[(i, 0)];
            v.row_mut(i).iter_mut().for_each(|e| *e *= s);
        }
        Ok(self.push(v, Op::ScaleRows { x, g }))
    }

    pub fn add_row(&mut self, x: Var, b: Var) -> Result<Var> {
        let (xv, bv) = (self.value(x), self.value(b));
        if bv.rows() != 1 || bv.cols() != xv.cols() {
            return Err(shape_err("add_row", (1, xv.cols()), bv.shape()));
        }
        let mut v = xv.clone();
        for i in 0..v.rows() {
            for (e, &bb) in v.row_mut(i).iter_mut().zip(bv.row(0)) {
                *e += bb;
            }
        }
        Ok(self.push(v, Op::AddRow { x, b }))
    }

    pub fn add(&mut self, a: Var, b: Var) -> Result<Var> {
        let v = self.value(a).zip_map(self.value(b), |x, y| x + y)?;
        Ok(self.push(v, Op::Add(a, b)))
    }

    pub fn relu(&mut self, x: Var) -> Var {
        let v = self.value(x).map(|e| e.max(0.0));
        self.push(v, Op::Relu(x))
    }

    pub fn mean_rows(&mut self, x: Var) -> Var {
        let v = self.value(x).mean_rows();
        self.push(v, Op::MeanRows(x))
    }

    pub fn vstack(&mut self, parts: &[Var]) -> Result<Var> {
        let refs: Vec<&Matrix> = parts.iter().map(|&p| self.value(p)).collect();
        let v = Matrix::vstack(&refs)?;
        Ok(self.push(v, Op::VStack(parts.to_vec())))
    }

    pub fn mask(&mut self, x: Var, mask: Matrix) -> Result<Var> {
        let v = self.value(x).zip_map(&mask, |a, m| a * m)?;
        Ok(self.push(v, Op::Mask { x, mask }))
    }

    /// Normalise each column over the rows of `x` (batch statistics), then
    /// scale by `gamma` and shift by `beta` (both `1 × d`).
    pub fn batch_norm(&mut self, x: Var, gamma: Var, beta: Var, eps: f64) -> Result<Var> {
        let xv = self.value(x);
        let (n, d) = xv.shape();
        let (gv, bv) = (self.value(gamma), self.value(beta));
        if gv.shape() != (1, d) || bv.shape() != (1, d) {
            return Err(shape_err("batch_norm", (1, d), gv.shape()));
        }
        let mean = xv.mean_rows();
        let mut var = Matrix::zeros(1, d);
        for i in 0..n {
            for c in 0..d {
                let diff = xv[(i, c)] - mean[(0, c)];
                var[(0, c)] += diff * diff;
            }
        }
        let inv_std: Vec<f64> = (0..d)
            .map(|c| 1.0 / (var[(0, c)] / n as f64 + eps).sqrt())
            .collect();
        let normalized = Matrix::from_fn(n, d, |i, c| (xv[(i, c)] - mean[(0, c)]) * inv_std[c]);
        let v = Matrix::from_fn(n, d, |i, c| normalized[(i, c)] * gv[(0, c)] + bv[(0, c)]);
        Ok(self.push(
            v,
            Op::BatchNorm {
                x,
                gamma,
                beta,
                normalized,
                inv_std,
            },
        ))
    }

    /// Mean softmax cross-entropy of the rows of `logits` against `labels`.
    pub fn softmax_cross_entropy(&mut self, logits: Var, labels: &[usize]) -> Result<Var> {
        let lv = self.value(logits);
        let (n, c) = lv.shape();
        if labels.len() != n {
            return Err(shape_err("softmax_cross_entropy", (n, c), (labels.len(), c)));
        }
        if let Some(&bad) = labels.iter().find(|&&l| l >= c) {
            return Err(Error::LabelOutOfRange {
                label: bad,
                num_classes: c,
            });
        }
        let probs = softmax_rows(lv);
        let mut loss = 0.0;
        for (i, &l) in labels.iter().enumerate() {
            loss -= log_softmax_at(lv.row(i), l);
        }
        loss /= n as f64;
        Ok(self.push(
            Matrix::filled(1, 1, loss),
            Op::SoftmaxCrossEntropy {
                logits,
                labels: labels.to_vec(),
                probs,
            },
        ))
    }

    /// Mean squared error over all entries.
    pub fn mse(&mut self, pred: Var, target: &Matrix) -> Result<Var> {
        let loss = mse(self.value(pred), target)?;
        Ok(self.push(
            Matrix::filled(1, 1, loss),
            Op::Mse {
                pred,
                target: target.clone(),
            },
        ))
    }

    /// Mean absolute error over all entries (subgradient 0 at ties).
    pub fn mae(&mut self, pred: Var, target: &Matrix) -> Result<Var> {
        let loss = mae(self.value(pred), target)?;
        Ok(self.push(
            Matrix::filled(1, 1, loss),
            Op::Mae {
                pred,
                target: target.clone(),
            },
        ))
    }

    /// Gradients of the scalar node `output` with respect to every node.
    pub fn backward(&self, output: Var) -> Result<Gradients> {
        let out_shape = self.value(output).shape();
        if out_shape != (1, 1) {
            return Err(shape_err("backward", (1, 1), out_shape));
        }
        let mut grads: Vec<Option<Matrix>> = (0..self.nodes.len()).map(|_| None).collect();
        grads[output.0] = Some(Matrix::filled(1, 1, 1.0));

        for idx in (0..=output.0).rev() {
            let Some(grad) = grads[idx].take() else {
                continue;
            };
            let node = &self.nodes[idx];
            if matches!(node.op, Op::Leaf) {
                grads[idx] = Some(grad);
                continue;
            }
            match &node.op {
                Op::Leaf => {}
                Op::MatMul(a, b) => {
                    let ga = grad.matmul_t(self.value(*b))?;
                    let gb = self.value(*a).t_matmul(&grad)?;
                    accumulate(&mut grads, *a, ga)?;
                    accumulate(&mut grads, *b, gb)?;
                }
                Op::BasisAdjoint { basis, keep, x } => {
                    let gx = basis.mul_dense_cols(&grad, *keep)?;
                    accumulate(&mut grads, *x, gx)?;
                }
                Op::BasisForward { basis, c } => {
                    let gc = basis.t_mul_dense(&grad)?;
                    accumulate(&mut grads, *c, gc)?;
                }
                Op::ScaleRows { x, g } => {
                    let xv = self.value(*x);
                    let gv = self.value(*g);
                    let mut gx = grad.clone();
                    let mut gg = Matrix::zeros(gv.rows(), 1);
                    for i in 0..gx.rows() {
                        let s = gv[(i, 0)];
                        gg[(i, 0)] = grad.row(i).iter().zip(xv.row(i)).map(|(a, b)| a * b).sum();
                        gx.row_mut(i).iter_mut().for_each(|e| *e *= s);
                    }
                    accumulate(&mut grads, *x, gx)?;
                    accumulate(&mut grads, *g, gg)?;
                }
                Op::AddRow { x, b } => {
                    let mut gb = Matrix::zeros(1, grad.cols());
                    for i in 0..grad.rows() {
                        for (o, &g) in gb.row_mut(0).iter_mut().zip(grad.row(i)) {
                            *o += g;
                        }
                    }
                    accumulate(&mut grads, *b, gb)?;
                    accumulate(&mut grads, *x, grad)?;
                }
                Op::Add(a, b) => {
                    accumulate(&mut grads, *a, grad.clone())?;
                    accumulate(&mut grads, *b, grad)?;
                }
                Op::Relu(x) => {
                    let gx = grad.zip_map(&node.value, |g, y| if y > 0.0 { g } else { 0.0 })?;
                    accumulate(&mut grads, *x, gx)?;
                }
                Op::MeanRows(x) => {
                    let n = self.value(*x).rows();
                    let scale = if n == 0 { 0.0 } else { 1.0 / n as f64 };
                    let gx = Matrix::from_fn(n, grad.cols(), |_, c| grad[(0, c)] * scale);
                    accumulate(&mut grads, *x, gx)?;
                }
                Op::VStack(parts) => {
                    let mut start = 0;
                    for &p in parts {
                        let rows = self.value(p).rows();
                        accumulate(&mut grads, p, grad.slice_rows(start, start + rows))?;
                        start += rows;
                    }
                }
                Op::Mask { x, mask } => {
                    let gx = grad.zip_map(mask, |g, m| g * m)?;
                    accumulate(&mut grads, *x, gx)?;
                }
                Op::BatchNorm {
                    x,
                    gamma,
                    beta,
                    normalized,
                    inv_std,
                } => {
                    let (n, d) = normalized.shape();
                    let gv = self.value(*gamma);
                    let mut ggamma = Matrix::zeros(1, d);
                    let mut gbeta = Matrix::zeros(1, d);
                    let mut gx = Matrix::zeros(n, d);
                    let nf = n as f64;
                    for c in 0..d {
                        let mut sum_g = 0.0;
                        let mut sum_gx = 0.0;
                        for i in 0..n {
                            let g = grad[(i, c)];
                            sum_g += g;
                            sum_gx += g * normalized[(i, c)];
                        }
                        ggamma[(0, c)] = sum_gx;
                        gbeta[(0, c)] = sum_g;
                        let k = gv[(0, c)] * inv_std[c] / nf;
                        for i in 0..n {
                            gx[(i, c)] =
                                k * (nf * grad[(i, c)] - sum_g - normalized[(i, c)] * sum_gx);
                        }
                    }
                    accumulate(&mut grads, *x, gx)?;
                    accumulate(&mut grads, *gamma, ggamma)?;
                    accumulate(&mut grads, *beta, gbeta)?;
                }
                Op::SoftmaxCrossEntropy {
                    logits,
                    labels,
                    probs,
                } => {
                    let n = probs.rows() as f64;
                    let up = grad[(0, 0)];
                    let mut gl = probs.clone();
                    for (i, &l) in labels.iter().enumerate() {
                        gl[(i, l)] -= 1.0;
                    }
                    gl.scale(up / n);
                    accumulate(&mut grads, *logits, gl)?;
                }
                Op::Mse { pred, target } => {
                    let count = target.as_slice().len().max(1) as f64;
                    let up = grad[(0, 0)];
                    let gp = self
                        .value(*pred)
                        .zip_map(target, |p, t| 2.0 * (p - t) * up / count)?;
                    accumulate(&mut grads, *pred, gp)?;
                }
                Op::Mae { pred, target } => {
                    let count = target.as_slice().len().max(1) as f64;
                    let up = grad[(0, 0)];
                    let gp = self.value(*pred).zip_map(target, |p, t| {
                        let s = if p > t {
                            1.0
                        } else if p < t {
                            -1.0
                        } else {
                            0.0
                        };
                        s * up / count
                    })?;
                    accumulate(&mut grads, *pred, gp)?;
                }
            }
        }
        if grads[output.0].is_none() {
            grads[output.0] = Some(Matrix::filled(1, 1, 1.0));
        }
        Ok(Gradients { grads })
    }
}

fn accumulate(grads: &mut [Option<Matrix>], var: Var, g: Matrix) -> Result<()> {
    match &mut grads[var.0] {
        Some(existing) => existing.add_assign(&g),
        slot @ None => {
            *slot = Some(g);
            Ok(())
        }
    }
}

fn log_softmax_at(row: &[f64], label: usize) -> f64 {
    let max = row.iter().fold(f64::NEG_INFINITY, |m, &v| m.max(v));
    let lse = max + row.iter().map(|&v| (v - max).exp()).sum::<f64>().ln();
    row[label] - lse
}

/// Row-wise softmax.
pub fn softmax_rows(m: &Matrix) -> Matrix {
    let mut out = m.clone();
    for i in 0..out.rows() {
        let row = out.row_mut(i);
        let max = row.iter().fold(f64::NEG_INFINITY, |a, &v| a.max(v));
        let mut sum = 0.0;
        for v in row.iter_mut() {
            *v = (*v - max).exp();
            sum += *v;
        }
        row.iter_mut().for_each(|v| *v /= sum);
    }
    out
}

/// Mean softmax cross-entropy without a tape.
pub fn softmax_cross_entropy(logits: &Matrix, labels: &[usize]) -> Result<f64> {
    if labels.len() != logits.rows() {
        return Err(shape_err("softmax_cross_entropy", logits.shape(), (labels.len(), logits.cols())));
    }
    let mut loss = 0.0;
    for (i, &l) in labels.iter().enumerate() {
        if l >= logits.cols() {
            return Err(Error::LabelOutOfRange {
                label: l,
                num_classes: logits.cols(),
            });
        }
        loss -= log_softmax_at(logits.row(i), l);
    }
    Ok(loss / labels.len().max(1) as f64)
}

pub fn mse(pred: &Matrix, target: &Matrix) -> Result<f64> {
    let diff = pred.zip_map(target, |p, t| (p - t) * (p - t))?;
    Ok(diff.sum() / diff.as_slice().len().max(1) as f64)
}

pub fn mae(pred: &Matrix, target: &Matrix) -> Result<f64> {
    let diff = pred.zip_map(target, |p, t| (p - t).abs())?;
    Ok(diff.sum() / diff.as_slice().len().max(1) as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn uniform_logits_give_log_c() {
        for c in [2usize, 3, 7] {
            let logits = Matrix::filled(4, c, 0.3);
            let loss = softmax_cross_entropy(&logits, &[0, 1, 0, 1]).unwrap();
            assert!((loss - (c as f64).ln()).abs() < 1e-12);
        }
        assert!(matches!(
            softmax_cross_entropy(&Matrix::zeros(1, 2), &[2]),
            Err(Error::LabelOutOfRange { .. })
        ));
    }

    #[test]
    fn exact_predictions_have_zero_error() {
        let p = Matrix::from_fn(3, 2, |i, j| (i + j) as f64);
        assert_eq!(mse(&p, &p).unwrap(), 0.0);
        assert_eq!(mae(&p, &p).unwrap(), 0.0);
        assert!(mse(&p, &Matrix::zeros(2, 2)).is_err());
    }

    #[test]
    fn matmul_chain_gradient() {
        // loss = mean((x·w)²) → d/dw = 2xᵀ(xw)/n
        let mut tape = Tape::new();
        let x = tape.leaf(Matrix::from_rows(&[vec![1.0, 2.0], vec![3.0, -1.0]]).unwrap());
        let w = tape.leaf(Matrix::from_rows(&[vec![0.5], vec![-0.25]]).unwrap());
        let y = tape.matmul(x, w).unwrap();
        let loss = tape.mse(y, &Matrix::zeros(2, 1)).unwrap();
        let grads = tape.backward(loss).unwrap();
        let xw = [0.0, 1.75];
        let expected = [(1.0 * xw[0] + 3.0 * xw[1]), (2.0 * xw[0] - xw[1])];
        let gw = grads.get(w).unwrap();
        assert!((gw[(0, 0)] - expected[0]).abs() < 1e-12);
        assert!((gw[(1, 0)] - expected[1]).abs() < 1e-12);
        assert!(grads.get(y).is_none());
    }

    #[test]
    fn backward_requires_scalar() {
        let mut tape = Tape::new();
        let x = tape.leaf(Matrix::zeros(2, 2));
        assert!(tape.backward(x).is_err());
    }
}
