//! Adam with coupled L2 weight decay.

use alloc::vec::Vec;

#[allow(unused_imports)] // inherent float methods win whenever std is linked
use num_traits::Float;

use crate::dense::Matrix;
use crate::{Error, Result};

pub const BETA1: f64 = 0.9;
pub const BETA2: f64 = 0.999;
pub const EPSILON: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq)]
pub struct Adam {
    pub learning_rate: f64,
    pub weight_decay: f64,
    m: Vec<Matrix>,
    v: Vec<Matrix>,
    t: u64,
}

impl Adam {
    pub fn new(learning_rate: f64, weight_decay: f64, shapes: &[(usize, usize)]) -> Self {
        Adam {
            learning_rate,
            weight_decay,
            m: shapes.iter().map(|&(r, c)| Matrix::zeros(r, c)).collect(),
            v: shapes.iter().map(|&(r, c)| Matrix::zeros(r, c)).collect(),
            t: 0,
        }
    }

    pub fn steps(&self) -> u64 {
        self.t
    }

    /// One update. `decay[i]` selects the parameters that receive
    /// `weight_decay · θ` added to their gradient.
    pub fn step(&mut self, params: &mut [&mut Matrix], grads: &[Matrix], decay: &[bool]) -> Result<()> {
        if params.len() != self.m.len() || grads.len() != self.m.len() || decay.len() != self.m.len() {
            return Err(Error::InvalidArgument("optimizer state does not match the parameter list".into()));
        }
        self.t += 1;
        let t = self.t as f64;
        let c1 = 1.0 - BETA1.powf(t);
        let c2 = 1.0 - BETA2.powf(t);
        for i in 0..params.len() {
            let p = &mut *params[i];
            let g = &grads[i];
            if p.shape() != g.shape() || p.shape() != self.m[i].shape() {
                return Err(Error::Shape {
                    op: "Adam::step",
                    expected: self.m[i].shape(),
                    found: g.shape(),
                });
            }
            let wd = if decay[i] { self.weight_decay } else { 0.0 };
            let m = self.m[i].as_mut_slice();
            let v = self.v[i].as_mut_slice();
            for (((theta, &grad), m), v) in p.as_mut_slice().iter_mut().zip(g.as_slice()).zip(m).zip(v) {
                let grad = grad + wd * *theta;
                *m = BETA1 * *m + (1.0 - BETA1) * grad;
                *v = BETA2 * *v + (1.0 - BETA2) * grad * grad;
                let m_hat = *m / c1;
                let v_hat = *v / c2;
                *theta -= self.learning_rate * m_hat / (v_hat.sqrt() + EPSILON);
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn first_step_moves_by_learning_rate() {
        // With bias correction the first step is lr · sign(g).
        let mut p = Matrix::from_vec(1, 3, vec![1.0, -2.0, 0.5]).unwrap();
        let g = Matrix::from_vec(1, 3, vec![0.3, -7.0, 0.0]).unwrap();
        let mut adam = Adam::new(0.01, 0.0, &[(1, 3)]);
        adam.step(&mut [&mut p], &[g], &[true]).unwrap();
        assert!((p[(0, 0)] - 0.99).abs() < 1e-9);
        assert!((p[(0, 1)] + 1.99).abs() < 1e-9);
        assert_eq!(p[(0, 2)], 0.5);
    }

    #[test]
    fn minimises_quadratic() {
        let mut p = Matrix::filled(1, 1, 5.0);
        let mut adam = Adam::new(0.1, 0.0, &[(1, 1)]);
        for _ in 0..500 {
            let g = p.scaled(2.0);
            adam.step(&mut [&mut p], &[g], &[false]).unwrap();
        }
        assert!(p[(0, 0)].abs() < 1e-2);
    }

    #[test]
    fn decay_only_where_selected() {
        let mut a = Matrix::filled(1, 1, 1.0);
        let mut b = Matrix::filled(1, 1, 1.0);
        let mut adam = Adam::new(0.01, 0.5, &[(1, 1), (1, 1)]);
        let zero = Matrix::zeros(1, 1);
        adam.step(&mut [&mut a, &mut b], &[zero.clone(), zero], &[true, false]).unwrap();
        assert!(a[(0, 0)] < 1.0);
        assert_eq!(b[(0, 0)], 1.0);
    }
}
