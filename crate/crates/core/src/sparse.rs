//! Compressed sparse column storage.
//!
//! Used for both the symmetric graph adjacencies (where CSC and CSR coincide)
//! and the Haar basis matrices. Row indices inside a column are strictly
//! increasing and explicit zeros are never stored.

use alloc::vec;
use alloc::vec::Vec;

use crate::dense::Matrix;
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct CscMatrix {
    rows: usize,
    cols: usize,
    col_ptr: Vec<usize>,
    row_idx: Vec<usize>,
    values: Vec<f64>,
}

impl CscMatrix {
    pub fn empty(rows: usize, cols: usize) -> Self {
        CscMatrix {
            rows,
            cols,
            col_ptr: vec![0; cols + 1],
            row_idx: Vec::new(),
            values: Vec::new(),
        }
    }

    /// Assemble from `(row, col, value)` triplets. Duplicates are summed and
    /// entries that end up exactly zero are dropped.
    pub fn from_triplets(
        rows: usize,
        cols: usize,
        triplets: impl IntoIterator<Item = (usize, usize, f64)>,
    ) -> Result<Self> {
        let mut entries: Vec<(usize, usize, f64)> = triplets.into_iter().collect();
        for &(r, c, _) in &entries {
            if r >= rows || c >= cols {
                return Err(Error::InvalidArgument(alloc::format!(
                    "triplet ({r}, {c}) outside a {rows}x{cols} matrix"
                )));
            }
        }
        entries.sort_unstable_by(|a, b| (a.1, a.0).cmp(&(b.1, b.0)));
        let mut col_ptr = vec![0usize; cols + 1];
        let mut row_idx = Vec::with_capacity(entries.len());
        let mut values: Vec<f64> = Vec::with_capacity(entries.len());
        let mut last: Option<(usize, usize)> = None;
        let mut cols_of: Vec<usize> = Vec::with_capacity(entries.len());
        for (r, c, v) in entries {
            if last == Some((r, c)) {
                *values.last_mut().unwrap() += v;
            } else {
                row_idx.push(r);
                values.push(v);
                cols_of.push(c);
                last = Some((r, c));
            }
        }
        let mut kept_rows = Vec::with_capacity(row_idx.len());
        let mut kept_vals = Vec::with_capacity(values.len());
        for ((r, v), c) in row_idx.into_iter().zip(values).zip(cols_of) {
            if v != 0.0 {
                kept_rows.push(r);
                kept_vals.push(v);
                col_ptr[c + 1] += 1;
            }
        }
        for c in 0..cols {
            col_ptr[c + 1] += col_ptr[c];
        }
        Ok(CscMatrix {
            rows,
            cols,
            col_ptr,
            row_idx: kept_rows,
            values: kept_vals,
        })
    }

    /// Assemble from per-column `(row, value)` lists, in column order.
    pub fn from_columns(rows: usize, columns: Vec<Vec<(usize, f64)>>) -> Result<Self> {
        let cols = columns.len();
        let mut col_ptr = Vec::with_capacity(cols + 1);
        col_ptr.push(0);
        let mut row_idx = Vec::new();
        let mut values = Vec::new();
        for (c, mut column) in columns.into_iter().enumerate() {
            column.sort_unstable_by_key(|e| e.0);
            for w in column.windows(2) {
                if w[0].0 == w[1].0 {
                    return Err(Error::InvalidArgument(alloc::format!(
                        "duplicate row {} in column {c}",
                        w[0].0
                    )));
                }
            }
            for (r, v) in column {
                if r >= rows {
                    return Err(Error::InvalidArgument(alloc::format!(
                        "row {r} outside a matrix with {rows} rows"
                    )));
                }
                if v != 0.0 {
                    row_idx.push(r);
                    values.push(v);
                }
            }
            col_ptr.push(row_idx.len());
        }
        Ok(CscMatrix {
            rows,
            cols,
            col_ptr,
            row_idx,
            values,
        })
    }

    /// Rebuild from raw compressed arrays, validating the layout.
    pub fn from_raw(
        rows: usize,
        cols: usize,
        col_ptr: Vec<usize>,
        row_idx: Vec<usize>,
        values: Vec<f64>,
    ) -> Result<Self> {
        let bad = |msg: &str| Err(Error::InvalidArgument(alloc::format!("csc layout: {msg}")));
        if col_ptr.len() != cols + 1 || col_ptr[0] != 0 {
            return bad("column pointer length");
        }
        if row_idx.len() != values.len() || *col_ptr.last().unwrap() != row_idx.len() {
            return bad("nnz mismatch");
        }
        for c in 0..cols {
            if col_ptr[c] > col_ptr[c + 1] {
                return bad("column pointers decrease");
            }
            let rs = &row_idx[col_ptr[c]..col_ptr[c + 1]];
            if rs.iter().any(|&r| r >= rows) || rs.windows(2).any(|w| w[0] >= w[1]) {
                return bad("row indices out of range or unsorted");
            }
        }
        Ok(CscMatrix {
            rows,
            cols,
            col_ptr,
            row_idx,
            values,
        })
    }

    pub fn from_dense(m: &Matrix) -> Self {
        let columns = (0..m.cols())
            .map(|j| {
                (0..m.rows())
                    .filter(|&i| m[(i, j)] != 0.0)
                    .map(|i| (i, m[(i, j)]))
                    .collect()
            })
            .collect();
        Self::from_columns(m.rows(), columns).expect("dense matrix is a valid layout")
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn col_ptr(&self) -> &[usize] {
        &self.col_ptr
    }

    pub fn row_indices(&self) -> &[usize] {
        &self.row_idx
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Row indices and values of column `j`.
    #[inline]
    pub fn col(&self, j: usize) -> (&[usize], &[f64]) {
        let range = self.col_ptr[j]..self.col_ptr[j + 1];
        (&self.row_idx[range.clone()], &self.values[range])
    }

    pub fn col_iter(&self, j: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let (r, v) = self.col(j);
        r.iter().copied().zip(v.iter().copied())
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let (rows, vals) = self.col(j);
        match rows.binary_search(&i) {
            Ok(k) => vals[k],
            Err(_) => 0.0,
        }
    }

    /// All stored entries as `(row, col, value)`, column-major.
    pub fn triplets(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.cols).flat_map(move |j| self.col_iter(j).map(move |(i, v)| (i, j, v)))
    }

    pub fn to_dense(&self) -> Matrix {
        let mut m = Matrix::zeros(self.rows, self.cols);
        for (i, j, v) in self.triplets() {
            m[(i, j)] = v;
        }
        m
    }

    pub fn transpose(&self) -> CscMatrix {
        CscMatrix::from_triplets(self.cols, self.rows, self.triplets().map(|(i, j, v)| (j, i, v)))
            .expect("transpose stays in bounds")
    }

    /// `selfᵀ · x`, an `cols × d` result.
    pub fn t_mul_dense(&self, x: &Matrix) -> Result<Matrix> {
        self.t_mul_dense_cols(x, self.cols)
    }

    /// `selfᵀ · x` restricted to the first `keep` columns of `self`.
    pub fn t_mul_dense_cols(&self, x: &Matrix, keep: usize) -> Result<Matrix> {
        if x.rows() != self.rows || keep > self.cols {
            return Err(Error::Shape {
                op: "sparse transpose product",
                expected: (self.rows, x.cols()),
                found: x.shape(),
            });
        }
        let d = x.cols();
        let mut out = Matrix::zeros(keep, d);
        for j in 0..keep {
            let out_row = out.row_mut(j);
            for (i, v) in self.col_iter(j) {
                for (o, &xv) in out_row.iter_mut().zip(x.row(i)) {
                    *o += v * xv;
                }
            }
        }
        Ok(out)
    }

    /// `self · c`, a `rows × d` result.
    pub fn mul_dense(&self, c: &Matrix) -> Result<Matrix> {
        self.mul_dense_cols(c, self.cols)
    }

    /// `self[:, ..c.rows()] · c`: only the first `c.rows()` columns take part,
    /// which is what the pooling backward pass needs.
    pub fn mul_dense_cols(&self, c: &Matrix, used: usize) -> Result<Matrix> {
        if c.rows() != used || used > self.cols {
            return Err(Error::Shape {
                op: "sparse product",
                expected: (used, c.cols()),
                found: c.shape(),
            });
        }
        let d = c.cols();
        let mut out = Matrix::zeros(self.rows, d);
        for j in 0..used {
            let c_row = c.row(j);
            if c_row.iter().all(|&v| v == 0.0) {
                continue;
            }
            for (i, v) in self.col_iter(j) {
                for (o, &cv) in out.row_mut(i).iter_mut().zip(c_row) {
                    *o += v * cv;
                }
            }
        }
        Ok(out)
    }

    /// Append all-zero columns up to `cols` total.
    pub fn pad_columns(&self, cols: usize) -> Result<CscMatrix> {
        if cols < self.cols {
            return Err(Error::InvalidArgument(alloc::format!(
                "cannot pad {} columns down to {cols}",
                self.cols
            )));
        }
        let mut padded = self.clone();
        padded.col_ptr.resize(cols + 1, self.nnz());
        padded.cols = cols;
        Ok(padded)
    }

    /// The leading `keep` columns.
    pub fn leading_columns(&self, keep: usize) -> CscMatrix {
        let keep = keep.min(self.cols);
        let end = self.col_ptr[keep];
        CscMatrix {
            rows: self.rows,
            cols: keep,
            col_ptr: self.col_ptr[..=keep].to_vec(),
            row_idx: self.row_idx[..end].to_vec(),
            values: self.values[..end].to_vec(),
        }
    }

    /// Move row `i` to row `perm[i]`.
    pub fn permute_rows(&self, perm: &[usize]) -> Result<CscMatrix> {
        if perm.len() != self.rows {
            return Err(Error::InvalidArgument("row permutation length".into()));
        }
        CscMatrix::from_triplets(
            self.rows,
            self.cols,
            self.triplets().map(|(i, j, v)| (perm[i], j, v)),
        )
    }

    /// Column sums. For a symmetric adjacency this is the weighted degree.
    pub fn column_sums(&self) -> Vec<f64> {
        (0..self.cols)
            .map(|j| self.col(j).1.iter().sum())
            .collect()
    }

    pub fn is_symmetric(&self) -> bool {
        self.rows == self.cols && self.triplets().all(|(i, j, v)| self.get(j, i) == v)
    }

    /// `‖selfᵀ·self − I‖∞` computed from sparse column dot products.
    pub fn orthonormality_defect(&self) -> f64 {
        // Dense scatter of one column at a time keeps this O(cols · nnz).
        let mut scratch = vec![0.0f64; self.rows];
        let mut worst = 0.0f64;
        for a in 0..self.cols {
            for (i, v) in self.col_iter(a) {
                scratch[i] = v;
            }
            for b in 0..self.cols {
                let dot: f64 = self.col_iter(b).map(|(i, v)| scratch[i] * v).sum();
                let target = if a == b { 1.0 } else { 0.0 };
                let err = num_traits::Float::abs(dot - target);
                if err > worst {
                    worst = err;
                }
            }
            for (i, _) in self.col_iter(a) {
                scratch[i] = 0.0;
            }
        }
        worst
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn triplets_sum_duplicates_and_drop_zeros() {
        let m = CscMatrix::from_triplets(
            3,
            3,
            vec![(0, 1, 1.0), (0, 1, 2.0), (2, 0, 1.0), (2, 0, -1.0), (1, 2, 5.0)],
        )
        .unwrap();
        assert_eq!(m.nnz(), 2);
        assert_eq!(m.get(0, 1), 3.0);
        assert_eq!(m.get(2, 0), 0.0);
        assert!(CscMatrix::from_triplets(2, 2, vec![(2, 0, 1.0)]).is_err());
    }

    #[test]
    fn products_match_dense() {
        let dense = Matrix::from_rows(&[
            vec![1.0, 0.0, 2.0],
            vec![0.0, -1.0, 0.0],
            vec![3.0, 0.0, 0.5],
            vec![0.0, 4.0, 0.0],
        ])
        .unwrap();
        let sp = CscMatrix::from_dense(&dense);
        let x = Matrix::from_fn(4, 2, |i, j| (i * 2 + j) as f64 - 3.0);
        assert_eq!(sp.t_mul_dense(&x).unwrap(), dense.t_matmul(&x).unwrap());
        let c = Matrix::from_fn(3, 2, |i, j| (i + j) as f64 * 0.5);
        assert_eq!(sp.mul_dense(&c).unwrap(), dense.matmul(&c).unwrap());
        assert_eq!(sp.transpose().to_dense(), dense.transpose());
    }

    #[test]
    fn padding_and_leading_columns() {
        let sp = CscMatrix::from_dense(&Matrix::identity(2));
        let padded = sp.pad_columns(5).unwrap();
        assert_eq!(padded.cols(), 5);
        assert_eq!(padded.nnz(), 2);
        assert!(sp.pad_columns(1).is_err());
        assert_eq!(padded.leading_columns(2), sp);
        assert_eq!(sp.pad_columns(2).unwrap(), sp);
    }
}
