//! Compressed sparse row storage and the linear solvers built on it.
//!
//! [`CsrMatrix`] carries every graph operator in the crate (Laplacians,
//! incidence matrices, the generalized Laplacian of the GTV x-update).
//! Solvers are written against [`LinearOperator`] so that a shifted
//! operator such as `L + diag(mask)` can be applied without materializing it.

mod cg;
mod dense;

pub use cg::{cg_parametrized, cg_solve, solve_spd, CgOutcome, CgParams};
pub use dense::{dense_solve, determinant, min_eigenvalue_sym, symmetric_eigenvalues, DenseMatrix};

use crate::error::{Error, Result};

/// A square operator `y = A x`.
pub trait LinearOperator {
    fn dim(&self) -> usize;

    /// Writes `A x` into `y`. Both slices have length [`Self::dim`].
    fn apply(&self, x: &[f64], y: &mut [f64]);
}

/// Compressed sparse row matrix with sorted, duplicate-free column indices.
#[derive(Debug, Clone, PartialEq)]
pub struct CsrMatrix {
    n_rows: usize,
    n_cols: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    values: Vec<f64>,
}

impl CsrMatrix {
    /// Builds a matrix from raw CSR arrays, checking every structural invariant.
    pub fn new(
        n_rows: usize,
        n_cols: usize,
        row_ptr: Vec<usize>,
        col_idx: Vec<usize>,
        values: Vec<f64>,
    ) -> Result<Self> {
        if row_ptr.len() != n_rows + 1 {
            return Err(Error::InvalidMatrix(format!(
                "row_ptr has length {}, expected {}",
                row_ptr.len(),
                n_rows + 1
            )));
        }
        if row_ptr[0] != 0 {
            return Err(Error::InvalidMatrix("row_ptr[0] must be 0".into()));
        }
        if col_idx.len() != values.len() || row_ptr[n_rows] != values.len() {
            return Err(Error::InvalidMatrix(
                "row_ptr, col_idx and values disagree on nnz".into(),
            ));
        }
        for r in 0..n_rows {
            let (start, end) = (row_ptr[r], row_ptr[r + 1]);
            if end < start {
                return Err(Error::InvalidMatrix(format!("row_ptr decreases at row {r}")));
            }
            let cols = &col_idx[start..end];
            for (k, &c) in cols.iter().enumerate() {
                if c >= n_cols {
                    return Err(Error::InvalidMatrix(format!(
                        "column {c} out of range in row {r}"
                    )));
                }
                if k > 0 && cols[k - 1] >= c {
                    return Err(Error::InvalidMatrix(format!(
                        "columns not strictly increasing in row {r}"
                    )));
                }
            }
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("CSR values"));
        }
        Ok(Self {
            n_rows,
            n_cols,
            row_ptr,
            col_idx,
            values,
        })
    }

    /// Assembles a matrix from `(row, col, value)` triplets. Duplicate
    /// positions are summed.
    pub fn from_triplets(
        n_rows: usize,
        n_cols: usize,
        triplets: impl IntoIterator<Item = (usize, usize, f64)>,
    ) -> Result<Self> {
        let mut entries: Vec<(usize, usize, f64)> = triplets.into_iter().collect();
        for &(r, c, v) in &entries {
            if r >= n_rows || c >= n_cols {
                return Err(Error::InvalidMatrix(format!(
                    "triplet ({r}, {c}) outside {n_rows}x{n_cols}"
                )));
            }
            if !v.is_finite() {
                return Err(Error::NonFinite("CSR triplets"));
            }
        }
        entries.sort_by_key(|&(r, c, _)| (r, c));

        let mut row_ptr = vec![0usize; n_rows + 1];
        let mut col_idx = Vec::with_capacity(entries.len());
        let mut values: Vec<f64> = Vec::with_capacity(entries.len());
        let mut last: Option<(usize, usize)> = None;
        for (r, c, v) in entries {
            if last == Some((r, c)) {
                *values.last_mut().expect("duplicate follows an entry") += v;
                continue;
            }
            row_ptr[r + 1] += 1;
            col_idx.push(c);
            values.push(v);
            last = Some((r, c));
        }
        for r in 0..n_rows {
            row_ptr[r + 1] += row_ptr[r];
        }
        Ok(Self {
            n_rows,
            n_cols,
            row_ptr,
            col_idx,
            values,
        })
    }

    pub fn identity(n: usize) -> Self {
        Self::from_diagonal(&vec![1.0; n])
    }

    pub fn zeros(n_rows: usize, n_cols: usize) -> Self {
        Self {
            n_rows,
            n_cols,
            row_ptr: vec![0; n_rows + 1],
            col_idx: Vec::new(),
            values: Vec::new(),
        }
    }

    pub fn from_diagonal(diag: &[f64]) -> Self {
        let n = diag.len();
        Self {
            n_rows: n,
            n_cols: n,
            row_ptr: (0..=n).collect(),
            col_idx: (0..n).collect(),
            values: diag.to_vec(),
        }
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn row_ptr(&self) -> &[usize] {
        &self.row_ptr
    }

    pub fn col_idx(&self) -> &[usize] {
        &self.col_idx
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Column indices and values of row `r`.
    pub fn row(&self, r: usize) -> (&[usize], &[f64]) {
        let (s, e) = (self.row_ptr[r], self.row_ptr[r + 1]);
        (&self.col_idx[s..e], &self.values[s..e])
    }

    /// Entry `(r, c)`, zero when not stored.
    pub fn get(&self, r: usize, c: usize) -> f64 {
        let (cols, vals) = self.row(r);
        match cols.binary_search(&c) {
            Ok(k) => vals[k],
            Err(_) => 0.0,
        }
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.n_rows.min(self.n_cols))
            .map(|i| self.get(i, i))
            .collect()
    }

    /// `A x`.
    pub fn spmv(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.n_cols {
            return Err(Error::DimensionMismatch {
                context: "spmv",
                expected: self.n_cols,
                got: x.len(),
            });
        }
        let mut y = vec![0.0; self.n_rows];
        self.spmv_unchecked(x, &mut y);
        Ok(y)
    }

    pub(crate) fn spmv_unchecked(&self, x: &[f64], y: &mut [f64]) {
        for (r, out) in y.iter_mut().enumerate() {
            let (s, e) = (self.row_ptr[r], self.row_ptr[r + 1]);
            let mut acc = 0.0;
            for k in s..e {
                acc += self.values[k] * x[self.col_idx[k]];
            }
            *out = acc;
        }
    }

    /// `Aᵀ y` without forming the transpose.
    pub fn spmv_transpose(&self, y: &[f64]) -> Result<Vec<f64>> {
        if y.len() != self.n_rows {
            return Err(Error::DimensionMismatch {
                context: "spmv_transpose",
                expected: self.n_rows,
                got: y.len(),
            });
        }
        let mut x = vec![0.0; self.n_cols];
        for (r, &yr) in y.iter().enumerate() {
            if yr == 0.0 {
                continue;
            }
            let (cols, vals) = self.row(r);
            for (&c, &v) in cols.iter().zip(vals) {
                x[c] += v * yr;
            }
        }
        Ok(x)
    }

    pub fn transpose(&self) -> Self {
        let mut counts = vec![0usize; self.n_cols + 1];
        for &c in &self.col_idx {
            counts[c + 1] += 1;
        }
        for c in 0..self.n_cols {
            counts[c + 1] += counts[c];
        }
        let row_ptr = counts.clone();
        let mut next = counts;
        let mut col_idx = vec![0usize; self.nnz()];
        let mut values = vec![0.0; self.nnz()];
        // Rows are visited in order, so each output row receives increasing columns.
        for r in 0..self.n_rows {
            let (cols, vals) = self.row(r);
            for (&c, &v) in cols.iter().zip(vals) {
                let slot = next[c];
                col_idx[slot] = r;
                values[slot] = v;
                next[c] += 1;
            }
        }
        Self {
            n_rows: self.n_cols,
            n_cols: self.n_rows,
            row_ptr,
            col_idx,
            values,
        }
    }

    /// Sparse product `A B` (row-wise Gustavson accumulation).
    pub fn matmul(&self, other: &CsrMatrix) -> Result<Self> {
        if self.n_cols != other.n_rows {
            return Err(Error::DimensionMismatch {
                context: "matmul",
                expected: self.n_cols,
                got: other.n_rows,
            });
        }
        let n = other.n_cols;
        let mut acc = vec![0.0; n];
        let mut marker = vec![usize::MAX; n];
        let mut touched: Vec<usize> = Vec::new();
        let mut row_ptr = Vec::with_capacity(self.n_rows + 1);
        row_ptr.push(0);
        let mut col_idx = Vec::new();
        let mut values = Vec::new();
        for r in 0..self.n_rows {
            touched.clear();
            let (acols, avals) = self.row(r);
            for (&k, &av) in acols.iter().zip(avals) {
                let (bcols, bvals) = other.row(k);
                for (&c, &bv) in bcols.iter().zip(bvals) {
                    if marker[c] != r {
                        marker[c] = r;
                        acc[c] = 0.0;
                        touched.push(c);
                    }
                    acc[c] += av * bv;
                }
            }
            touched.sort_unstable();
            for &c in &touched {
                col_idx.push(c);
                values.push(acc[c]);
            }
            row_ptr.push(col_idx.len());
        }
        Ok(Self {
            n_rows: self.n_rows,
            n_cols: n,
            row_ptr,
            col_idx,
            values,
        })
    }

    /// `A + diag(d)` for a square matrix.
    pub fn add_diagonal(&self, d: &[f64]) -> Result<Self> {
        if self.n_rows != self.n_cols || d.len() != self.n_rows {
            return Err(Error::DimensionMismatch {
                context: "add_diagonal",
                expected: self.n_rows,
                got: d.len(),
            });
        }
        let triplets = (0..self.n_rows)
            .flat_map(|r| {
                let (cols, vals) = self.row(r);
                cols.iter().zip(vals).map(move |(&c, &v)| (r, c, v))
            })
            .chain(d.iter().enumerate().map(|(i, &v)| (i, i, v)));
        Self::from_triplets(self.n_rows, self.n_cols, triplets)
    }

    /// `diag(left) · A · diag(right)`.
    pub fn scale_rows_cols(&self, left: &[f64], right: &[f64]) -> Result<Self> {
        if left.len() != self.n_rows || right.len() != self.n_cols {
            return Err(Error::DimensionMismatch {
                context: "scale_rows_cols",
                expected: self.n_rows,
                got: left.len(),
            });
        }
        let mut out = self.clone();
        for r in 0..self.n_rows {
            let (s, e) = (self.row_ptr[r], self.row_ptr[r + 1]);
            for k in s..e {
                out.values[k] *= left[r] * right[self.col_idx[k]];
            }
        }
        if out.values.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("scale_rows_cols"));
        }
        Ok(out)
    }

    /// Submatrix on the given (sorted, distinct) row and column index lists.
    pub fn select(&self, rows: &[usize], cols: &[usize]) -> Self {
        let mut col_map = vec![usize::MAX; self.n_cols];
        for (k, &c) in cols.iter().enumerate() {
            col_map[c] = k;
        }
        let mut row_ptr = Vec::with_capacity(rows.len() + 1);
        row_ptr.push(0);
        let mut col_idx = Vec::new();
        let mut values = Vec::new();
        for &r in rows {
            let (rc, rv) = self.row(r);
            for (&c, &v) in rc.iter().zip(rv) {
                let m = col_map[c];
                if m != usize::MAX {
                    col_idx.push(m);
                    values.push(v);
                }
            }
            row_ptr.push(col_idx.len());
        }
        Self {
            n_rows: rows.len(),
            n_cols: cols.len(),
            row_ptr,
            col_idx,
            values,
        }
    }

    /// Largest `|A_ij - A_ji|`; infinite for non-square matrices.
    pub fn symmetry_defect(&self) -> f64 {
        if self.n_rows != self.n_cols {
            return f64::INFINITY;
        }
        let mut worst: f64 = 0.0;
        for r in 0..self.n_rows {
            let (cols, vals) = self.row(r);
            for (&c, &v) in cols.iter().zip(vals) {
                worst = worst.max((v - self.get(c, r)).abs());
            }
        }
        worst
    }

    pub fn to_dense(&self) -> DenseMatrix {
        let mut d = DenseMatrix::zeros(self.n_rows, self.n_cols);
        for r in 0..self.n_rows {
            let (cols, vals) = self.row(r);
            for (&c, &v) in cols.iter().zip(vals) {
                d.set(r, c, v);
            }
        }
        d
    }
}

impl LinearOperator for CsrMatrix {
    fn dim(&self) -> usize {
        debug_assert_eq!(self.n_rows, self.n_cols);
        self.n_rows
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        self.spmv_unchecked(x, y);
    }
}

/// `A + diag(shift)` applied lazily.
#[derive(Debug, Clone, Copy)]
pub struct ShiftedOperator<'a> {
    pub base: &'a CsrMatrix,
    pub shift: &'a [f64],
}

impl LinearOperator for ShiftedOperator<'_> {
    fn dim(&self) -> usize {
        self.base.n_rows()
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        self.base.spmv_unchecked(x, y);
        for ((yi, &si), &xi) in y.iter_mut().zip(self.shift).zip(x) {
            *yi += si * xi;
        }
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn norm2(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_by_two() -> CsrMatrix {
        CsrMatrix::from_triplets(2, 2, [(0, 0, 2.0), (0, 1, 1.0), (1, 0, 1.0), (1, 1, 2.0)])
            .unwrap()
    }

    #[test]
    fn spmv_identity() {
        let a = CsrMatrix::identity(3);
        assert_eq!(a.spmv(&[1.0, 2.0, 3.0]).unwrap(), vec![1.0, 2.0, 3.0]);
    }

    #[test]
    fn spmv_empty_rows() {
        let a = CsrMatrix::zeros(2, 2);
        assert_eq!(a.spmv(&[7.0, 9.0]).unwrap(), vec![0.0, 0.0]);
    }

    #[test]
    fn spmv_small() {
        assert_eq!(two_by_two().spmv(&[1.0, 1.0]).unwrap(), vec![3.0, 3.0]);
    }

    #[test]
    fn spmv_dimension_mismatch() {
        let err = two_by_two().spmv(&[1.0]).unwrap_err();
        assert!(matches!(err, Error::DimensionMismatch { .. }));
    }

    #[test]
    fn triplets_sum_duplicates() {
        let a = CsrMatrix::from_triplets(2, 2, [(1, 1, 1.0), (0, 1, 2.0), (1, 1, 3.0)]).unwrap();
        assert_eq!(a.nnz(), 2);
        assert_eq!(a.get(1, 1), 4.0);
        assert_eq!(a.get(0, 1), 2.0);
        assert_eq!(a.get(0, 0), 0.0);
    }

    #[test]
    fn new_rejects_bad_structure() {
        assert!(CsrMatrix::new(1, 2, vec![0, 2], vec![1, 0], vec![1.0, 1.0]).is_err());
        assert!(CsrMatrix::new(1, 2, vec![0, 1], vec![2], vec![1.0]).is_err());
        assert!(CsrMatrix::new(1, 2, vec![0, 1], vec![0], vec![f64::NAN]).is_err());
        assert!(CsrMatrix::new(2, 2, vec![0, 1], vec![0], vec![1.0]).is_err());
        assert!(CsrMatrix::new(1, 2, vec![1, 1], vec![0], vec![1.0]).is_err());
    }

    #[test]
    fn transpose_and_matmul() {
        let c = CsrMatrix::from_triplets(3, 2, [(0, 0, 1.0), (0, 1, -1.0), (2, 1, 2.0)]).unwrap();
        let ct = c.transpose();
        assert_eq!(ct.n_rows(), 2);
        assert_eq!(ct.get(1, 2), 2.0);
        let g = ct.matmul(&c).unwrap();
        assert_eq!(g.get(0, 0), 1.0);
        assert_eq!(g.get(0, 1), -1.0);
        assert_eq!(g.get(1, 1), 5.0);
        assert_eq!(g.spmv_transpose(&[1.0, 1.0]).unwrap(), ct.matmul(&c).unwrap().transpose().spmv(&[1.0, 1.0]).unwrap());
    }

    #[test]
    fn select_submatrix() {
        let a = two_by_two();
        let s = a.select(&[1], &[0, 1]);
        assert_eq!(s.to_dense().row(0), &[1.0, 2.0]);
    }

    #[test]
    fn shifted_operator_matches_add_diagonal() {
        let a = two_by_two();
        let shift = [0.5, 0.0];
        let op = ShiftedOperator { base: &a, shift: &shift };
        let mut y = [0.0; 2];
        op.apply(&[1.0, -2.0], &mut y);
        let expected = a.add_diagonal(&shift).unwrap().spmv(&[1.0, -2.0]).unwrap();
        assert_eq!(y.to_vec(), expected);
    }
}
