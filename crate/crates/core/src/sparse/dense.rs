//! Small dense matrices used as independent oracles: Gaussian elimination
//! with partial pivoting and cyclic Jacobi eigenvalues.

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    n_rows: usize,
    n_cols: usize,
    data: Vec<f64>,
}

impl DenseMatrix {
    pub fn new(n_rows: usize, n_cols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != n_rows * n_cols {
            return Err(Error::DimensionMismatch {
                context: "DenseMatrix::new",
                expected: n_rows * n_cols,
                got: data.len(),
            });
        }
        if data.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("dense matrix"));
        }
        Ok(Self {
            n_rows,
            n_cols,
            data,
        })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n_rows = rows.len();
        let n_cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != n_cols) {
            return Err(Error::InvalidParameter("ragged rows".into()));
        }
        Self::new(n_rows, n_cols, rows.concat())
    }

    pub fn zeros(n_rows: usize, n_cols: usize) -> Self {
        Self {
            n_rows,
            n_cols,
            data: vec![0.0; n_rows * n_cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, 1.0);
        }
        m
    }

    pub fn from_diagonal(d: &[f64]) -> Self {
        let mut m = Self::zeros(d.len(), d.len());
        for (i, &v) in d.iter().enumerate() {
            m.set(i, i, v);
        }
        m
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    pub fn get(&self, r: usize, c: usize) -> f64 {
        self.data[r * self.n_cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: f64) {
        self.data[r * self.n_cols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[f64] {
        &self.data[r * self.n_cols..(r + 1) * self.n_cols]
    }

    pub fn matvec(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.n_cols {
            return Err(Error::DimensionMismatch {
                context: "matvec",
                expected: self.n_cols,
                got: x.len(),
            });
        }
        Ok((0..self.n_rows)
            .map(|r| self.row(r).iter().zip(x).map(|(a, b)| a * b).sum())
            .collect())
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn symmetry_defect(&self) -> f64 {
        if self.n_rows != self.n_cols {
            return f64::INFINITY;
        }
        let mut worst: f64 = 0.0;
        for r in 0..self.n_rows {
            for c in r + 1..self.n_cols {
                worst = worst.max((self.get(r, c) - self.get(c, r)).abs());
            }
        }
        worst
    }
}

fn require_square(a: &DenseMatrix, context: &'static str) -> Result<usize> {
    if a.n_rows != a.n_cols {
        return Err(Error::DimensionMismatch {
            context,
            expected: a.n_rows,
            got: a.n_cols,
        });
    }
    Ok(a.n_rows)
}

/// LU factorization with partial pivoting in place. Returns the row
/// permutation sign, or `Singular` when a pivot falls below working precision.
fn lu_in_place(m: &mut DenseMatrix, rhs: Option<&mut Vec<f64>>) -> Result<f64> {
    let n = m.n_rows;
    let tiny = (n.max(1) as f64) * f64::EPSILON * m.max_abs().max(f64::MIN_POSITIVE);
    let mut sign = 1.0;
    let mut rhs = rhs;
    for col in 0..n {
        let (piv_row, piv_val) = (col..n)
            .map(|r| (r, m.get(r, col).abs()))
            .fold((col, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
        if piv_val <= tiny {
            return Err(Error::Singular {
                column: col,
                pivot: piv_val,
            });
        }
        if piv_row != col {
            for c in 0..n {
                m.data.swap(col * n + c, piv_row * n + c);
            }
            if let Some(b) = rhs.as_deref_mut() {
                b.swap(col, piv_row);
            }
            sign = -sign;
        }
        let pivot = m.get(col, col);
        for r in col + 1..n {
            let factor = m.get(r, col) / pivot;
            if factor == 0.0 {
                continue;
            }
            m.set(r, col, factor);
            for c in col + 1..n {
                let v = m.get(r, c) - factor * m.get(col, c);
                m.set(r, c, v);
            }
            if let Some(b) = rhs.as_deref_mut() {
                b[r] -= factor * b[col];
            }
        }
    }
    Ok(sign)
}

/// Solves `A x = b` by Gaussian elimination with partial pivoting.
pub fn dense_solve(a: &DenseMatrix, b: &[f64]) -> Result<Vec<f64>> {
    let n = require_square(a, "dense_solve")?;
    if b.len() != n {
        return Err(Error::DimensionMismatch {
            context: "dense_solve rhs",
            expected: n,
            got: b.len(),
        });
    }
    let mut m = a.clone();
    let mut x = b.to_vec();
    lu_in_place(&mut m, Some(&mut x))?;
    for r in (0..n).rev() {
        let mut acc = x[r];
        for c in r + 1..n {
            acc -= m.get(r, c) * x[c];
        }
        x[r] = acc / m.get(r, r);
    }
    Ok(x)
}

/// Determinant via pivoted elimination; `Singular` when a pivot vanishes.
pub fn determinant(a: &DenseMatrix) -> Result<f64> {
    require_square(a, "determinant")?;
    let mut m = a.clone();
    let sign = lu_in_place(&mut m, None)?;
    Ok((0..m.n_rows).fold(sign, |acc, i| acc * m.get(i, i)))
}

/// All eigenvalues of a symmetric matrix, ascending (cyclic Jacobi).
pub fn symmetric_eigenvalues(a: &DenseMatrix) -> Result<Vec<f64>> {
    let n = require_square(a, "symmetric_eigenvalues")?;
    let defect = a.symmetry_defect();
    if defect > 1e-12 * a.max_abs().max(1.0) {
        return Err(Error::NotSymmetric(defect));
    }
    let mut m = a.clone();
    let scale = m.max_abs().max(f64::MIN_POSITIVE);
    for _sweep in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|r| (0..n).filter(move |&c| c != r).map(move |c| (r, c)))
            .map(|(r, c)| m.get(r, c).powi(2))
            .sum();
        if off.sqrt() <= 1e-15 * scale {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = m.get(p, q);
                if apq.abs() <= f64::MIN_POSITIVE {
                    continue;
                }
                let app = m.get(p, p);
                let aqq = m.get(q, q);
                let theta = (aqq - app) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = m.get(k, p);
                    let akq = m.get(k, q);
                    m.set(k, p, c * akp - s * akq);
                    m.set(k, q, s * akp + c * akq);
                }
                for k in 0..n {
                    let apk = m.get(p, k);
                    let aqk = m.get(q, k);
                    m.set(p, k, c * apk - s * aqk);
                    m.set(q, k, s * apk + c * aqk);
                }
            }
        }
    }
    let mut eig: Vec<f64> = (0..n).map(|i| m.get(i, i)).collect();
    eig.sort_by(f64::total_cmp);
    Ok(eig)
}

/// Smallest eigenvalue of a symmetric matrix.
pub fn min_eigenvalue_sym(a: &DenseMatrix) -> Result<f64> {
    let eig = symmetric_eigenvalues(a)?;
    eig.first()
        .copied()
        .ok_or_else(|| Error::InvalidParameter("empty matrix".into()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn solve_identity_and_diagonal() {
        let x = dense_solve(&DenseMatrix::identity(3), &[5.0, 6.0, 7.0]).unwrap();
        assert_eq!(x, vec![5.0, 6.0, 7.0]);
        let d = DenseMatrix::from_diagonal(&[2.0, 4.0]);
        assert_eq!(dense_solve(&d, &[2.0, 8.0]).unwrap(), vec![1.0, 2.0]);
    }

    #[test]
    fn solve_needs_pivoting() {
        let a = DenseMatrix::from_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
        assert_eq!(dense_solve(&a, &[3.0, 4.0]).unwrap(), vec![4.0, 3.0]);
    }

    #[test]
    fn solve_rejects_singular() {
        let a = DenseMatrix::from_rows(&[vec![1.0, 2.0], vec![2.0, 4.0]]).unwrap();
        assert!(matches!(
            dense_solve(&a, &[1.0, 1.0]),
            Err(Error::Singular { .. })
        ));
        assert!(determinant(&a).is_err());
    }

    #[test]
    fn determinant_with_swap() {
        let a = DenseMatrix::from_rows(&[vec![0.0, 2.0], vec![3.0, 1.0]]).unwrap();
        assert!((determinant(&a).unwrap() + 6.0).abs() < 1e-14);
    }

    #[test]
    fn eigen_identity_and_diagonal() {
        assert!((min_eigenvalue_sym(&DenseMatrix::identity(5)).unwrap() - 1.0).abs() < 1e-12);
        let d = DenseMatrix::from_diagonal(&[3.0, -2.0, 7.0]);
        assert!((min_eigenvalue_sym(&d).unwrap() + 2.0).abs() < 1e-12);
    }

    #[test]
    fn eigen_path_laplacian() {
        let l = DenseMatrix::from_rows(&[
            vec![1.0, -1.0, 0.0],
            vec![-1.0, 2.0, -1.0],
            vec![0.0, -1.0, 1.0],
        ])
        .unwrap();
        let eig = symmetric_eigenvalues(&l).unwrap();
        // Path P3 spectrum: 0, 1, 3.
        assert!(eig[0].abs() < 1e-12);
        assert!((eig[1] - 1.0).abs() < 1e-12);
        assert!((eig[2] - 3.0).abs() < 1e-12);
    }

    #[test]
    fn eigen_rejects_asymmetric() {
        let a = DenseMatrix::from_rows(&[vec![1.0, 2.0], vec![0.0, 1.0]]).unwrap();
        assert!(matches!(min_eigenvalue_sym(&a), Err(Error::NotSymmetric(_))));
    }
}
