//! Interpolation under the quadratic graph Laplacian regularizer.
//!
//! Minimizing `xᵀLx` subject to `Hx = y` pins the sampled entries to `y`
//! and leaves the linear system `L_{S̄S̄} x_S̄ = −L_{S̄S} y` for the rest,
//! which is symmetric positive definite whenever the graph is connected.

use crate::error::{Error, Result};
use crate::sparse::{dense_solve, solve_spd, CgOutcome, CgParams, CsrMatrix, DenseMatrix};

/// Sorted set of observed node indices; realizes `H`, `Hᵀ` and `HᵀH`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SamplingSet {
    n_total: usize,
    indices: Vec<usize>,
}

impl SamplingSet {
    pub fn new(n_total: usize, indices: Vec<usize>) -> Result<Self> {
        if indices.is_empty() {
            return Err(Error::InvalidSampling("at least one sample is required".into()));
        }
        if indices.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidSampling(
                "indices must be strictly increasing".into(),
            ));
        }
        if let Some(&last) = indices.last() {
            if last >= n_total {
                return Err(Error::InvalidSampling(format!(
                    "index {last} out of range for {n_total} nodes"
                )));
            }
        }
        Ok(Self { n_total, indices })
    }

    /// Samples wherever `mask` is true.
    pub fn from_mask(mask: &[bool]) -> Result<Self> {
        let idx = mask
            .iter()
            .enumerate()
            .filter_map(|(i, &m)| m.then_some(i))
            .collect();
        Self::new(mask.len(), idx)
    }

    pub fn n_total(&self) -> usize {
        self.n_total
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn contains(&self, node: usize) -> bool {
        self.indices.binary_search(&node).is_ok()
    }

    /// Indicator of `S`, i.e. the diagonal of `HᵀH`.
    pub fn mask(&self) -> Vec<bool> {
        let mut m = vec![false; self.n_total];
        for &i in &self.indices {
            m[i] = true;
        }
        m
    }

    /// Unsampled nodes in increasing order.
    pub fn complement(&self) -> Vec<usize> {
        let m = self.mask();
        (0..self.n_total).filter(|&i| !m[i]).collect()
    }

    /// `H x`.
    pub fn h_apply(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.n_total {
            return Err(Error::DimensionMismatch {
                context: "h_apply",
                expected: self.n_total,
                got: x.len(),
            });
        }
        Ok(self.indices.iter().map(|&i| x[i]).collect())
    }

    /// `Hᵀ y`: zeros except `y` at the sampled positions.
    pub fn h_transpose(&self, y: &[f64]) -> Result<Vec<f64>> {
        if y.len() != self.indices.len() {
            return Err(Error::DimensionMismatch {
                context: "h_transpose",
                expected: self.indices.len(),
                got: y.len(),
            });
        }
        let mut x = vec![0.0; self.n_total];
        for (&i, &v) in self.indices.iter().zip(y) {
            x[i] = v;
        }
        Ok(x)
    }

    /// Overwrites the sampled entries of `x` with `y`.
    pub fn project(&self, x: &mut [f64], y: &[f64]) {
        for (&i, &v) in self.indices.iter().zip(y) {
            x[i] = v;
        }
    }
}

/// `min xᵀLx  s.t.  Hx = y`.
#[derive(Debug, Clone)]
pub struct GlrProblem {
    pub laplacian: CsrMatrix,
    pub sampling: SamplingSet,
    pub observations: Vec<f64>,
}

impl GlrProblem {
    pub fn new(laplacian: CsrMatrix, sampling: SamplingSet, observations: Vec<f64>) -> Result<Self> {
        let n = laplacian.n_rows();
        if laplacian.n_cols() != n || sampling.n_total() != n {
            return Err(Error::DimensionMismatch {
                context: "GlrProblem",
                expected: n,
                got: sampling.n_total(),
            });
        }
        if observations.len() != sampling.len() {
            return Err(Error::DimensionMismatch {
                context: "GlrProblem observations",
                expected: sampling.len(),
                got: observations.len(),
            });
        }
        if observations.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("observations"));
        }
        let defect = laplacian.symmetry_defect();
        if defect > 1e-12 {
            return Err(Error::NotSymmetric(defect));
        }
        Ok(Self {
            laplacian,
            sampling,
            observations,
        })
    }
}

/// `(L_{S̄S̄}, L_{S̄S})`.
pub fn partition_laplacian(l: &CsrMatrix, s: &SamplingSet) -> Result<(CsrMatrix, CsrMatrix)> {
    if l.n_rows() != s.n_total() || l.n_cols() != s.n_total() {
        return Err(Error::DimensionMismatch {
            context: "partition_laplacian",
            expected: l.n_rows(),
            got: s.n_total(),
        });
    }
    let free = s.complement();
    if free.is_empty() {
        return Err(Error::EmptyComplement);
    }
    Ok((l.select(&free, &free), l.select(&free, s.indices())))
}

/// Interpolated signal together with the inner solver report.
#[derive(Debug, Clone)]
pub struct GlrSolution {
    pub x: Vec<f64>,
    pub solve: Option<CgOutcome>,
}

/// Connectivity over the off-diagonal sparsity pattern of `L`.
fn laplacian_connected(l: &CsrMatrix) -> bool {
    let n = l.n_rows();
    if n == 0 {
        return true;
    }
    let mut seen = vec![false; n];
    let mut stack = vec![0usize];
    seen[0] = true;
    let mut count = 1;
    while let Some(u) = stack.pop() {
        let (cols, vals) = l.row(u);
        for (&v, &w) in cols.iter().zip(vals) {
            if v != u && w != 0.0 && !seen[v] {
                seen[v] = true;
                count += 1;
                stack.push(v);
            }
        }
    }
    count == n
}

/// Solves the GLR interpolation from a zero start on the free nodes.
pub fn glr_interpolate(p: &GlrProblem, cg: &CgParams) -> Result<GlrSolution> {
    glr_interpolate_from(p, None, cg)
}

/// As [`glr_interpolate`], warm-starting the free nodes from `x0` when given.
pub fn glr_interpolate_from(p: &GlrProblem, x0: Option<&[f64]>, cg: &CgParams) -> Result<GlrSolution> {
    let n = p.sampling.n_total();
    if let Some(x0) = x0 {
        if x0.len() != n {
            return Err(Error::DimensionMismatch {
                context: "glr initial guess",
                expected: n,
                got: x0.len(),
            });
        }
    }
    if !laplacian_connected(&p.laplacian) {
        return Err(Error::Disconnected);
    }
    let mut x = vec![0.0; n];
    p.sampling.project(&mut x, &p.observations);
    let free = p.sampling.complement();
    if free.is_empty() {
        return Ok(GlrSolution { x, solve: None });
    }

    let (l_cc, l_cs) = partition_laplacian(&p.laplacian, &p.sampling)?;
    let mut rhs = l_cs.spmv(&p.observations)?;
    rhs.iter_mut().for_each(|v| *v = -*v);
    let start: Vec<f64> = match x0 {
        Some(x0) => free.iter().map(|&i| x0[i]).collect(),
        None => vec![0.0; free.len()],
    };
    let out = solve_spd(&l_cc, &rhs, &start, cg)?;
    if out.breakdown {
        return Err(Error::Breakdown);
    }
    for (&i, &v) in free.iter().zip(&out.x) {
        x[i] = v;
    }
    Ok(GlrSolution { x, solve: Some(out) })
}

/// Closed-form `x = L⁻¹ Hᵀ (H L⁻¹ Hᵀ)⁻¹ y` for positive definite `L`, dense.
pub fn glr_dense_oracle(l_pd: &DenseMatrix, s: &SamplingSet, y: &[f64]) -> Result<Vec<f64>> {
    let n = l_pd.n_rows();
    if l_pd.n_cols() != n || s.n_total() != n {
        return Err(Error::DimensionMismatch {
            context: "glr_dense_oracle",
            expected: n,
            got: s.n_total(),
        });
    }
    if y.len() != s.len() {
        return Err(Error::DimensionMismatch {
            context: "glr_dense_oracle observations",
            expected: s.len(),
            got: y.len(),
        });
    }
    // Columns of L⁻¹Hᵀ, one per sample.
    let k = s.len();
    let mut cols = Vec::with_capacity(k);
    for &node in s.indices() {
        let mut e = vec![0.0; n];
        e[node] = 1.0;
        cols.push(dense_solve(l_pd, &e)?);
    }
    let mut small = DenseMatrix::zeros(k, k);
    for (a, &row_node) in s.indices().iter().enumerate() {
        for (b, col) in cols.iter().enumerate() {
            small.set(a, b, col[row_node]);
        }
    }
    let coeff = dense_solve(&small, y)?;
    let mut x = vec![0.0; n];
    for (col, &c) in cols.iter().zip(&coeff) {
        for (xi, ci) in x.iter_mut().zip(col) {
            *xi += c * ci;
        }
    }
    Ok(x)
}

/// `‖L_{S̄S̄} x_S̄ + L_{S̄S} y‖∞` for a candidate solution.
pub fn stationarity_residual(p: &GlrProblem, x: &[f64]) -> Result<f64> {
    let (l_cc, l_cs) = match partition_laplacian(&p.laplacian, &p.sampling) {
        Ok(parts) => parts,
        Err(Error::EmptyComplement) => return Ok(0.0),
        Err(e) => return Err(e),
    };
    let free: Vec<f64> = p.sampling.complement().iter().map(|&i| x[i]).collect();
    let a = l_cc.spmv(&free)?;
    let b = l_cs.spmv(&p.observations)?;
    Ok(a.iter().zip(&b).fold(0.0, |m, (u, v)| m.max((u + v).abs())))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{laplacian, GraphTopology};

    fn path3() -> CsrMatrix {
        laplacian(&GraphTopology::from_weighted(3, &[(0, 1, 1.0), (1, 2, 1.0)]).unwrap())
    }

    #[test]
    fn sampling_validation() {
        assert!(SamplingSet::new(3, vec![]).is_err());
        assert!(SamplingSet::new(3, vec![1, 1]).is_err());
        assert!(SamplingSet::new(3, vec![2, 1]).is_err());
        assert!(SamplingSet::new(3, vec![3]).is_err());
    }

    #[test]
    fn h_operators() {
        let full = SamplingSet::new(3, vec![0, 1, 2]).unwrap();
        assert_eq!(full.h_apply(&[4.0, 5.0, 6.0]).unwrap(), vec![4.0, 5.0, 6.0]);
        assert_eq!(full.h_transpose(&[4.0, 5.0, 6.0]).unwrap(), vec![4.0, 5.0, 6.0]);
        let s = SamplingSet::new(3, vec![2]).unwrap();
        assert_eq!(s.h_apply(&[9.0, 8.0, 7.0]).unwrap(), vec![7.0]);
        let s = SamplingSet::new(3, vec![1]).unwrap();
        assert_eq!(s.h_transpose(&[5.0]).unwrap(), vec![0.0, 5.0, 0.0]);
        assert!(s.h_apply(&[1.0]).is_err());
        assert!(s.h_transpose(&[1.0, 2.0]).is_err());
    }

    #[test]
    fn partition_path() {
        let s = SamplingSet::new(3, vec![0, 2]).unwrap();
        let (cc, cs) = partition_laplacian(&path3(), &s).unwrap();
        assert_eq!(cc.to_dense().row(0), &[2.0]);
        assert_eq!(cs.to_dense().row(0), &[-1.0, -1.0]);
        let all = SamplingSet::new(3, vec![0, 1, 2]).unwrap();
        assert!(matches!(partition_laplacian(&path3(), &all), Err(Error::EmptyComplement)));
    }

    #[test]
    fn partition_single_free_node_is_its_degree() {
        let g = GraphTopology::from_weighted(3, &[(0, 1, 0.7), (1, 2, 0.2)]).unwrap();
        let s = SamplingSet::new(3, vec![0, 2]).unwrap();
        let (cc, _) = partition_laplacian(&laplacian(&g), &s).unwrap();
        assert!((cc.get(0, 0) - 0.9).abs() < 1e-15);
    }

    #[test]
    fn interpolate_two_nodes() {
        let l = laplacian(&GraphTopology::from_weighted(2, &[(0, 1, 1.0)]).unwrap());
        let p = GlrProblem::new(l, SamplingSet::new(2, vec![0]).unwrap(), vec![5.0]).unwrap();
        let sol = glr_interpolate(&p, &CgParams::default()).unwrap();
        assert!((sol.x[1] - 5.0).abs() < 1e-12);
        assert_eq!(sol.x[0], 5.0);
    }

    #[test]
    fn interpolate_path_midpoint() {
        let p = GlrProblem::new(path3(), SamplingSet::new(3, vec![0, 2]).unwrap(), vec![0.0, 1.0])
            .unwrap();
        let sol = glr_interpolate(&p, &CgParams::default()).unwrap();
        assert_eq!(sol.x[0], 0.0);
        assert_eq!(sol.x[2], 1.0);
        assert!((sol.x[1] - 0.5).abs() < 1e-12);
        assert!(stationarity_residual(&p, &sol.x).unwrap() < 1e-12);
    }

    #[test]
    fn interpolate_rejects_disconnected() {
        let g = GraphTopology::from_weighted(4, &[(0, 1, 1.0), (2, 3, 1.0)]).unwrap();
        let p = GlrProblem::new(laplacian(&g), SamplingSet::new(4, vec![0, 2]).unwrap(), vec![1.0, 2.0])
            .unwrap();
        assert!(matches!(glr_interpolate(&p, &CgParams::default()), Err(Error::Disconnected)));
    }

    #[test]
    fn full_observation_returns_y() {
        let p = GlrProblem::new(path3(), SamplingSet::new(3, vec![0, 1, 2]).unwrap(), vec![3.0, 1.0, 2.0])
            .unwrap();
        assert_eq!(glr_interpolate(&p, &CgParams::default()).unwrap().x, vec![3.0, 1.0, 2.0]);
    }

    #[test]
    fn oracle_identity_filter() {
        let s = SamplingSet::new(4, vec![1, 3]).unwrap();
        let x = glr_dense_oracle(&DenseMatrix::identity(4), &s, &[2.0, -1.0]).unwrap();
        assert_eq!(x, vec![0.0, 2.0, 0.0, -1.0]);
    }

    #[test]
    fn oracle_full_observation() {
        let l = path3().to_dense();
        let mut l_pd = l.clone();
        for i in 0..3 {
            l_pd.set(i, i, l.get(i, i) + 1e-6);
        }
        let s = SamplingSet::new(3, vec![0, 1, 2]).unwrap();
        let x = glr_dense_oracle(&l_pd, &s, &[1.0, 2.0, 3.0]).unwrap();
        for (a, b) in x.iter().zip([1.0, 2.0, 3.0]) {
            assert!((a - b).abs() < 1e-9);
        }
    }
}
