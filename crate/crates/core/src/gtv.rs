//! Interpolation under graph total variation, `min ‖Cx‖₁ s.t. Hx = y`.
//!
//! The LP is put in standard form with an upper bound `z ≥ ±Cx` and slacks
//! `q = (q₁, q₂) ≥ 0`, then split by ADMM with an auxiliary copy `q̃` of the
//! slacks. One iteration:
//!
//! 1. `z` in closed form,
//! 2. `x` from `(CᵀC + HᵀH) x = b` by conjugate gradient,
//! 3. `q` in closed form from the new `z`, `x`,
//! 4. `q̃ = max(0, q + μ_{d,e}/γ)`,
//! 5. dual ascent on the five constraint blocks.
//!
//! The constraint matrix is never assembled; every block acts through `C`,
//! `Cᵀ` and the sampling set.

use std::borrow::Cow;

use crate::error::{Error, Result};
use crate::glr::SamplingSet;
use crate::sparse::{solve_spd, CgOutcome, CgParams, CsrMatrix, ShiftedOperator};

#[derive(Debug, Clone, PartialEq)]
pub struct AdmmParams {
    pub gamma: f64,
    pub admm_iters: usize,
    pub cg: CgParams,
    /// Feasibility threshold on `‖Hx − y‖∞` used in reports.
    pub feas_tol: f64,
    /// Initial value of every Lagrange multiplier entry.
    pub mu_init: f64,
}

impl Default for AdmmParams {
    fn default() -> Self {
        Self {
            gamma: 10.0,
            admm_iters: 5,
            cg: CgParams {
                tol: 1e-8,
                max_iter: 10,
                schedule: None,
            },
            feas_tol: 1e-3,
            mu_init: 0.1,
        }
    }
}

impl AdmmParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.gamma > 0.0) || !self.gamma.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "gamma must be positive, got {}",
                self.gamma
            )));
        }
        if self.admm_iters == 0 {
            return Err(Error::InvalidParameter("admm_iters must be >= 1".into()));
        }
        if !(self.feas_tol > 0.0) {
            return Err(Error::InvalidParameter("feas_tol must be positive".into()));
        }
        if !self.mu_init.is_finite() {
            return Err(Error::InvalidParameter("mu_init must be finite".into()));
        }
        self.cg.validate()
    }
}

/// Full ADMM iterate. `R` is the number of rows of the incidence matrix in use.
#[derive(Debug, Clone, PartialEq)]
pub struct AdmmState {
    pub z: Vec<f64>,
    pub x: Vec<f64>,
    pub q1: Vec<f64>,
    pub q2: Vec<f64>,
    /// Auxiliary `q̃ = (q̃₁; q̃₂)`, length `2R`.
    pub qt: Vec<f64>,
    pub mu_a: Vec<f64>,
    pub mu_b: Vec<f64>,
    pub mu_c: Vec<f64>,
    pub mu_d: Vec<f64>,
    pub mu_e: Vec<f64>,
}

impl AdmmState {
    pub fn rows(&self) -> usize {
        self.z.len()
    }

    pub fn qt1(&self) -> &[f64] {
        &self.qt[..self.rows()]
    }

    pub fn qt2(&self) -> &[f64] {
        &self.qt[self.rows()..]
    }

    fn is_finite(&self) -> bool {
        [
            &self.z, &self.x, &self.q1, &self.q2, &self.qt, &self.mu_a, &self.mu_b, &self.mu_c,
            &self.mu_d, &self.mu_e,
        ]
        .iter()
        .all(|v| v.iter().all(|x| x.is_finite()))
    }
}

/// Updated Lagrange multipliers.
#[derive(Debug, Clone, PartialEq)]
pub struct Duals {
    pub mu_a: Vec<f64>,
    pub mu_b: Vec<f64>,
    pub mu_c: Vec<f64>,
    pub mu_d: Vec<f64>,
    pub mu_e: Vec<f64>,
}

/// Per-iteration diagnostics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IterationReport {
    /// `‖Cx‖₁`.
    pub objective: f64,
    /// `‖Hx − y‖∞`.
    pub feasibility: f64,
    /// `max_k (|Cx|_k − z_k)`; non-positive when `z` bounds `|Cx|`.
    pub bound_gap: f64,
    /// Euclidean norm of the full constraint residual `B[z;x;q] − [b;q̃]`.
    pub primal_residual: f64,
    pub cg_iterations: usize,
    pub cg_residual: f64,
}

#[derive(Debug, Clone)]
pub struct GtvSolution {
    pub x: Vec<f64>,
    pub state: AdmmState,
    pub objective: f64,
    pub feasibility: f64,
    pub feasible: bool,
    pub history: Vec<IterationReport>,
}

/// `‖Cx‖₁`.
pub fn gtv_objective(c: &CsrMatrix, x: &[f64]) -> Result<f64> {
    Ok(c.spmv(x)?.iter().map(|v| v.abs()).sum())
}

fn check_problem(c: &CsrMatrix, s: &SamplingSet, y: &[f64], x: &[f64]) -> Result<()> {
    if s.n_total() != c.n_cols() {
        return Err(Error::DimensionMismatch {
            context: "gtv sampling set",
            expected: c.n_cols(),
            got: s.n_total(),
        });
    }
    if y.len() != s.len() {
        return Err(Error::DimensionMismatch {
            context: "gtv observations",
            expected: s.len(),
            got: y.len(),
        });
    }
    if x.len() != c.n_cols() {
        return Err(Error::DimensionMismatch {
            context: "gtv signal",
            expected: c.n_cols(),
            got: x.len(),
        });
    }
    Ok(())
}

fn check_state(st: &AdmmState, c: &CsrMatrix, s: &SamplingSet) -> Result<()> {
    let r = c.n_rows();
    let rows_ok = [&st.z, &st.q1, &st.q2, &st.mu_a, &st.mu_b, &st.mu_d, &st.mu_e]
        .iter()
        .all(|v| v.len() == r);
    if !rows_ok || st.qt.len() != 2 * r {
        return Err(Error::DimensionMismatch {
            context: "admm state rows",
            expected: r,
            got: st.z.len(),
        });
    }
    if st.x.len() != c.n_cols() || st.mu_c.len() != s.len() {
        return Err(Error::DimensionMismatch {
            context: "admm state signal",
            expected: c.n_cols(),
            got: st.x.len(),
        });
    }
    Ok(())
}

/// Initial state from a starting signal: `z = |Cx₀|`, `q₁ = z − Cx₀`,
/// `q₂ = z + Cx₀`, `q̃ = q`, all multipliers `mu_init`. Sampled entries of
/// `x₀` are overwritten with `y`.
pub fn admm_init(
    c: &CsrMatrix,
    s: &SamplingSet,
    y: &[f64],
    x0: &[f64],
    p: &AdmmParams,
) -> Result<AdmmState> {
    check_problem(c, s, y, x0)?;
    let mut x = x0.to_vec();
    s.project(&mut x, y);
    let cx = c.spmv(&x)?;
    let z: Vec<f64> = cx.iter().map(|v| v.abs()).collect();
    let q1: Vec<f64> = z.iter().zip(&cx).map(|(z, v)| z - v).collect();
    let q2: Vec<f64> = z.iter().zip(&cx).map(|(z, v)| z + v).collect();
    let qt = [q1.as_slice(), q2.as_slice()].concat();
    let r = c.n_rows();
    Ok(AdmmState {
        z,
        x,
        q1,
        q2,
        qt,
        mu_a: vec![p.mu_init; r],
        mu_b: vec![p.mu_init; r],
        mu_c: vec![p.mu_init; s.len()],
        mu_d: vec![p.mu_init; r],
        mu_e: vec![p.mu_init; r],
    })
}

/// `z = −(1/γ)·1 − (μ_a + μ_b + μ_d + μ_e)/(2γ) + (q̃₁ + q̃₂)/2`.
pub fn update_z(st: &AdmmState, p: &AdmmParams) -> Vec<f64> {
    let g = p.gamma;
    let (qt1, qt2) = (st.qt1(), st.qt2());
    (0..st.rows())
        .map(|k| {
            -1.0 / g - (st.mu_a[k] + st.mu_b[k] + st.mu_d[k] + st.mu_e[k]) / (2.0 * g)
                + 0.5 * (qt1[k] + qt2[k])
        })
        .collect()
}

/// `(CᵀC + HᵀH) x = Cᵀ((μ_a − μ_b + μ_d − μ_e)/(2γ) − (q̃₁ − q̃₂)/2) + Hᵀ(y − μ_c/γ)`,
/// warm-started from the current `x`.
fn solve_x(
    st: &AdmmState,
    c: &CsrMatrix,
    gram: &CsrMatrix,
    shift: &[f64],
    s: &SamplingSet,
    y: &[f64],
    p: &AdmmParams,
) -> Result<CgOutcome> {
    let g = p.gamma;
    let (qt1, qt2) = (st.qt1(), st.qt2());
    let edge_term: Vec<f64> = (0..st.rows())
        .map(|k| {
            (st.mu_a[k] - st.mu_b[k] + st.mu_d[k] - st.mu_e[k]) / (2.0 * g)
                - 0.5 * (qt1[k] - qt2[k])
        })
        .collect();
    let mut rhs = c.spmv_transpose(&edge_term)?;
    for ((&node, &yi), &mc) in s.indices().iter().zip(y).zip(&st.mu_c) {
        rhs[node] += yi - mc / g;
    }
    let op = ShiftedOperator { base: gram, shift };
    let out = solve_spd(&op, &rhs, &st.x, &p.cg)?;
    if out.breakdown {
        return Err(Error::Breakdown);
    }
    Ok(out)
}

fn sample_shift(s: &SamplingSet) -> Vec<f64> {
    s.mask().into_iter().map(|m| if m { 1.0 } else { 0.0 }).collect()
}

/// x-update of one iteration; returns the new `x` and the CG report.
pub fn update_x(
    st: &AdmmState,
    c: &CsrMatrix,
    s: &SamplingSet,
    y: &[f64],
    p: &AdmmParams,
) -> Result<(Vec<f64>, CgOutcome)> {
    check_problem(c, s, y, &st.x)?;
    check_state(st, c, s)?;
    let gram = c.transpose().matmul(c)?;
    let out = solve_x(st, c, &gram, &sample_shift(s), s, y, p)?;
    Ok((out.x.clone(), out))
}

/// `q₁ = (z − Cx)/2 + (μ_a − μ_d + γq̃₁)/(2γ)`, `q₂ = (z + Cx)/2 + (μ_b − μ_e + γq̃₂)/(2γ)`
/// using the already-advanced `z` and `x` in `st`.
pub fn update_q(st: &AdmmState, c: &CsrMatrix, p: &AdmmParams) -> Result<(Vec<f64>, Vec<f64>)> {
    let cx = c.spmv(&st.x)?;
    Ok(q_from(st, &cx, p))
}

fn q_from(st: &AdmmState, cx: &[f64], p: &AdmmParams) -> (Vec<f64>, Vec<f64>) {
    let g = p.gamma;
    let (qt1, qt2) = (st.qt1(), st.qt2());
    let r = st.rows();
    let q1 = (0..r)
        .map(|k| 0.5 * (st.z[k] - cx[k]) + (st.mu_a[k] - st.mu_d[k] + g * qt1[k]) / (2.0 * g))
        .collect();
    let q2 = (0..r)
        .map(|k| 0.5 * (st.z[k] + cx[k]) + (st.mu_b[k] - st.mu_e[k] + g * qt2[k]) / (2.0 * g))
        .collect();
    (q1, q2)
}

/// `q̃ = max(0, q + μ/γ)` with `q = (q₁; q₂)` paired against `(μ_d; μ_e)`.
pub fn update_qtilde(st: &AdmmState, p: &AdmmParams) -> Vec<f64> {
    let g = p.gamma;
    st.q1
        .iter()
        .zip(&st.mu_d)
        .chain(st.q2.iter().zip(&st.mu_e))
        .map(|(q, mu)| (q + mu / g).max(0.0))
        .collect()
}

/// The five residual blocks of `B[z;x;q] − [b;q̃]`.
struct Residuals {
    a: Vec<f64>,
    b: Vec<f64>,
    c: Vec<f64>,
    d: Vec<f64>,
    e: Vec<f64>,
}

fn residuals(st: &AdmmState, cx: &[f64], s: &SamplingSet, y: &[f64]) -> Residuals {
    let r = st.rows();
    let (qt1, qt2) = (st.qt1(), st.qt2());
    Residuals {
        a: (0..r).map(|k| st.z[k] - cx[k] - st.q1[k]).collect(),
        b: (0..r).map(|k| st.z[k] + cx[k] - st.q2[k]).collect(),
        c: s.indices().iter().zip(y).map(|(&i, yi)| st.x[i] - yi).collect(),
        d: (0..r).map(|k| st.q1[k] - qt1[k]).collect(),
        e: (0..r).map(|k| st.q2[k] - qt2[k]).collect(),
    }
}

/// `μ ← μ + γ (B[z;x;q] − [b;q̃])`.
pub fn update_mu(
    st: &AdmmState,
    c: &CsrMatrix,
    s: &SamplingSet,
    y: &[f64],
    p: &AdmmParams,
) -> Result<Duals> {
    check_problem(c, s, y, &st.x)?;
    let cx = c.spmv(&st.x)?;
    Ok(duals_from(st, &residuals(st, &cx, s, y), p.gamma))
}

fn duals_from(st: &AdmmState, res: &Residuals, g: f64) -> Duals {
    let step = |mu: &[f64], r: &[f64]| mu.iter().zip(r).map(|(m, r)| m + g * r).collect();
    Duals {
        mu_a: step(&st.mu_a, &res.a),
        mu_b: step(&st.mu_b, &res.b),
        mu_c: step(&st.mu_c, &res.c),
        mu_d: step(&st.mu_d, &res.d),
        mu_e: step(&st.mu_e, &res.e),
    }
}

/// Gradient of the smooth part of the augmented Lagrangian with respect to
/// `(z, x, q₁, q₂)` at the current state, holding `q̃` and `μ` fixed.
/// Zero after an exact z/x/q update.
pub fn lagrangian_gradient(
    st: &AdmmState,
    c: &CsrMatrix,
    s: &SamplingSet,
    y: &[f64],
    p: &AdmmParams,
) -> Result<[Vec<f64>; 4]> {
    check_problem(c, s, y, &st.x)?;
    let g = p.gamma;
    let cx = c.spmv(&st.x)?;
    let res = residuals(st, &cx, s, y);
    let r = st.rows();
    let gz = (0..r)
        .map(|k| 1.0 + st.mu_a[k] + st.mu_b[k] + g * (res.a[k] + res.b[k]))
        .collect();
    let edge: Vec<f64> = (0..r)
        .map(|k| -st.mu_a[k] + st.mu_b[k] + g * (-res.a[k] + res.b[k]))
        .collect();
    let mut gx = c.spmv_transpose(&edge)?;
    for ((&node, &mc), &rc) in s.indices().iter().zip(&st.mu_c).zip(&res.c) {
        gx[node] += mc + g * rc;
    }
    let gq1 = (0..r)
        .map(|k| -st.mu_a[k] + st.mu_d[k] + g * (-res.a[k] + res.d[k]))
        .collect();
    let gq2 = (0..r)
        .map(|k| -st.mu_b[k] + st.mu_e[k] + g * (-res.b[k] + res.e[k]))
        .collect();
    Ok([gz, gx, gq1, gq2])
}

/// Every connected component of the graph behind `C` must hold a sample for
/// `CᵀC + HᵀH` to be invertible.
pub fn check_sampled_components(c: &CsrMatrix, s: &SamplingSet) -> Result<()> {
    let n = c.n_cols();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], mut u: usize) -> usize {
        while parent[u] != u {
            parent[u] = parent[parent[u]];
            u = parent[u];
        }
        u
    }
    for r in 0..c.n_rows() {
        let (cols, vals) = c.row(r);
        let mut first = None;
        for (&col, &v) in cols.iter().zip(vals) {
            if v == 0.0 {
                continue;
            }
            match first {
                None => first = Some(col),
                Some(f) => {
                    let (a, b) = (find(&mut parent, f), find(&mut parent, col));
                    parent[a] = b;
                }
            }
        }
    }
    let mut sampled = vec![false; n];
    for &i in s.indices() {
        let root = find(&mut parent, i);
        sampled[root] = true;
    }
    for i in 0..n {
        let root = find(&mut parent, i);
        if !sampled[root] {
            return Err(Error::UnsampledComponent(i));
        }
    }
    Ok(())
}

/// Precomputed operators for repeated iterations on one `(C, S, y)`.
pub struct GtvSystem<'a> {
    c: &'a CsrMatrix,
    gram: Cow<'a, CsrMatrix>,
    shift: Vec<f64>,
    s: &'a SamplingSet,
    y: &'a [f64],
}

impl<'a> GtvSystem<'a> {
    pub fn new(c: &'a CsrMatrix, s: &'a SamplingSet, y: &'a [f64]) -> Result<Self> {
        Self::build(c, Cow::Owned(c.transpose().matmul(c)?), s, y)
    }

    /// Reuses a precomputed `CᵀC`, e.g. shared by several channels on one graph.
    pub fn with_gram(c: &'a CsrMatrix, gram: &'a CsrMatrix, s: &'a SamplingSet, y: &'a [f64]) -> Result<Self> {
        Self::build(c, Cow::Borrowed(gram), s, y)
    }

    fn build(c: &'a CsrMatrix, gram: Cow<'a, CsrMatrix>, s: &'a SamplingSet, y: &'a [f64]) -> Result<Self> {
        if gram.n_rows() != c.n_cols() || gram.n_cols() != c.n_cols() {
            return Err(Error::DimensionMismatch {
                context: "gtv gram matrix",
                expected: c.n_cols(),
                got: gram.n_rows(),
            });
        }
        check_problem(c, s, y, &vec![0.0; c.n_cols()])?;
        Ok(Self {
            c,
            gram,
            shift: sample_shift(s),
            s,
            y,
        })
    }

    /// One full ADMM cycle (z, x, q, q̃, μ), in place.
    pub fn step(&self, st: &mut AdmmState, p: &AdmmParams) -> Result<IterationReport> {
        check_state(st, self.c, self.s)?;
        let z = update_z(st, p);
        st.z = z;
        let out = solve_x(st, self.c, &self.gram, &self.shift, self.s, self.y, p)?;
        st.x = out.x;
        let cx = self.c.spmv(&st.x)?;
        let (q1, q2) = q_from(st, &cx, p);
        st.q1 = q1;
        st.q2 = q2;
        st.qt = update_qtilde(st, p);
        let res = residuals(st, &cx, self.s, self.y);
        let duals = duals_from(st, &res, p.gamma);
        st.mu_a = duals.mu_a;
        st.mu_b = duals.mu_b;
        st.mu_c = duals.mu_c;
        st.mu_d = duals.mu_d;
        st.mu_e = duals.mu_e;
        if !st.is_finite() {
            return Err(Error::NonFinite("admm state"));
        }
        let primal_residual = [&res.a, &res.b, &res.c, &res.d, &res.e]
            .iter()
            .flat_map(|v| v.iter())
            .map(|v| v * v)
            .sum::<f64>()
            .sqrt();
        Ok(IterationReport {
            objective: cx.iter().map(|v| v.abs()).sum(),
            feasibility: res.c.iter().fold(0.0, |m, v| m.max(v.abs())),
            bound_gap: cx
                .iter()
                .zip(&st.z)
                .fold(f64::NEG_INFINITY, |m, (v, z)| m.max(v.abs() - z)),
            primal_residual,
            cg_iterations: out.iterations,
            cg_residual: out.residual,
        })
    }

    pub fn solve(&self, x0: &[f64], p: &AdmmParams) -> Result<GtvSolution> {
        p.validate()?;
        let mut st = admm_init(self.c, self.s, self.y, x0, p)?;
        let mut history = Vec::with_capacity(p.admm_iters);
        for _ in 0..p.admm_iters {
            history.push(self.step(&mut st, p)?);
        }
        let objective = gtv_objective(self.c, &st.x)?;
        let feasibility = self
            .s
            .h_apply(&st.x)?
            .iter()
            .zip(self.y)
            .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
        Ok(GtvSolution {
            x: st.x.clone(),
            state: st,
            objective,
            feasibility,
            feasible: feasibility <= p.feas_tol,
            history,
        })
    }
}

/// Runs `admm_iters` ADMM cycles from `x0` and returns the final signal with diagnostics.
pub fn gtv_interpolate(
    c: &CsrMatrix,
    s: &SamplingSet,
    y: &[f64],
    x0: &[f64],
    p: &AdmmParams,
) -> Result<GtvSolution> {
    p.validate()?;
    check_problem(c, s, y, x0)?;
    check_sampled_components(c, s)?;
    GtvSystem::new(c, s, y)?.solve(x0, p)
}
