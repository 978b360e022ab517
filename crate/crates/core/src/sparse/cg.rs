//! Conjugate gradient: the textbook residual recursion and the
//! schedule-driven accelerated-gradient variant whose per-step size and
//! momentum are free parameters.

use super::{dot, norm2, LinearOperator};
use crate::error::{Error, Result};

/// Iterations between recomputing the residual from `b - A x`.
const RESIDUAL_REFRESH: usize = 10;

#[derive(Debug, Clone, PartialEq)]
pub struct CgParams {
    /// Relative residual threshold `‖Ax - b‖ / ‖b‖`.
    pub tol: f64,
    pub max_iter: usize,
    /// Per-iteration `(step, momentum)` pairs. When present, [`solve_spd`]
    /// runs [`cg_parametrized`] for exactly `max_iter` steps.
    pub schedule: Option<Vec<(f64, f64)>>,
}

impl CgParams {
    pub fn new(tol: f64, max_iter: usize) -> Result<Self> {
        let p = Self {
            tol,
            max_iter,
            schedule: None,
        };
        p.validate()?;
        Ok(p)
    }

    /// Constant `(alpha, beta)` for every one of `max_iter` steps.
    pub fn constant_schedule(max_iter: usize, alpha: f64, beta: f64) -> Result<Self> {
        let p = Self {
            tol: 1e-12,
            max_iter,
            schedule: Some(vec![(alpha, beta); max_iter]),
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.tol > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "cg tol must be positive, got {}",
                self.tol
            )));
        }
        if self.max_iter == 0 {
            return Err(Error::InvalidParameter("cg max_iter must be >= 1".into()));
        }
        if let Some(s) = &self.schedule {
            if s.len() < self.max_iter {
                return Err(Error::InvalidParameter(format!(
                    "cg schedule has {} entries, need at least {}",
                    s.len(),
                    self.max_iter
                )));
            }
            if s.iter().any(|(a, b)| !a.is_finite() || !b.is_finite()) {
                return Err(Error::InvalidParameter("cg schedule must be finite".into()));
            }
        }
        Ok(())
    }
}

impl Default for CgParams {
    fn default() -> Self {
        Self {
            tol: 1e-10,
            max_iter: 1000,
            schedule: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CgOutcome {
    pub x: Vec<f64>,
    pub iterations: usize,
    /// Final true residual norm `‖b - A x‖₂`.
    pub residual: f64,
    pub converged: bool,
    /// `pᵀAp ≤ 0` was hit; `x` is the best iterate seen before it.
    pub breakdown: bool,
    /// `(alpha_t, beta_t)` actually taken, in the convention of [`cg_parametrized`].
    pub steps: Vec<(f64, f64)>,
}

fn check_dims<A: LinearOperator + ?Sized>(a: &A, b: &[f64], x0: &[f64]) -> Result<usize> {
    let n = a.dim();
    if b.len() != n {
        return Err(Error::DimensionMismatch {
            context: "cg rhs",
            expected: n,
            got: b.len(),
        });
    }
    if x0.len() != n {
        return Err(Error::DimensionMismatch {
            context: "cg initial guess",
            expected: n,
            got: x0.len(),
        });
    }
    Ok(n)
}

fn true_residual<A: LinearOperator + ?Sized>(a: &A, b: &[f64], x: &[f64], r: &mut [f64]) {
    a.apply(x, r);
    for (ri, bi) in r.iter_mut().zip(b) {
        *ri = bi - *ri;
    }
}

/// Hestenes–Stiefel conjugate gradient for symmetric positive definite `A`.
///
/// Stops once `‖b - A x‖ / max(‖b‖, ε) ≤ tol` or after `max_iter` steps,
/// returning the iterate with the smallest residual seen.
pub fn cg_solve<A: LinearOperator + ?Sized>(
    a: &A,
    b: &[f64],
    x0: &[f64],
    params: &CgParams,
) -> Result<CgOutcome> {
    params.validate()?;
    let n = check_dims(a, b, x0)?;
    let bnorm = norm2(b).max(f64::EPSILON);
    let target = params.tol * bnorm;

    let mut x = x0.to_vec();
    let mut r = vec![0.0; n];
    true_residual(a, b, &x, &mut r);
    let mut rs = dot(&r, &r);
    if !rs.is_finite() {
        return Err(Error::NonFinite("cg initial residual"));
    }

    let mut best_x = x.clone();
    let mut best_res = rs.sqrt();
    let mut p = vec![0.0; n];
    let mut ap = vec![0.0; n];
    let mut beta = 0.0;
    let mut steps = Vec::new();
    let mut iterations = 0;
    let mut breakdown = false;

    if best_res > target {
        for k in 0..params.max_iter {
            for (pi, ri) in p.iter_mut().zip(&r) {
                *pi = ri + beta * *pi;
            }
            a.apply(&p, &mut ap);
            let pap = dot(&p, &ap);
            if !pap.is_finite() {
                return Err(Error::NonFinite("cg curvature"));
            }
            if pap <= 0.0 {
                breakdown = true;
                break;
            }
            let alpha = rs / pap;
            for i in 0..n {
                x[i] += alpha * p[i];
                r[i] -= alpha * ap[i];
            }
            steps.push((alpha, beta));
            iterations = k + 1;
            if iterations % RESIDUAL_REFRESH == 0 {
                true_residual(a, b, &x, &mut r);
            }
            let mut rs_new = dot(&r, &r);
            if !rs_new.is_finite() {
                return Err(Error::NonFinite("cg residual"));
            }
            if rs_new.sqrt() <= target && iterations % RESIDUAL_REFRESH != 0 {
                // Confirm against the true residual before stopping.
                true_residual(a, b, &x, &mut r);
                rs_new = dot(&r, &r);
            }
            let res = rs_new.sqrt();
            if res < best_res {
                best_res = res;
                best_x.copy_from_slice(&x);
            }
            if res <= target || rs_new == 0.0 {
                break;
            }
            beta = rs_new / rs;
            rs = rs_new;
        }
    }

    let mut r_final = vec![0.0; n];
    true_residual(a, b, &best_x, &mut r_final);
    let residual = norm2(&r_final);
    Ok(CgOutcome {
        x: best_x,
        iterations,
        residual,
        converged: residual <= target,
        breakdown,
        steps,
    })
}

/// Accelerated-gradient recursion with caller-supplied step sizes and momenta:
///
/// ```text
/// g ← A x₀ − b,  v ← 0
/// for t in 0..T:  v ← g + β_t v;  x ← x − α_t v;  g ← g − α_t A v
/// ```
///
/// With `α_t = gᵀg / vᵀAv` and `β_t = ‖g_t‖² / ‖g_{t−1}‖²` this reproduces
/// [`cg_solve`]; with constants it is a heavy-ball gradient descent.
pub fn cg_parametrized<A: LinearOperator + ?Sized>(
    a: &A,
    b: &[f64],
    x0: &[f64],
    schedule: &[(f64, f64)],
    iterations: usize,
) -> Result<Vec<f64>> {
    let n = check_dims(a, b, x0)?;
    if schedule.len() < iterations {
        return Err(Error::InvalidParameter(format!(
            "schedule has {} entries, need {iterations}",
            schedule.len()
        )));
    }
    let mut x = x0.to_vec();
    if iterations == 0 {
        return Ok(x);
    }
    let mut g = vec![0.0; n];
    a.apply(&x, &mut g);
    for (gi, bi) in g.iter_mut().zip(b) {
        *gi -= bi;
    }
    let mut v = vec![0.0; n];
    let mut av = vec![0.0; n];
    for &(alpha, beta) in &schedule[..iterations] {
        for (vi, gi) in v.iter_mut().zip(&g) {
            *vi = gi + beta * *vi;
        }
        a.apply(&v, &mut av);
        for i in 0..n {
            x[i] -= alpha * v[i];
            g[i] -= alpha * av[i];
        }
    }
    if x.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("parametrized cg"));
    }
    Ok(x)
}

/// Runs [`cg_parametrized`] when `params` carries a schedule, [`cg_solve`] otherwise.
pub fn solve_spd<A: LinearOperator + ?Sized>(
    a: &A,
    b: &[f64],
    x0: &[f64],
    params: &CgParams,
) -> Result<CgOutcome> {
    params.validate()?;
    match &params.schedule {
        None => cg_solve(a, b, x0, params),
        Some(schedule) => {
            let x = cg_parametrized(a, b, x0, schedule, params.max_iter)?;
            let mut r = vec![0.0; x.len()];
            true_residual(a, b, &x, &mut r);
            let residual = norm2(&r);
            Ok(CgOutcome {
                converged: residual <= params.tol * norm2(b).max(f64::EPSILON),
                x,
                iterations: params.max_iter,
                residual,
                breakdown: false,
                steps: schedule[..params.max_iter].to_vec(),
            })
        }
    }
}
