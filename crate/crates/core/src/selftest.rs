//! Randomized self-checks of the solvers against dense and brute-force
//! references, runnable from the command line.

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::glr::{glr_interpolate, partition_laplacian, GlrProblem, SamplingSet};
use crate::graph::{gtv_laplacian, incidence, laplacian, normalize_rw, GraphTopology};
use crate::gtv::{
    admm_init, gtv_interpolate, gtv_objective, lagrangian_gradient, update_q, update_x, update_z,
    AdmmParams,
};
use crate::sparse::{dense_solve, min_eigenvalue_sym, symmetric_eigenvalues, CgParams, DenseMatrix};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Level {
    Fast,
    Full,
}

impl FromStr for Level {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "fast" => Ok(Level::Fast),
            "full" => Ok(Level::Full),
            _ => Err(Error::InvalidParameter(format!("unknown self-test level '{s}'"))),
        }
    }
}

impl fmt::Display for Level {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Level::Fast => "fast",
            Level::Full => "full",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckResult {
    pub name: &'static str,
    pub passed: bool,
    pub cases: usize,
    pub seconds: f64,
    pub detail: String,
}

#[derive(Debug, Clone)]
pub struct SelftestReport {
    pub level: Level,
    pub seed: u64,
    pub checks: Vec<CheckResult>,
}

impl SelftestReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    /// One `key=value` line per check plus a summary line.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for c in &self.checks {
            out.push_str(&format!(
                "check={} status={} cases={} seconds={:.3} detail=\"{}\"\n",
                c.name,
                if c.passed { "pass" } else { "fail" },
                c.cases,
                c.seconds,
                c.detail
            ));
        }
        let failed = self.checks.iter().filter(|c| !c.passed).count();
        out.push_str(&format!(
            "summary level={} seed={} checks={} failed={} status={}\n",
            self.level,
            self.seed,
            self.checks.len(),
            failed,
            if failed == 0 { "pass" } else { "fail" }
        ));
        out
    }
}

/// Connected graph on `n` nodes: a random spanning tree plus extra edges,
/// weights in `[0.1, 1]`.
pub fn random_connected_graph(rng: &mut impl Rng, n: usize, extra: f64) -> GraphTopology {
    let mut edges = Vec::new();
    for v in 1..n {
        let u = rng.random_range(0..v);
        edges.push((u, v, rng.random_range(0.1..=1.0)));
    }
    for i in 0..n {
        for j in i + 1..n {
            if !edges.iter().any(|&(a, b, _)| (a, b) == (i, j) || (a, b) == (j, i))
                && rng.random::<f64>() < extra
            {
                edges.push((i.min(j), i.max(j), rng.random_range(0.1..=1.0)));
            }
        }
    }
    let edges: Vec<_> = edges.into_iter().map(|(a, b, w)| (a.min(b), a.max(b), w)).collect();
    GraphTopology::from_weighted(n, &edges).expect("generated edges are valid")
}

/// `k` distinct sorted node indices out of `n`.
pub fn random_sampling(rng: &mut impl Rng, n: usize, k: usize) -> SamplingSet {
    let mut idx: Vec<usize> = (0..n).collect();
    for i in 0..k {
        let j = rng.random_range(i..n);
        idx.swap(i, j);
    }
    let mut chosen = idx[..k].to_vec();
    chosen.sort_unstable();
    SamplingSet::new(n, chosen).expect("distinct indices in range")
}

fn run_check(
    name: &'static str,
    cases: usize,
    f: impl FnOnce() -> std::result::Result<String, String>,
) -> CheckResult {
    let start = Instant::now();
    let (passed, detail) = match f() {
        Ok(d) => (true, d),
        Err(d) => (false, d),
    };
    CheckResult {
        name,
        passed,
        cases,
        seconds: start.elapsed().as_secs_f64(),
        detail,
    }
}

fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).fold(0.0, |m, (x, y)| m.max((x - y).abs()))
}

fn fail<T: fmt::Display>(e: T) -> String {
    e.to_string()
}

/// Three-node example with weights 1/2, 1/2 and 1/3.
fn a6_check() -> std::result::Result<String, String> {
    let g = GraphTopology::from_weighted(3, &[(0, 1, 0.5), (0, 2, 0.5), (1, 2, 1.0 / 3.0)]).map_err(fail)?;
    let c_bar = normalize_rw(&g).map_err(fail)?;
    let expected: [[f64; 3]; 6] = [
        [0.5, -0.5, 0.0],
        [-0.6, 0.6, 0.0],
        [0.0, 0.4, -0.4],
        [0.0, -0.4, 0.4],
        [0.5, 0.0, -0.5],
        [-0.6, 0.0, 0.6],
    ];
    let dense = c_bar.to_dense();
    let rows: Vec<Vec<f64>> = (0..dense.n_rows()).map(|r| dense.row(r).to_vec()).collect();
    let mut used = vec![false; rows.len()];
    for e in &expected {
        let hit = rows
            .iter()
            .enumerate()
            .find(|(i, r)| !used[*i] && max_abs_diff(r, e) <= 1e-12)
            .map(|(i, _)| i)
            .ok_or_else(|| format!("row {e:?} missing from normalized incidence"))?;
        used[hit] = true;
    }
    let ones = c_bar.spmv(&[1.0; 3]).map_err(fail)?;
    let l1: f64 = ones.iter().map(|v| v.abs()).sum();
    if l1 > 1e-12 {
        return Err(format!("|C1|_1 = {l1:e}"));
    }
    // Exact product of the rows above, as rationals.
    let l_exact = [
        [61.0 / 50.0, -61.0 / 100.0, -61.0 / 100.0],
        [-61.0 / 100.0, 93.0 / 100.0, -8.0 / 25.0],
        [-61.0 / 100.0, -8.0 / 25.0, 93.0 / 100.0],
    ];
    let l = gtv_laplacian(&c_bar).to_dense();
    let mut worst: f64 = 0.0;
    for (r, row) in l_exact.iter().enumerate() {
        worst = worst.max(max_abs_diff(l.row(r), row));
    }
    if worst > 1e-12 {
        return Err(format!("C^T C deviates from exact product by {worst:e}"));
    }
    Ok(format!("rows matched, |C1|_1={l1:e}, C^T C err={worst:e}"))
}

fn glr_oracle_check(rng: &mut ChaCha8Rng, cases: usize) -> std::result::Result<String, String> {
    let cg = CgParams::new(1e-14, 500).map_err(fail)?;
    let mut worst: f64 = 0.0;
    for case in 0..cases {
        let n = rng.random_range(2..=16);
        let k = rng.random_range(1..n);
        let g = random_connected_graph(rng, n, 0.3);
        let s = random_sampling(rng, n, k);
        let y: Vec<f64> = (0..k).map(|_| rng.random_range(-1.0..1.0)).collect();
        let l = laplacian(&g);
        let p = GlrProblem::new(l.clone(), s.clone(), y.clone()).map_err(fail)?;
        let x = glr_interpolate(&p, &cg).map_err(fail)?.x;
        let (l_cc, l_cs) = partition_laplacian(&l, &s).map_err(fail)?;
        let rhs: Vec<f64> = l_cs.spmv(&y).map_err(fail)?.iter().map(|v| -v).collect();
        let free = dense_solve(&l_cc.to_dense(), &rhs).map_err(fail)?;
        let mut reference = vec![0.0; n];
        s.project(&mut reference, &y);
        for (&i, &v) in s.complement().iter().zip(&free) {
            reference[i] = v;
        }
        let scale = reference.iter().fold(1e-300f64, |m, v| m.max(v.abs()));
        let rel = max_abs_diff(&x, &reference) / scale;
        worst = worst.max(rel);
        if rel > 1e-8 {
            return Err(format!("case {case}: relative error {rel:e}"));
        }
    }
    Ok(format!("max relative error {worst:e}"))
}

fn pd_check(rng: &mut ChaCha8Rng, cases: usize) -> std::result::Result<String, String> {
    let mut worst = f64::INFINITY;
    for case in 0..cases {
        let n = rng.random_range(2..=12);
        let k = rng.random_range(1..n);
        let g = random_connected_graph(rng, n, 0.3);
        let s = random_sampling(rng, n, k);
        let (l_cc, _) = partition_laplacian(&laplacian(&g), &s).map_err(fail)?;
        let a = min_eigenvalue_sym(&l_cc.to_dense()).map_err(fail)?;
        let c = incidence(&g);
        let mask: Vec<f64> = s.mask().iter().map(|&m| f64::from(u8::from(m))).collect();
        let gen = c.transpose().matmul(&c).map_err(fail)?.add_diagonal(&mask).map_err(fail)?;
        let b = min_eigenvalue_sym(&gen.to_dense()).map_err(fail)?;
        worst = worst.min(a).min(b);
        if a <= 1e-8 || b <= 1e-8 {
            return Err(format!("case {case}: lambda_min {a:e} / {b:e}"));
        }
    }
    Ok(format!("smallest eigenvalue {worst:e}"))
}

fn block_matrix_check(rng: &mut ChaCha8Rng, cases: usize) -> std::result::Result<String, String> {
    let mut worst = f64::INFINITY;
    for case in 0..cases {
        let n = rng.random_range(2..=10);
        let k = rng.random_range(1..=n);
        let g = random_connected_graph(rng, n, 0.3);
        let s = random_sampling(rng, n, k);
        let l = laplacian(&g).to_dense();
        let mut p = DenseMatrix::zeros(n + k, n + k);
        for r in 0..n {
            for c in 0..n {
                p.set(r, c, 2.0 * l.get(r, c));
            }
        }
        for (a, &node) in s.indices().iter().enumerate() {
            p.set(n + a, node, 1.0);
            p.set(node, n + a, 1.0);
        }
        let eig = symmetric_eigenvalues(&p).map_err(fail)?;
        let smallest = eig.iter().fold(f64::INFINITY, |m, v| m.min(v.abs()));
        worst = worst.min(smallest);
        if smallest <= 1e-8 {
            return Err(format!("case {case}: min |eigenvalue| {smallest:e}"));
        }
    }
    Ok(format!("min |eigenvalue| {worst:e}"))
}

fn stationarity_check(rng: &mut ChaCha8Rng, cases: usize) -> std::result::Result<String, String> {
    let mut worst: f64 = 0.0;
    let inf = |v: &[f64]| v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    for case in 0..cases {
        let n = rng.random_range(2..=8);
        let k = rng.random_range(1..=n);
        let g = random_connected_graph(rng, n, 0.4);
        let c = if rng.random::<bool>() {
            incidence(&g)
        } else {
            normalize_rw(&g).map_err(fail)?
        };
        let s = random_sampling(rng, n, k);
        let y: Vec<f64> = (0..k).map(|_| rng.random_range(0.0..1.0)).collect();
        let x0: Vec<f64> = (0..n).map(|_| rng.random_range(0.0..1.0)).collect();
        let p = AdmmParams {
            gamma: rng.random_range(0.5..20.0),
            cg: CgParams::new(1e-15, 500).map_err(fail)?,
            ..AdmmParams::default()
        };
        let mut st = admm_init(&c, &s, &y, &x0, &p).map_err(fail)?;
        for v in [&mut st.mu_a, &mut st.mu_b, &mut st.mu_c, &mut st.mu_d, &mut st.mu_e] {
            v.iter_mut().for_each(|m| *m = rng.random_range(-1.0..1.0));
        }
        st.qt.iter_mut().for_each(|q| *q = rng.random_range(0.0..1.0));
        // z and x are the joint minimizer with q eliminated; q then follows
        // from them, after which every primal gradient block vanishes.
        st.z = update_z(&st, &p);
        st.x = update_x(&st, &c, &s, &y, &p).map_err(fail)?.0;
        let (q1, q2) = update_q(&st, &c, &p).map_err(fail)?;
        st.q1 = q1;
        st.q2 = q2;
        let scale = 1.0 + [&st.z, &st.x, &st.q1, &st.q2, &st.qt].iter().map(|v| inf(v)).fold(0.0, f64::max);
        let grads = lagrangian_gradient(&st, &c, &s, &y, &p).map_err(fail)?;
        let err = grads.iter().map(|g| inf(g)).fold(0.0, f64::max) / scale;
        worst = worst.max(err);
        if err > 1e-6 {
            return Err(format!("case {case}: scaled gradient {err:e}"));
        }
    }
    Ok(format!("max scaled gradient {worst:e}"))
}

/// Minimum of `‖Cx‖₁` over the free entries by nested grid refinement.
pub fn grid_lp_oracle(c: &crate::sparse::CsrMatrix, s: &SamplingSet, y: &[f64]) -> Result<f64> {
    let free = s.complement();
    let lo = y.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = y.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let mut x = vec![0.0; s.n_total()];
    s.project(&mut x, y);
    let mut center = vec![0.5 * (lo + hi); free.len()];
    let mut half = 0.5 * (hi - lo).max(1e-12);
    let mut best = f64::INFINITY;
    for _ in 0..4 {
        let steps = 11usize;
        let total = steps.pow(free.len() as u32);
        let mut best_point = center.clone();
        for code in 0..total {
            let mut rem = code;
            let mut point = Vec::with_capacity(free.len());
            for &c0 in &center {
                let t = (rem % steps) as f64 / (steps - 1) as f64;
                rem /= steps;
                point.push((c0 - half + 2.0 * half * t).clamp(lo, hi));
            }
            for (&i, &v) in free.iter().zip(&point) {
                x[i] = v;
            }
            let obj = gtv_objective(c, &x)?;
            if obj < best {
                best = obj;
                best_point = point;
            }
        }
        center = best_point;
        half /= 5.0;
    }
    Ok(best)
}

fn lp_check(rng: &mut ChaCha8Rng, cases: usize) -> std::result::Result<String, String> {
    let mut worst_gap = f64::NEG_INFINITY;
    let mut worst_feas: f64 = 0.0;
    for case in 0..cases {
        let n = rng.random_range(2..=7);
        let m = rng.random_range(1..=3.min(n - 1));
        let g = random_connected_graph(rng, n, 0.4);
        let c = incidence(&g);
        let s = random_sampling(rng, n, n - m);
        let y: Vec<f64> = (0..n - m).map(|_| rng.random_range(0.0..1.0)).collect();
        let p = AdmmParams {
            gamma: 10.0,
            admm_iters: 300,
            cg: CgParams::new(1e-13, 200).map_err(fail)?,
            ..AdmmParams::default()
        };
        let x0 = vec![0.5; n];
        let sol = gtv_interpolate(&c, &s, &y, &x0, &p).map_err(fail)?;
        let oracle = grid_lp_oracle(&c, &s, &y).map_err(fail)?;
        let gap = sol.objective - oracle;
        worst_gap = worst_gap.max(gap);
        worst_feas = worst_feas.max(sol.feasibility);
        if gap > 1e-2 || sol.feasibility > 1e-3 {
            return Err(format!(
                "case {case}: objective gap {gap:e}, feasibility {:e}",
                sol.feasibility
            ));
        }
    }
    Ok(format!("max gap {worst_gap:e}, max infeasibility {worst_feas:e}"))
}

/// Runs every check; `Full` uses the larger case counts.
pub fn run(level: Level, seed: u64) -> SelftestReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (glr, pd, block, stat, lp) = match level {
        Level::Fast => (40, 40, 15, 15, 10),
        Level::Full => (200, 200, 50, 50, 100),
    };
    let checks = vec![
        run_check("normalized_incidence_example", 1, a6_check),
        run_check("glr_dense_oracle", glr, || glr_oracle_check(&mut rng, glr)),
        run_check("positive_definite_systems", pd, || pd_check(&mut rng, pd)),
        run_check("glr_block_matrix_nonsingular", block, || block_matrix_check(&mut rng, block)),
        run_check("admm_stationarity", stat, || stationarity_check(&mut rng, stat)),
        run_check("gtv_lp_grid_oracle", lp, || lp_check(&mut rng, lp)),
    ];
    SelftestReport { level, seed, checks }
}
