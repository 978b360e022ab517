//! Dense reference computations written without the library's own helpers.

#![allow(dead_code)]

use rand::Rng;

pub type Dense = Vec<Vec<f64>>;

/// Gauss-Jordan with partial pivoting. `None` when a pivot is below `1e-14`
/// relative to the largest entry.
pub fn solve(a: &Dense, b: &[f64]) -> Option<Vec<f64>> {
    let n = a.len();
    let mut m: Dense = a
        .iter()
        .zip(b)
        .map(|(row, &rhs)| {
            let mut r = row.clone();
            r.push(rhs);
            r
        })
        .collect();
    let scale = a.iter().flatten().fold(0.0f64, |s, v| s.max(v.abs())).max(1e-300);
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| m[i][col].abs().total_cmp(&m[j][col].abs()))?;
        if m[piv][col].abs() < 1e-14 * scale {
            return None;
        }
        m.swap(col, piv);
        let p = m[col][col];
        for v in m[col].iter_mut() {
            *v /= p;
        }
        for r in 0..n {
            if r != col {
                let f = m[r][col];
                if f != 0.0 {
                    for c in col..=n {
                        m[r][c] -= f * m[col][c];
                    }
                }
            }
        }
    }
    Some(m.iter().map(|r| r[n]).collect())
}

/// True when `a − shift·I` admits a Cholesky factorization, i.e. every
/// eigenvalue of the symmetric matrix `a` exceeds `shift`.
pub fn exceeds(a: &Dense, shift: f64) -> bool {
    let n = a.len();
    let mut l = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in 0..=i {
            let mut s = a[i][j] - if i == j { shift } else { 0.0 };
            for k in 0..j {
                s -= l[i][k] * l[j][k];
            }
            if i == j {
                if s <= 0.0 {
                    return false;
                }
                l[i][i] = s.sqrt();
            } else {
                l[i][j] = s / l[j][j];
            }
        }
    }
    true
}

pub fn transpose_mul(a: &Dense, b: &Dense) -> Dense {
    let n = a.first().map_or(0, Vec::len);
    let m = b.first().map_or(0, Vec::len);
    let mut out = vec![vec![0.0; m]; n];
    for (ra, rb) in a.iter().zip(b) {
        for i in 0..n {
            for j in 0..m {
                out[i][j] += ra[i] * rb[j];
            }
        }
    }
    out
}

pub fn matvec(a: &Dense, x: &[f64]) -> Vec<f64> {
    a.iter().map(|r| r.iter().zip(x).map(|(u, v)| u * v).sum()).collect()
}

/// Random connected weighted graph on `n` nodes: a random spanning tree
/// plus each remaining pair with probability `extra`.
pub fn random_graph(rng: &mut impl Rng, n: usize, extra: f64) -> Vec<(usize, usize, f64)> {
    let mut order: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        order.swap(i, rng.random_range(0..=i));
    }
    let mut edges = Vec::new();
    let mut present = vec![vec![false; n]; n];
    for k in 1..n {
        let a = order[k];
        let b = order[rng.random_range(0..k)];
        let (i, j) = (a.min(b), a.max(b));
        present[i][j] = true;
        edges.push((i, j, rng.random_range(0.05..1.0)));
    }
    for i in 0..n {
        for j in i + 1..n {
            if !present[i][j] && rng.random::<f64>() < extra {
                edges.push((i, j, rng.random_range(0.05..1.0)));
            }
        }
    }
    edges
}

/// `k` distinct sorted node indices out of `n`.
pub fn random_subset(rng: &mut impl Rng, n: usize, k: usize) -> Vec<usize> {
    let mut all: Vec<usize> = (0..n).collect();
    for i in 0..k {
        let j = rng.random_range(i..n);
        all.swap(i, j);
    }
    let mut s = all[..k].to_vec();
    s.sort_unstable();
    s
}

pub fn dense_laplacian(n: usize, edges: &[(usize, usize, f64)]) -> Dense {
    let mut l = vec![vec![0.0; n]; n];
    for &(i, j, w) in edges {
        l[i][i] += w;
        l[j][j] += w;
        l[i][j] -= w;
        l[j][i] -= w;
    }
    l
}

pub fn dense_incidence(n: usize, edges: &[(usize, usize, f64)]) -> Dense {
    edges
        .iter()
        .map(|&(i, j, w)| {
            let mut r = vec![0.0; n];
            r[i] = w;
            r[j] = -w;
            r
        })
        .collect()
}

/// Exact `min ‖Cx‖₁` subject to `x_S = y` for few free nodes. Every row of
/// `C` touches two nodes, so the objective is piecewise linear with kinks on
/// hyperplanes `x_i = x_j` and `x_i = y_k`; the minimum sits on a vertex of
/// that arrangement, and all vertices are enumerated.
pub fn exact_gtv_min(c: &Dense, sampled: &[usize], y: &[f64]) -> f64 {
    let n = c.first().map_or(0, Vec::len);
    let free: Vec<usize> = (0..n).filter(|i| !sampled.contains(i)).collect();
    let m = free.len();
    let mut fixed = vec![0.0; n];
    for (&i, &v) in sampled.iter().zip(y) {
        fixed[i] = v;
    }
    let eval = |vals: &[f64]| {
        let mut x = fixed.clone();
        for (&i, &v) in free.iter().zip(vals) {
            x[i] = v;
        }
        matvec(c, &x).iter().map(|v| v.abs()).sum::<f64>()
    };
    if m == 0 {
        return eval(&[]);
    }
    // Hyperplanes as (normal over free coordinates, offset).
    let mut planes: Vec<(Vec<f64>, f64)> = Vec::new();
    for a in 0..m {
        for &v in y {
            let mut nrm = vec![0.0; m];
            nrm[a] = 1.0;
            planes.push((nrm, v));
        }
        for b in a + 1..m {
            let mut nrm = vec![0.0; m];
            nrm[a] = 1.0;
            nrm[b] = -1.0;
            planes.push((nrm, 0.0));
        }
    }
    let mut best = f64::INFINITY;
    let mut pick = vec![0usize; m];
    fn rec(
        depth: usize,
        start: usize,
        pick: &mut Vec<usize>,
        planes: &[(Vec<f64>, f64)],
        best: &mut f64,
        eval: &dyn Fn(&[f64]) -> f64,
    ) {
        let m = pick.len();
        if depth == m {
            let a: Dense = pick.iter().map(|&p| planes[p].0.clone()).collect();
            let b: Vec<f64> = pick.iter().map(|&p| planes[p].1).collect();
            if let Some(x) = solve(&a, &b) {
                *best = best.min(eval(&x));
            }
            return;
        }
        for p in start..planes.len() {
            pick[depth] = p;
            rec(depth + 1, p + 1, pick, planes, best, eval);
        }
    }
    rec(0, 0, &mut pick, &planes, &mut best, &eval);
    best
}
