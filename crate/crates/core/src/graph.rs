//! Pixel similarity graphs: features, Mahalanobis edge weights, window
//! topology, and the Laplacian / incidence operators derived from them.

use std::collections::{HashSet, VecDeque};

use crate::error::{Error, Result};
use crate::imaging::Image;
use crate::sparse::CsrMatrix;

/// Undirected weighted edge with `i < j`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Edge {
    pub i: usize,
    pub j: usize,
    pub w: f64,
}

/// Positive undirected graph without self-loops. Edges keep insertion order,
/// which fixes the row order of [`incidence`] and [`normalize_rw`].
#[derive(Debug, Clone, PartialEq)]
pub struct GraphTopology {
    n_nodes: usize,
    edges: Vec<Edge>,
    grid: Option<(usize, usize)>,
}

impl GraphTopology {
    pub fn new(n_nodes: usize, edges: Vec<Edge>) -> Result<Self> {
        let mut seen = HashSet::with_capacity(edges.len());
        for e in &edges {
            if e.i == e.j {
                return Err(Error::InvalidGraph(format!("self-loop at node {}", e.i)));
            }
            if e.i > e.j {
                return Err(Error::InvalidGraph(format!(
                    "edge ({}, {}) must satisfy i < j",
                    e.i, e.j
                )));
            }
            if e.j >= n_nodes {
                return Err(Error::InvalidGraph(format!(
                    "edge ({}, {}) outside {n_nodes} nodes",
                    e.i, e.j
                )));
            }
            if !(e.w >= 0.0) || !e.w.is_finite() {
                return Err(Error::InvalidGraph(format!(
                    "edge ({}, {}) has weight {}",
                    e.i, e.j, e.w
                )));
            }
            if !seen.insert((e.i, e.j)) {
                return Err(Error::InvalidGraph(format!(
                    "duplicate edge ({}, {})",
                    e.i, e.j
                )));
            }
        }
        Ok(Self {
            n_nodes,
            edges,
            grid: None,
        })
    }

    /// Convenience constructor from `(i, j, w)` triples.
    pub fn from_weighted(n_nodes: usize, edges: &[(usize, usize, f64)]) -> Result<Self> {
        Self::new(
            n_nodes,
            edges.iter().map(|&(i, j, w)| Edge { i, j, w }).collect(),
        )
    }

    pub fn with_grid(mut self, height: usize, width: usize) -> Result<Self> {
        if height * width != self.n_nodes {
            return Err(Error::DimensionMismatch {
                context: "graph grid",
                expected: self.n_nodes,
                got: height * width,
            });
        }
        self.grid = Some((height, width));
        Ok(self)
    }

    pub fn n_nodes(&self) -> usize {
        self.n_nodes
    }

    pub fn n_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn grid(&self) -> Option<(usize, usize)> {
        self.grid
    }

    /// Weighted degree of every node.
    pub fn degrees(&self) -> Vec<f64> {
        let mut d = vec![0.0; self.n_nodes];
        for e in &self.edges {
            d[e.i] += e.w;
            d[e.j] += e.w;
        }
        d
    }

    /// Connected components over edges with positive weight; one label per node.
    pub fn component_labels(&self) -> Vec<usize> {
        let mut adj = vec![Vec::new(); self.n_nodes];
        for e in self.edges.iter().filter(|e| e.w > 0.0) {
            adj[e.i].push(e.j);
            adj[e.j].push(e.i);
        }
        let mut label = vec![usize::MAX; self.n_nodes];
        let mut next = 0;
        let mut queue = VecDeque::new();
        for start in 0..self.n_nodes {
            if label[start] != usize::MAX {
                continue;
            }
            label[start] = next;
            queue.push_back(start);
            while let Some(u) = queue.pop_front() {
                for &v in &adj[u] {
                    if label[v] == usize::MAX {
                        label[v] = next;
                        queue.push_back(v);
                    }
                }
            }
            next += 1;
        }
        label
    }

    pub fn is_connected(&self) -> bool {
        self.n_nodes == 0 || self.component_labels().iter().all(|&c| c == 0)
    }
}

/// Per-node feature rows, `n × dim`, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureSet {
    n: usize,
    dim: usize,
    data: Vec<f64>,
}

impl FeatureSet {
    pub fn new(n: usize, dim: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != n * dim {
            return Err(Error::DimensionMismatch {
                context: "FeatureSet",
                expected: n * dim,
                got: data.len(),
            });
        }
        if data.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("features"));
        }
        Ok(Self { n, dim, data })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }
}

/// Diagonal PSD metric for the Mahalanobis distance.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricMatrix {
    diag: Vec<f64>,
}

impl MetricMatrix {
    pub fn new(diag: Vec<f64>) -> Result<Self> {
        if diag.iter().any(|&v| !(v >= 0.0) || !v.is_finite()) {
            return Err(Error::InvalidParameter(
                "metric diagonal entries must be finite and >= 0".into(),
            ));
        }
        Ok(Self { diag })
    }

    pub fn uniform(dim: usize, value: f64) -> Result<Self> {
        Self::new(vec![value; dim])
    }

    pub fn diag(&self) -> &[f64] {
        &self.diag
    }
}

/// Feature dimension: three color intensities and two grid coordinates.
pub const FEATURE_DIM: usize = 5;

/// Scaling applied to the raw quantities before they enter the metric.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FeatureScaling {
    pub intensity: f64,
    pub spatial: f64,
}

impl Default for FeatureScaling {
    fn default() -> Self {
        Self {
            intensity: 1.0,
            spatial: 1.0,
        }
    }
}

/// One feature row per pixel: `(r, g, b, row·s, col·s)` read from the current
/// estimate. Single-channel images repeat their intensity in all three slots.
pub fn extract_features(estimate: &Image, scaling: FeatureScaling) -> Result<FeatureSet> {
    let (h, w, c) = (estimate.height(), estimate.width(), estimate.channels());
    let planes: [usize; 3] = match c {
        1 => [0, 0, 0],
        3 => [0, 1, 2],
        other => {
            return Err(Error::InvalidImage(format!(
                "features need 1 or 3 channels, got {other}"
            )))
        }
    };
    let n = h * w;
    let mut data = Vec::with_capacity(n * FEATURE_DIM);
    for row in 0..h {
        for col in 0..w {
            for &p in &planes {
                data.push(estimate.get(p, row, col) * scaling.intensity);
            }
            data.push(row as f64 * scaling.spatial);
            data.push(col as f64 * scaling.spatial);
        }
    }
    FeatureSet::new(n, FEATURE_DIM, data)
}

/// Squared Mahalanobis distance `(fi − fj)ᵀ M (fi − fj)` for diagonal `M`.
pub fn mahalanobis_d(fi: &[f64], fj: &[f64], metric: &MetricMatrix) -> Result<f64> {
    if fi.len() != fj.len() || fi.len() != metric.diag.len() {
        return Err(Error::DimensionMismatch {
            context: "mahalanobis_d",
            expected: metric.diag.len(),
            got: fi.len().max(fj.len()),
        });
    }
    Ok(fi
        .iter()
        .zip(fj)
        .zip(&metric.diag)
        .map(|((a, b), m)| m * (a - b) * (a - b))
        .sum())
}

/// `exp(−d)`.
pub fn edge_weight(d: f64) -> Result<f64> {
    if !(d >= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "distance must be non-negative, got {d}"
        )));
    }
    Ok((-d).exp())
}

/// All pixel pairs within Chebyshev distance `radius` on an `height × width`
/// grid, as `(i, j)` with `i < j` in row-major order.
pub fn build_window_graph(height: usize, width: usize, radius: usize) -> Result<Vec<(usize, usize)>> {
    if height * width < 2 {
        return Err(Error::InvalidGraph(format!(
            "grid {height}x{width} has fewer than two pixels"
        )));
    }
    if radius == 0 {
        return Err(Error::InvalidParameter("window radius must be >= 1".into()));
    }
    let r = radius as isize;
    let mut pairs = Vec::new();
    for row in 0..height as isize {
        for col in 0..width as isize {
            let i = (row * width as isize + col) as usize;
            // Forward half of the window: same row to the right, then rows below.
            for dr in 0..=r {
                let dc_start = if dr == 0 { 1 } else { -r };
                for dc in dc_start..=r {
                    let (nr, nc) = (row + dr, col + dc);
                    if nr < height as isize && nc >= 0 && nc < width as isize {
                        pairs.push((i, (nr * width as isize + nc) as usize));
                    }
                }
            }
        }
    }
    pairs.sort_unstable();
    Ok(pairs)
}

/// Weighted graph over `pairs` with `w = exp(−d_M(f_i, f_j))`.
pub fn learn_graph(
    features: &FeatureSet,
    pairs: &[(usize, usize)],
    metric: &MetricMatrix,
) -> Result<GraphTopology> {
    let edges = pairs
        .iter()
        .map(|&(i, j)| {
            let d = mahalanobis_d(features.row(i), features.row(j), metric)?;
            Ok(Edge {
                i,
                j,
                w: edge_weight(d)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    GraphTopology::new(features.len(), edges)
}

/// Combinatorial Laplacian `L = D − W`.
pub fn laplacian(g: &GraphTopology) -> CsrMatrix {
    let deg = g.degrees();
    let triplets = g
        .edges
        .iter()
        .flat_map(|e| [(e.i, e.j, -e.w), (e.j, e.i, -e.w)])
        .chain(deg.iter().enumerate().map(|(i, &d)| (i, i, d)));
    CsrMatrix::from_triplets(g.n_nodes, g.n_nodes, triplets)
        .expect("topology invariants guarantee valid triplets")
}

/// Symmetric normalized Laplacian `D^{-1/2} L D^{-1/2}`.
pub fn normalized_laplacian(l: &CsrMatrix, degrees: &[f64]) -> Result<CsrMatrix> {
    if l.n_rows() != degrees.len() || l.n_cols() != degrees.len() {
        return Err(Error::DimensionMismatch {
            context: "normalized_laplacian",
            expected: l.n_rows(),
            got: degrees.len(),
        });
    }
    if let Some(i) = degrees.iter().position(|&d| !(d > 0.0)) {
        return Err(Error::IsolatedNode(i));
    }
    let s: Vec<f64> = degrees.iter().map(|d| 1.0 / d.sqrt()).collect();
    let mut ln = l.scale_rows_cols(&s, &s)?;
    // The diagonal is exactly one by construction; pin it against rounding.
    let diag_fix: Vec<f64> = ln.diagonal().iter().map(|v| 1.0 - v).collect();
    if diag_fix.iter().any(|v| *v != 0.0) {
        ln = ln.add_diagonal(&diag_fix)?;
    }
    Ok(ln)
}

/// Incidence matrix `C` (M × N): row k holds `+w` at `i` and `−w` at `j`.
pub fn incidence(g: &GraphTopology) -> CsrMatrix {
    let triplets = g
        .edges
        .iter()
        .enumerate()
        .flat_map(|(k, e)| [(k, e.i, e.w), (k, e.j, -e.w)]);
    CsrMatrix::from_triplets(g.n_edges(), g.n_nodes, triplets)
        .expect("topology invariants guarantee valid triplets")
}

/// Random-walk normalized incidence `C̄` (2M × N).
///
/// Edge k contributes row `2k` (direction i→j, weight `w/deg(i)`) and row
/// `2k+1` (direction j→i, weight `w/deg(j)`). Each row holds `+w̄` at its
/// source node and `−w̄` at its target, so outgoing weights of every node sum
/// to one.
pub fn normalize_rw(g: &GraphTopology) -> Result<CsrMatrix> {
    let deg = g.degrees();
    if let Some(i) = deg.iter().position(|&d| !(d > 0.0)) {
        return Err(Error::IsolatedNode(i));
    }
    let triplets = g.edges.iter().enumerate().flat_map(|(k, e)| {
        let wij = e.w / deg[e.i];
        let wji = e.w / deg[e.j];
        [
            (2 * k, e.i, wij),
            (2 * k, e.j, -wij),
            (2 * k + 1, e.j, wji),
            (2 * k + 1, e.i, -wji),
        ]
    });
    CsrMatrix::from_triplets(2 * g.n_edges(), g.n_nodes, triplets)
}

/// `L̄ = C̄ᵀ C̄`.
pub fn gtv_laplacian(c_bar: &CsrMatrix) -> CsrMatrix {
    c_bar
        .transpose()
        .matmul(c_bar)
        .expect("Cᵀ and C always conform")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn triangle() -> GraphTopology {
        GraphTopology::from_weighted(3, &[(0, 1, 0.5), (1, 2, 1.0 / 3.0), (0, 2, 0.5)]).unwrap()
    }

    #[test]
    fn topology_rejects_invalid_edges() {
        assert!(GraphTopology::from_weighted(2, &[(0, 0, 1.0)]).is_err());
        assert!(GraphTopology::from_weighted(2, &[(1, 0, 1.0)]).is_err());
        assert!(GraphTopology::from_weighted(2, &[(0, 2, 1.0)]).is_err());
        assert!(GraphTopology::from_weighted(2, &[(0, 1, -1.0)]).is_err());
        assert!(GraphTopology::from_weighted(2, &[(0, 1, 1.0), (0, 1, 2.0)]).is_err());
    }

    #[test]
    fn features_constant_gray_no_spatial() {
        let img = Image::filled(3, 4, 1, 77.0).unwrap();
        let f = extract_features(
            &img,
            FeatureScaling {
                intensity: 1.0,
                spatial: 0.0,
            },
        )
        .unwrap();
        for i in 1..f.len() {
            assert_eq!(f.row(i), f.row(0));
        }
    }

    #[test]
    fn features_two_pixel_column() {
        let img = Image::from_planes(2, 1, vec![vec![0.0, 255.0]]).unwrap();
        let f = extract_features(&img, FeatureScaling::default()).unwrap();
        assert_eq!(f.row(0), &[0.0, 0.0, 0.0, 0.0, 0.0]);
        assert_eq!(f.row(1), &[255.0, 255.0, 255.0, 1.0, 0.0]);
    }

    #[test]
    fn features_scale_linearly() {
        let img = Image::from_planes(1, 2, vec![vec![10.0, 20.0]]).unwrap();
        let a = extract_features(&img, FeatureScaling { intensity: 1.0, spatial: 1.0 }).unwrap();
        let b = extract_features(&img, FeatureScaling { intensity: 0.5, spatial: 1.0 }).unwrap();
        assert_eq!(b.row(1)[0], a.row(1)[0] * 0.5);
    }

    #[test]
    fn mahalanobis_examples() {
        let m = MetricMatrix::uniform(2, 1.0).unwrap();
        assert_eq!(mahalanobis_d(&[3.0, 4.0], &[3.0, 4.0], &m).unwrap(), 0.0);
        assert_eq!(mahalanobis_d(&[1.0, 0.0], &[0.0, 0.0], &m).unwrap(), 1.0);
        let m15 = MetricMatrix::uniform(2, 1.5).unwrap();
        assert!((mahalanobis_d(&[1.0, 2.0], &[0.0, 0.0], &m15).unwrap() - 7.5).abs() < 1e-15);
        assert!(mahalanobis_d(&[1.0], &[0.0, 0.0], &m).is_err());
    }

    #[test]
    fn edge_weight_examples() {
        assert_eq!(edge_weight(0.0).unwrap(), 1.0);
        assert!((edge_weight(2f64.ln()).unwrap() - 0.5).abs() < 1e-15);
        assert!((edge_weight(7.5).unwrap() - 5.530_843_701_478_336e-4).abs() < 1e-15);
        assert!(edge_weight(-1.0).is_err());
    }

    #[test]
    fn window_graph_counts() {
        assert_eq!(build_window_graph(1, 2, 2).unwrap().len(), 1);
        assert_eq!(build_window_graph(3, 3, 1).unwrap().len(), 20);
        assert_eq!(build_window_graph(2, 2, 2).unwrap().len(), 6);
        assert!(build_window_graph(1, 1, 2).is_err());
        assert!(build_window_graph(2, 2, 0).is_err());
    }

    #[test]
    fn laplacian_examples() {
        let single = GraphTopology::from_weighted(2, &[(0, 1, 1.0)]).unwrap();
        let l = laplacian(&single).to_dense();
        assert_eq!(l.row(0), &[1.0, -1.0]);
        assert_eq!(l.row(1), &[-1.0, 1.0]);

        let l = laplacian(&triangle());
        assert_eq!(l.diagonal(), vec![1.0, 0.5 + 1.0 / 3.0, 0.5 + 1.0 / 3.0]);
        assert_eq!(l.get(1, 2), -1.0 / 3.0);

        let empty = GraphTopology::new(3, vec![]).unwrap();
        assert_eq!(laplacian(&empty).spmv(&[1.0, 2.0, 3.0]).unwrap(), vec![0.0; 3]);
    }

    #[test]
    fn normalized_laplacian_examples() {
        for w in [1.0, 4.0] {
            let g = GraphTopology::from_weighted(2, &[(0, 1, w)]).unwrap();
            let ln = normalized_laplacian(&laplacian(&g), &g.degrees()).unwrap().to_dense();
            assert_eq!(ln.row(0), &[1.0, -1.0]);
            assert_eq!(ln.row(1), &[-1.0, 1.0]);
        }
        let g = triangle();
        let ln = normalized_laplacian(&laplacian(&g), &g.degrees()).unwrap();
        assert_eq!(ln.diagonal(), vec![1.0, 1.0, 1.0]);
        let isolated = GraphTopology::from_weighted(3, &[(0, 1, 1.0)]).unwrap();
        assert!(matches!(
            normalized_laplacian(&laplacian(&isolated), &isolated.degrees()),
            Err(Error::IsolatedNode(2))
        ));
    }

    #[test]
    fn incidence_triangle_follows_edge_definition() {
        let c = incidence(&triangle()).to_dense();
        assert_eq!(c.row(0), &[0.5, -0.5, 0.0]);
        assert_eq!(c.row(1), &[0.0, 1.0 / 3.0, -1.0 / 3.0]);
        assert_eq!(c.row(2), &[0.5, 0.0, -0.5]);
    }

    #[test]
    fn normalize_rw_single_edge() {
        let g = GraphTopology::from_weighted(2, &[(0, 1, 0.37)]).unwrap();
        let cb = normalize_rw(&g).unwrap().to_dense();
        assert_eq!(cb.row(0), &[1.0, -1.0]);
        assert_eq!(cb.row(1), &[-1.0, 1.0]);
        let lb = gtv_laplacian(&normalize_rw(&g).unwrap()).to_dense();
        assert_eq!(lb.row(0), &[2.0, -2.0]);
        assert_eq!(lb.row(1), &[-2.0, 2.0]);
    }

    #[test]
    fn normalize_rw_rejects_isolated() {
        let g = GraphTopology::from_weighted(3, &[(0, 1, 1.0)]).unwrap();
        assert!(matches!(normalize_rw(&g), Err(Error::IsolatedNode(2))));
    }

    #[test]
    fn connectivity() {
        assert!(triangle().is_connected());
        let g = GraphTopology::from_weighted(4, &[(0, 1, 1.0), (2, 3, 1.0)]).unwrap();
        assert!(!g.is_connected());
        assert_eq!(g.component_labels(), vec![0, 0, 1, 1]);
    }
}
