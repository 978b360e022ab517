//! Untrained unrolled interpolation: an initial estimate followed by `T`
//! blocks, each learning a graph from the current estimate and re-solving
//! every channel on it.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::glr::{glr_interpolate_from, GlrProblem, SamplingSet};
use crate::graph::{
    build_window_graph, extract_features, gtv_laplacian, laplacian, learn_graph, normalize_rw,
    normalized_laplacian, FeatureScaling, GraphTopology, MetricMatrix, FEATURE_DIM,
};
use crate::gtv::{check_sampled_components, AdmmParams, GtvSystem};
use crate::imaging::Image;
use crate::sparse::CgParams;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Glr,
    Gtv,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Glr => "glr",
            Method::Gtv => "gtv",
        })
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "glr" => Ok(Method::Glr),
            "gtv" => Ok(Method::Gtv),
            _ => Err(Error::InvalidParameter(format!("unknown method '{s}'"))),
        }
    }
}

/// Inner linear solver used inside each block.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CgMode {
    /// Fixed-step accelerated gradient with constant `(cg_alpha, cg_beta)`.
    Schedule,
    /// Textbook conjugate gradient capped at `cg_iters`.
    Exact,
}

impl fmt::Display for CgMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CgMode::Schedule => "schedule",
            CgMode::Exact => "exact",
        })
    }
}

impl FromStr for CgMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "schedule" => Ok(CgMode::Schedule),
            "exact" => Ok(CgMode::Exact),
            _ => Err(Error::InvalidParameter(format!("unknown cg mode '{s}'"))),
        }
    }
}

/// Which Laplacian the GLR solve uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LaplacianKind {
    /// `D^{-1/2} L D^{-1/2}`.
    Normalized,
    /// `D − W`.
    Combinatorial,
}

impl fmt::Display for LaplacianKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            LaplacianKind::Normalized => "normalized",
            LaplacianKind::Combinatorial => "combinatorial",
        })
    }
}

impl FromStr for LaplacianKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "normalized" => Ok(LaplacianKind::Normalized),
            "combinatorial" => Ok(LaplacianKind::Combinatorial),
            _ => Err(Error::InvalidParameter(format!("unknown laplacian '{s}'"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BlockConfig {
    pub method: Method,
    pub blocks: usize,
    /// Chebyshev radius of the neighborhood window (2 gives 5×5).
    pub window: usize,
    pub metric_diag: f64,
    pub spatial_scale: f64,
    pub intensity_scale: f64,
    pub gamma: f64,
    pub admm_iters: usize,
    pub cg_iters: usize,
    pub cg_alpha: f64,
    pub cg_beta: f64,
    pub cg_mode: CgMode,
    pub feas_tol: f64,
    pub glr_laplacian: LaplacianKind,
}

impl Default for BlockConfig {
    fn default() -> Self {
        Self {
            method: Method::Gtv,
            blocks: 5,
            window: 2,
            metric_diag: 1.5,
            spatial_scale: 1.0,
            intensity_scale: 1.0 / 255.0,
            gamma: 10.0,
            admm_iters: 5,
            cg_iters: 10,
            cg_alpha: 0.5,
            cg_beta: 0.3,
            cg_mode: CgMode::Schedule,
            feas_tol: 1e-3,
            glr_laplacian: LaplacianKind::Normalized,
        }
    }
}

impl BlockConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidParameter(m));
        if self.blocks == 0 {
            return bad("blocks must be >= 1".into());
        }
        if self.window == 0 {
            return bad("window radius must be >= 1".into());
        }
        if !(self.metric_diag >= 0.0) || !self.metric_diag.is_finite() {
            return bad(format!("metric_diag must be >= 0, got {}", self.metric_diag));
        }
        for (name, v) in [
            ("spatial_scale", self.spatial_scale),
            ("intensity_scale", self.intensity_scale),
            ("cg_alpha", self.cg_alpha),
            ("cg_beta", self.cg_beta),
        ] {
            if !v.is_finite() {
                return bad(format!("{name} must be finite"));
            }
        }
        self.admm_params()?.validate()
    }

    pub fn cg_params(&self) -> Result<CgParams> {
        match self.cg_mode {
            CgMode::Schedule => CgParams::constant_schedule(self.cg_iters, self.cg_alpha, self.cg_beta),
            CgMode::Exact => CgParams::new(1e-10, self.cg_iters),
        }
    }

    pub fn admm_params(&self) -> Result<AdmmParams> {
        Ok(AdmmParams {
            gamma: self.gamma,
            admm_iters: self.admm_iters,
            cg: self.cg_params()?,
            feas_tol: self.feas_tol,
            ..AdmmParams::default()
        })
    }

    fn scaling(&self) -> FeatureScaling {
        FeatureScaling {
            intensity: self.intensity_scale,
            spatial: self.spatial_scale,
        }
    }
}

const CONFIG_KEYS: [&str; 14] = [
    "method",
    "blocks",
    "window",
    "metric_diag",
    "spatial_scale",
    "intensity_scale",
    "gamma",
    "admm_iters",
    "cg_iters",
    "cg_alpha",
    "cg_beta",
    "cg_mode",
    "feas_tol",
    "glr_laplacian",
];

/// Canonical `key = value` text for a configuration.
pub fn export_params(cfg: &BlockConfig) -> String {
    let values = [
        cfg.method.to_string(),
        cfg.blocks.to_string(),
        cfg.window.to_string(),
        cfg.metric_diag.to_string(),
        cfg.spatial_scale.to_string(),
        cfg.intensity_scale.to_string(),
        cfg.gamma.to_string(),
        cfg.admm_iters.to_string(),
        cfg.cg_iters.to_string(),
        cfg.cg_alpha.to_string(),
        cfg.cg_beta.to_string(),
        cfg.cg_mode.to_string(),
        cfg.feas_tol.to_string(),
        cfg.glr_laplacian.to_string(),
    ];
    let mut out = String::from("# graphinterp block parameters\n");
    for (k, v) in CONFIG_KEYS.iter().zip(values) {
        out.push_str(&format!("{k} = {v}\n"));
    }
    out
}

/// Parses `key = value` lines over the defaults. Blank lines and `#`
/// comments are ignored; unknown or repeated keys are errors.
pub fn import_params(text: &str) -> Result<BlockConfig> {
    let mut cfg = BlockConfig::default();
    let mut seen = Vec::new();
    for (n, raw) in text.lines().enumerate() {
        let line_no = n + 1;
        let err = |message: String| Error::Config {
            line: line_no,
            message,
        };
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| err(format!("expected 'key = value', got '{line}'")))?;
        let (key, value) = (key.trim(), value.trim());
        if !CONFIG_KEYS.contains(&key) {
            return Err(err(format!("unknown key '{key}'")));
        }
        if seen.contains(&key) {
            return Err(err(format!("duplicate key '{key}'")));
        }
        seen.push(key);
        let bad = |what: &str| err(format!("invalid {what} for '{key}': '{value}'"));
        let float = || value.parse::<f64>().map_err(|_| bad("number"));
        let count = || value.parse::<usize>().map_err(|_| bad("count"));
        match key {
            "method" => cfg.method = value.parse().map_err(|_| bad("method"))?,
            "blocks" => cfg.blocks = count()?,
            "window" => cfg.window = count()?,
            "metric_diag" => cfg.metric_diag = float()?,
            "spatial_scale" => cfg.spatial_scale = float()?,
            "intensity_scale" => cfg.intensity_scale = float()?,
            "gamma" => cfg.gamma = float()?,
            "admm_iters" => cfg.admm_iters = count()?,
            "cg_iters" => cfg.cg_iters = count()?,
            "cg_alpha" => cfg.cg_alpha = float()?,
            "cg_beta" => cfg.cg_beta = float()?,
            "cg_mode" => cfg.cg_mode = value.parse().map_err(|_| bad("cg mode"))?,
            "feas_tol" => cfg.feas_tol = float()?,
            "glr_laplacian" => cfg.glr_laplacian = value.parse().map_err(|_| bad("laplacian"))?,
            _ => unreachable!("key list checked above"),
        }
    }
    cfg.validate().map_err(|e| Error::Config {
        line: 0,
        message: e.to_string(),
    })?;
    Ok(cfg)
}

/// Observed samples of one channel.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelObservation {
    sampling: SamplingSet,
    values: Vec<f64>,
}

impl ChannelObservation {
    pub fn new(sampling: SamplingSet, values: Vec<f64>) -> Result<Self> {
        if values.len() != sampling.len() {
            return Err(Error::DimensionMismatch {
                context: "channel observation",
                expected: sampling.len(),
                got: values.len(),
            });
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("observations"));
        }
        Ok(Self { sampling, values })
    }

    pub fn sampling(&self) -> &SamplingSet {
        &self.sampling
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }
}

/// A pixel grid with a partial observation per channel.
#[derive(Debug, Clone, PartialEq)]
pub struct InterpolationTask {
    height: usize,
    width: usize,
    channels: Vec<ChannelObservation>,
}

impl InterpolationTask {
    pub fn new(height: usize, width: usize, channels: Vec<ChannelObservation>) -> Result<Self> {
        if height == 0 || width == 0 {
            return Err(Error::InvalidImage(format!("empty grid {height}x{width}")));
        }
        if channels.len() != 1 && channels.len() != 3 {
            return Err(Error::InvalidImage(format!(
                "tasks have 1 or 3 channels, got {}",
                channels.len()
            )));
        }
        for ch in &channels {
            if ch.sampling.n_total() != height * width {
                return Err(Error::DimensionMismatch {
                    context: "task sampling grid",
                    expected: height * width,
                    got: ch.sampling.n_total(),
                });
            }
        }
        Ok(Self {
            height,
            width,
            channels,
        })
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn channels(&self) -> &[ChannelObservation] {
        &self.channels
    }

    /// Restriction to the rectangle `rows × cols`.
    fn crop(&self, rows: std::ops::Range<usize>, cols: std::ops::Range<usize>) -> Result<Self> {
        let (h, w) = (rows.len(), cols.len());
        let channels = self
            .channels
            .iter()
            .map(|ch| {
                let mut idx = Vec::new();
                let mut vals = Vec::new();
                for (&i, &v) in ch.sampling.indices().iter().zip(&ch.values) {
                    let (r, c) = (i / self.width, i % self.width);
                    if rows.contains(&r) && cols.contains(&c) {
                        idx.push((r - rows.start) * w + (c - cols.start));
                        vals.push(v);
                    }
                }
                ChannelObservation::new(SamplingSet::new(h * w, idx)?, vals)
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(h, w, channels)
    }
}

/// Inverse-distance weighted fill of one channel: every missing pixel
/// averages the known pixels within Chebyshev `radius`, doubling the radius
/// until at least one is found.
pub fn init_estimate_channel(
    height: usize,
    width: usize,
    obs: &ChannelObservation,
    radius: usize,
) -> Result<Vec<f64>> {
    if obs.sampling.n_total() != height * width {
        return Err(Error::DimensionMismatch {
            context: "init_estimate grid",
            expected: height * width,
            got: obs.sampling.n_total(),
        });
    }
    let n = height * width;
    let mut known = vec![None; n];
    for (&i, &v) in obs.sampling.indices().iter().zip(&obs.values) {
        known[i] = Some(v);
    }
    let max_r = height.max(width);
    let mut out = vec![0.0; n];
    for row in 0..height {
        for col in 0..width {
            let p = row * width + col;
            if let Some(v) = known[p] {
                out[p] = v;
                continue;
            }
            let mut r = radius.max(1);
            loop {
                let (mut num, mut den) = (0.0, 0.0);
                for nr in row.saturating_sub(r)..(row + r + 1).min(height) {
                    for nc in col.saturating_sub(r)..(col + r + 1).min(width) {
                        if let Some(v) = known[nr * width + nc] {
                            let dr = nr as f64 - row as f64;
                            let dc = nc as f64 - col as f64;
                            let wgt = 1.0 / (dr * dr + dc * dc).sqrt();
                            num += wgt * v;
                            den += wgt;
                        }
                    }
                }
                if den > 0.0 {
                    out[p] = num / den;
                    break;
                }
                if r >= max_r {
                    return Err(Error::InvalidSampling("channel has no known pixels".into()));
                }
                r *= 2;
            }
        }
    }
    Ok(out)
}

/// Initial estimate of every channel over a `window × window` neighborhood.
pub fn init_estimate(task: &InterpolationTask, window: usize) -> Result<Vec<Vec<f64>>> {
    task.channels
        .iter()
        .map(|ch| init_estimate_channel(task.height, task.width, ch, window / 2))
        .collect()
}

/// What one block did.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockTrace {
    pub edges: usize,
    /// Address of the graph each channel was solved on.
    pub channel_graphs: Vec<usize>,
    /// Inner linear-solver iterations per channel, summed over ADMM steps.
    pub cg_iterations: Vec<usize>,
    /// Final `‖Hx − y‖∞` per channel before the sample projection (GTV only).
    pub feasibility: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct PipelineOutput {
    pub image: Image,
    pub initial: Image,
    pub blocks: Vec<BlockTrace>,
}

struct ChannelResult {
    x: Vec<f64>,
    graph: usize,
    cg_iterations: usize,
    feasibility: f64,
}

fn solve_channel(
    cfg: &BlockConfig,
    graph: &Arc<GraphTopology>,
    shared: &SharedOperators,
    obs: &ChannelObservation,
    prev: &[f64],
) -> Result<ChannelResult> {
    let graph_id = Arc::as_ptr(graph) as usize;
    let (mut x, cg_iterations, feasibility) = match shared {
        SharedOperators::Glr(ln) => {
            let problem = GlrProblem::new(ln.clone(), obs.sampling.clone(), obs.values.clone())?;
            let sol = glr_interpolate_from(&problem, Some(prev), &cfg.cg_params()?)?;
            let iters = sol.solve.map_or(0, |s| s.iterations);
            (sol.x, iters, 0.0)
        }
        SharedOperators::Gtv { c_bar, gram } => {
            check_sampled_components(c_bar, &obs.sampling)?;
            let sys = GtvSystem::with_gram(c_bar, gram, &obs.sampling, &obs.values)?;
            let sol = sys.solve(prev, &cfg.admm_params()?)?;
            let iters = sol.history.iter().map(|h| h.cg_iterations).sum();
            (sol.x, iters, sol.feasibility)
        }
    };
    x.iter_mut().for_each(|v| *v = v.clamp(0.0, 255.0));
    obs.sampling.project(&mut x, &obs.values);
    Ok(ChannelResult {
        x,
        graph: graph_id,
        cg_iterations,
        feasibility,
    })
}

enum SharedOperators {
    Glr(crate::sparse::CsrMatrix),
    Gtv {
        c_bar: crate::sparse::CsrMatrix,
        gram: crate::sparse::CsrMatrix,
    },
}

/// Runs `cfg.blocks` graph-learning + solve blocks over the whole grid.
pub fn run_blocks(task: &InterpolationTask, cfg: &BlockConfig) -> Result<PipelineOutput> {
    cfg.validate()?;
    let (h, w) = (task.height, task.width);
    let mut x = init_estimate(task, 2 * cfg.window + 1)?;
    let initial = Image::from_planes(h, w, x.clone())?;
    if h * w < 2 {
        return Ok(PipelineOutput {
            image: initial.clone(),
            initial,
            blocks: Vec::new(),
        });
    }
    let pairs = build_window_graph(h, w, cfg.window)?;
    let metric = MetricMatrix::uniform(FEATURE_DIM, cfg.metric_diag)?;
    let mut blocks = Vec::with_capacity(cfg.blocks);
    for _ in 0..cfg.blocks {
        let estimate = Image::from_planes(h, w, x.clone())?;
        let features = extract_features(&estimate, cfg.scaling())?;
        let graph = Arc::new(learn_graph(&features, &pairs, &metric)?.with_grid(h, w)?);
        let shared = match cfg.method {
            Method::Glr => {
                let l = laplacian(&graph);
                SharedOperators::Glr(match cfg.glr_laplacian {
                    LaplacianKind::Normalized => normalized_laplacian(&l, &graph.degrees())?,
                    LaplacianKind::Combinatorial => l,
                })
            }
            Method::Gtv => {
                let c_bar = normalize_rw(&graph)?;
                let gram = gtv_laplacian(&c_bar);
                SharedOperators::Gtv { c_bar, gram }
            }
        };
        let results = task
            .channels
            .par_iter()
            .zip(x.par_iter())
            .map(|(obs, prev)| solve_channel(cfg, &graph, &shared, obs, prev))
            .collect::<Result<Vec<_>>>()?;
        blocks.push(BlockTrace {
            edges: graph.n_edges(),
            channel_graphs: results.iter().map(|r| r.graph).collect(),
            cg_iterations: results.iter().map(|r| r.cg_iterations).collect(),
            feasibility: results.iter().map(|r| r.feasibility).collect(),
        });
        x = results.into_iter().map(|r| r.x).collect();
    }
    Ok(PipelineOutput {
        image: Image::from_planes(h, w, x)?,
        initial,
        blocks,
    })
}

/// Tile origins covering `0..len` with tiles of `tile` and stride `tile - overlap`.
fn tile_starts(len: usize, tile: usize, overlap: usize) -> Vec<usize> {
    if len <= tile {
        return vec![0];
    }
    let stride = tile - overlap;
    let mut starts: Vec<usize> = (0..).map(|k| k * stride).take_while(|&s| s + tile < len).collect();
    starts.push(len - tile);
    starts
}

/// Processes overlapping `tile × tile` windows independently and averages
/// the overlaps. Falls back to [`run_blocks`] when one tile covers the grid.
pub fn run_tiled(task: &InterpolationTask, cfg: &BlockConfig, tile: usize) -> Result<Image> {
    let overlap = 4 * cfg.window;
    if tile <= overlap + 1 {
        return Err(Error::InvalidParameter(format!(
            "tile size {tile} must exceed the overlap {overlap} + 1"
        )));
    }
    let (h, w) = (task.height, task.width);
    if h <= tile && w <= tile {
        return Ok(run_blocks(task, cfg)?.image);
    }
    let rows = tile_starts(h, tile, overlap);
    let cols = tile_starts(w, tile, overlap);
    let jobs: Vec<(usize, usize)> = rows
        .iter()
        .flat_map(|&r| cols.iter().map(move |&c| (r, c)))
        .collect();
    let outputs = jobs
        .par_iter()
        .map(|&(r0, c0)| {
            let (r1, c1) = ((r0 + tile).min(h), (c0 + tile).min(w));
            let sub = task.crop(r0..r1, c0..c1)?;
            Ok((r0, c0, run_blocks(&sub, cfg)?.image))
        })
        .collect::<Result<Vec<_>>>()?;
    let nc = task.channels.len();
    let mut acc = vec![vec![0.0; h * w]; nc];
    let mut count = vec![0.0; h * w];
    for (r0, c0, img) in &outputs {
        for r in 0..img.height() {
            for c in 0..img.width() {
                let p = (r0 + r) * w + c0 + c;
                count[p] += 1.0;
                for (ch, plane) in acc.iter_mut().enumerate() {
                    plane[p] += img.get(ch, r, c);
                }
            }
        }
    }
    for plane in &mut acc {
        for (v, n) in plane.iter_mut().zip(&count) {
            *v /= n;
        }
    }
    for (plane, obs) in acc.iter_mut().zip(&task.channels) {
        obs.sampling.project(plane, &obs.values);
    }
    Image::from_planes(h, w, acc)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn task_1ch(h: usize, w: usize, idx: Vec<usize>, vals: Vec<f64>) -> InterpolationTask {
        let obs = ChannelObservation::new(SamplingSet::new(h * w, idx).unwrap(), vals).unwrap();
        InterpolationTask::new(h, w, vec![obs]).unwrap()
    }

    #[test]
    fn init_all_known_is_identity() {
        let t = task_1ch(2, 2, vec![0, 1, 2, 3], vec![1.0, 2.0, 3.0, 4.0]);
        assert_eq!(init_estimate(&t, 5).unwrap()[0], vec![1.0, 2.0, 3.0, 4.0]);
    }

    #[test]
    fn init_single_known() {
        let t = task_1ch(3, 3, vec![4], vec![7.0]);
        assert!(init_estimate(&t, 5).unwrap()[0].iter().all(|&v| (v - 7.0).abs() < 1e-12));
    }

    #[test]
    fn init_equidistant_average() {
        let t = task_1ch(1, 3, vec![0, 2], vec![0.0, 10.0]);
        assert_eq!(init_estimate(&t, 5).unwrap()[0][1], 5.0);
    }

    #[test]
    fn init_window_doubles() {
        let t = task_1ch(1, 12, vec![0], vec![3.0]);
        let x = init_estimate(&t, 5).unwrap();
        assert!(x[0].iter().all(|&v| (v - 3.0).abs() < 1e-12));
    }

    #[test]
    fn config_round_trip() {
        let text = export_params(&BlockConfig::default());
        assert!(text.contains("gamma = 10\n"));
        assert!(text.contains("cg_alpha = 0.5\n"));
        assert!(text.contains("cg_beta = 0.3\n"));
        let back = import_params(&text).unwrap();
        assert_eq!(back, BlockConfig::default());
        assert_eq!(export_params(&back), text);
    }

    #[test]
    fn config_errors_name_the_key() {
        let e = import_params("gamma = 3\nfrobnicate = 1\n").unwrap_err();
        match e {
            Error::Config { line, message } => {
                assert_eq!(line, 2);
                assert!(message.contains("frobnicate"));
            }
            other => panic!("unexpected {other:?}"),
        }
        assert!(import_params("gamma 3").is_err());
        assert!(import_params("blocks = -1").is_err());
        assert!(import_params("blocks = 0").is_err());
        assert!(import_params("gamma = 1\ngamma = 2").is_err());
    }

    #[test]
    fn config_comments_and_partial() {
        let cfg = import_params("# hi\n\nmethod = glr  # trailing\nblocks=1\n").unwrap();
        assert_eq!(cfg.method, Method::Glr);
        assert_eq!(cfg.blocks, 1);
        assert_eq!(cfg.gamma, 10.0);
    }

    fn constant_task() -> InterpolationTask {
        let idx: Vec<usize> = (0..36).step_by(3).collect();
        let n = idx.len();
        task_1ch(6, 6, idx, vec![42.0; n])
    }

    fn max_dev(img: &Image, c: f64) -> f64 {
        img.data().iter().fold(0.0f64, |m, v| m.max((v - c).abs()))
    }

    #[test]
    fn constant_observations_glr_combinatorial() {
        let cfg = BlockConfig {
            method: Method::Glr,
            blocks: 2,
            glr_laplacian: LaplacianKind::Combinatorial,
            cg_mode: CgMode::Exact,
            cg_iters: 200,
            ..BlockConfig::default()
        };
        let out = run_blocks(&constant_task(), &cfg).unwrap();
        assert!(max_dev(&out.image, 42.0) < 1e-9);
    }

    #[test]
    fn normalized_laplacian_bends_constants_at_the_border() {
        // D^{-1/2} L D^{-1/2} annihilates D^{1/2}·1, not 1, so free pixels
        // with smaller degree than their sampled neighbours are pulled off c.
        let cfg = BlockConfig {
            method: Method::Glr,
            blocks: 1,
            cg_mode: CgMode::Exact,
            cg_iters: 200,
            ..BlockConfig::default()
        };
        let out = run_blocks(&constant_task(), &cfg).unwrap();
        assert!(max_dev(&out.image, 42.0) > 1.0);
    }

    #[test]
    fn constant_observations_gtv() {
        let cfg = BlockConfig {
            blocks: 2,
            ..BlockConfig::default()
        };
        let out = run_blocks(&constant_task(), &cfg).unwrap();
        // Five iterations leave the x-update biased by at most mu_init / gamma.
        assert!(max_dev(&out.image, 42.0) < 0.1 / 10.0);
        let cfg = BlockConfig {
            blocks: 2,
            admm_iters: 100,
            cg_mode: CgMode::Exact,
            cg_iters: 200,
            ..BlockConfig::default()
        };
        let out = run_blocks(&constant_task(), &cfg).unwrap();
        assert!(max_dev(&out.image, 42.0) < 1e-6);
    }

    #[test]
    fn tile_starts_cover() {
        assert_eq!(tile_starts(10, 16, 8), vec![0]);
        assert_eq!(tile_starts(40, 16, 8), vec![0, 8, 16, 24]);
        assert_eq!(tile_starts(17, 16, 8), vec![0, 1]);
    }
}
