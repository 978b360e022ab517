use std::path::{Path, PathBuf};
use std::time::Instant;

use graphinterp::imaging::{
    bicubic_upsample, bilinear_demosaic, downsample2x, is_supported, luma, mosaic, psnr,
    psnr_channel_mean, read_image, rgb_to_ycbcr, ssim, ssim_channel_mean, write_image,
    ycbcr_to_rgb, BayerPattern, Image,
};
use graphinterp::pipeline::{run_blocks, run_tiled, ChannelObservation, InterpolationTask};
use graphinterp::{BlockConfig, Error, Method, Result};
use rayon::prelude::*;

use crate::report::{Row, RunReport};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Task {
    Demosaic,
    Interp2x,
}

/// Classical baseline or graph pipeline.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Algorithm {
    Baseline,
    Graph(Method),
}

impl Algorithm {
    pub fn parse(task: Task, name: &str) -> std::result::Result<Self, String> {
        match (task, name.to_ascii_lowercase().as_str()) {
            (Task::Demosaic, "bilinear") | (Task::Interp2x, "bicubic") => Ok(Algorithm::Baseline),
            (_, "iglr") => Ok(Algorithm::Graph(Method::Glr)),
            (_, "igtv") => Ok(Algorithm::Graph(Method::Gtv)),
            (Task::Demosaic, other) => Err(format!(
                "unknown demosaic method '{other}' (bilinear, iglr, igtv)"
            )),
            (Task::Interp2x, other) => Err(format!(
                "unknown interpolation method '{other}' (bicubic, iglr, igtv)"
            )),
        }
    }

    pub fn name(self, task: Task) -> &'static str {
        match (self, task) {
            (Algorithm::Baseline, Task::Demosaic) => "bilinear",
            (Algorithm::Baseline, Task::Interp2x) => "bicubic",
            (Algorithm::Graph(Method::Glr), _) => "iglr",
            (Algorithm::Graph(Method::Gtv), _) => "igtv",
        }
    }
}

#[derive(Debug, Clone)]
pub struct RunSettings {
    pub task: Task,
    pub algorithm: Algorithm,
    pub config: BlockConfig,
    /// Block counts to evaluate; ignored by baselines.
    pub blocks: Vec<usize>,
    pub crop: Option<(usize, usize)>,
    pub bayer: BayerPattern,
    pub tile: Option<usize>,
    pub timing: bool,
    pub output: Option<PathBuf>,
}

/// Supported image files directly inside `dir`, sorted by name.
pub fn list_images(dir: &Path) -> Result<Vec<PathBuf>> {
    let entries = std::fs::read_dir(dir).map_err(|e| Error::Io(format!("{}: {e}", dir.display())))?;
    let mut files = Vec::new();
    for entry in entries {
        let path = entry.map_err(|e| Error::Io(e.to_string()))?.path();
        if path.is_file() && is_supported(&path) {
            files.push(path);
        }
    }
    files.sort();
    Ok(files)
}

fn reconstruct(task: &InterpolationTask, cfg: &BlockConfig, tile: Option<usize>) -> Result<(Image, usize)> {
    match tile {
        Some(t) => Ok((run_tiled(task, cfg, t)?, 0)),
        None => {
            let out = run_blocks(task, cfg)?;
            let iters = out.blocks.iter().flat_map(|b| &b.cg_iterations).sum();
            Ok((out.image, iters))
        }
    }
}

struct Outcome {
    image: Image,
    iterations: usize,
}

fn demosaic_one(truth: &Image, s: &RunSettings, cfg: &BlockConfig) -> Result<Outcome> {
    let task = mosaic(truth, s.bayer)?;
    let (image, iterations) = match s.algorithm {
        Algorithm::Baseline => (bilinear_demosaic(&task)?, 0),
        Algorithm::Graph(_) => reconstruct(&task, cfg, s.tile)?,
    };
    Ok(Outcome {
        image: image.clipped(),
        iterations,
    })
}

/// Returns the reconstructed luma and, for color input, an RGB image whose
/// chroma is upsampled bicubically.
fn interp_one(truth: &Image, s: &RunSettings, cfg: &BlockConfig) -> Result<(Outcome, Image)> {
    let (h, w) = (truth.height(), truth.width());
    let (lr, sampling) = downsample2x(truth)?;
    let lr_y = luma(&lr)?.clipped();
    let (y, iterations) = match s.algorithm {
        Algorithm::Baseline => (bicubic_upsample(&lr_y, 2, h, w)?, 0),
        Algorithm::Graph(_) => {
            let obs = ChannelObservation::new(sampling, lr_y.plane(0).to_vec())?;
            reconstruct(&InterpolationTask::new(h, w, vec![obs])?, cfg, s.tile)?
        }
    };
    let y = y.clipped();
    let color = if truth.channels() == 3 {
        let up = bicubic_upsample(&rgb_to_ycbcr(&lr)?, 2, h, w)?;
        let mut planes = up.planes();
        planes[0] = y.plane(0).to_vec();
        ycbcr_to_rgb(&Image::from_planes(h, w, planes)?)?.clipped()
    } else {
        y.clone()
    };
    Ok((Outcome { image: y, iterations }, color))
}

fn process(path: &Path, s: &RunSettings, blocks: usize) -> Result<Row> {
    let mut truth = read_image(path)?;
    if let Some((h, w)) = s.crop {
        truth = truth.crop_center(h, w)?;
    }
    let mut cfg = s.config.clone();
    if let Algorithm::Graph(m) = s.algorithm {
        cfg.method = m;
        cfg.blocks = blocks;
    }
    let start = Instant::now();
    let (psnr_v, psnr_mean, ssim_v, iterations, written) = match s.task {
        Task::Demosaic => {
            let out = demosaic_one(&truth, s, &cfg)?;
            let truth = truth.clipped();
            (
                psnr(&truth, &out.image, 255.0)?,
                psnr_channel_mean(&truth, &out.image, 255.0)?,
                ssim_channel_mean(&truth, &out.image)?,
                out.iterations,
                out.image,
            )
        }
        Task::Interp2x => {
            let (out, color) = interp_one(&truth, s, &cfg)?;
            let y = luma(&truth)?.clipped();
            let p = psnr(&y, &out.image, 255.0)?;
            (p, p, ssim(&y, &out.image)?, out.iterations, color)
        }
    };
    let seconds = if s.timing { start.elapsed().as_secs_f64() } else { 0.0 };
    let method = s.algorithm.name(s.task);
    let blocks = if s.algorithm == Algorithm::Baseline { 0 } else { blocks };
    let file = display_name(path);
    if let Some(dir) = &s.output {
        let stem = path.file_stem().map(|f| f.to_string_lossy().into_owned()).unwrap_or_default();
        let ext = if written.channels() == 3 { "ppm" } else { "pgm" };
        let name = if blocks == 0 {
            format!("{stem}_{method}.{ext}")
        } else {
            format!("{stem}_{method}_t{blocks}.{ext}")
        };
        write_image(&dir.join(name), &written)?;
    }
    Ok(Row {
        file,
        method: method.to_string(),
        blocks,
        psnr: psnr_v,
        psnr_channel_mean: psnr_mean,
        ssim: ssim_v,
        seconds,
        iterations,
    })
}

/// Evaluates every image for every requested block count. Unreadable or
/// unusable images become `skipped` entries; results keep input order.
pub fn run_dataset(files: &[PathBuf], s: &RunSettings) -> RunReport {
    let block_counts: Vec<usize> = match s.algorithm {
        Algorithm::Baseline => vec![0],
        Algorithm::Graph(_) => s.blocks.clone(),
    };
    let jobs: Vec<(&PathBuf, usize)> = files
        .iter()
        .flat_map(|f| block_counts.iter().map(move |&b| (f, b)))
        .collect();
    let results: Vec<(String, Result<Row>)> = jobs
        .par_iter()
        .map(|&(path, blocks)| (display_name(path), process(path, s, blocks)))
        .collect();
    let mut report = RunReport::default();
    for (file, res) in results {
        match res {
            Ok(row) => report.rows.push(row),
            Err(e) => {
                if !report.skipped.iter().any(|(f, _)| f == &file) {
                    report.skipped.push((file, e.to_string()));
                }
            }
        }
    }
    report
}

fn display_name(path: &Path) -> String {
    path.file_name()
        .map(|f| f.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.display().to_string())
}
