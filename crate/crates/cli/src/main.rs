mod report;
mod run;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use graphinterp::pipeline::{export_params, import_params};
use graphinterp::selftest::{self, Level};
use graphinterp::{BayerPattern, BlockConfig, Error};

use crate::report::RunReport;
use crate::run::{list_images, run_dataset, Algorithm, RunSettings, Task};

const EXIT_USAGE: u8 = 1;
const EXIT_IO: u8 = 2;
const EXIT_SELFTEST: u8 = 3;

/// Graph-based demosaicking and 2x image interpolation.
#[derive(Parser, Debug)]
#[command(name = "graphinterp", version)]
struct Cli {
    #[command(flatten)]
    global: GlobalOpts,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct GlobalOpts {
    /// Block parameter file (`key = value` lines).
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,
    /// bilinear|iglr|igtv for demosaic, bicubic|iglr|igtv for interp2x.
    #[arg(long, global = true, value_name = "NAME")]
    method: Option<String>,
    /// Comma-separated block counts, one report row per count.
    #[arg(long, global = true, value_name = "T[,T...]", value_delimiter = ',')]
    blocks: Option<Vec<usize>>,
    /// Neighborhood radius (2 means a 5x5 window).
    #[arg(long, global = true, value_name = "R")]
    window: Option<usize>,
    #[arg(long, global = true, value_name = "G")]
    gamma: Option<f64>,
    #[arg(long = "admm-iters", global = true, value_name = "N")]
    admm_iters: Option<usize>,
    #[arg(long = "cg-iters", global = true, value_name = "N")]
    cg_iters: Option<usize>,
    /// Center crop applied to every ground-truth image.
    #[arg(long, global = true, value_name = "HxW", value_parser = parse_crop)]
    crop: Option<(usize, usize)>,
    #[arg(long, global = true, value_name = "PATTERN", default_value = "RGGB")]
    bayer: String,
    /// CSV report path; a Markdown twin is written next to it.
    #[arg(long, global = true, value_name = "PATH")]
    report: Option<PathBuf>,
    /// Seed for randomized self-test suites.
    #[arg(long, global = true, value_name = "N", default_value_t = 0)]
    seed: u64,
    /// Process images in overlapping tiles of this size.
    #[arg(long, global = true, value_name = "SIZE")]
    tile: Option<usize>,
    /// Write 0 in the seconds column so reports are byte-reproducible.
    #[arg(long = "no-timing", global = true)]
    no_timing: bool,
    /// Worker threads (defaults to the number of CPUs).
    #[arg(long, global = true, value_name = "N")]
    jobs: Option<usize>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Bayer-mosaic each image, reconstruct it and score it against the original.
    Demosaic(DatasetArgs),
    /// Keep every other row and column, upsample back and score the luma.
    Interp2x(DatasetArgs),
    /// Run the randomized oracle and invariant checks.
    Selftest {
        #[arg(long, default_value = "fast")]
        level: String,
    },
    /// Print the effective block parameters.
    Config,
}

#[derive(Args, Debug)]
struct DatasetArgs {
    /// Directory of ground-truth images (.ppm/.pgm, .png with the png feature).
    #[arg(long, short)]
    input: PathBuf,
    /// Directory for reconstructed images.
    #[arg(long, short)]
    output: Option<PathBuf>,
}

fn parse_crop(s: &str) -> Result<(usize, usize), String> {
    let (h, w) = s
        .split_once(['x', 'X'])
        .ok_or_else(|| format!("expected HxW, got '{s}'"))?;
    let h: usize = h.trim().parse().map_err(|_| format!("bad height in '{s}'"))?;
    let w: usize = w.trim().parse().map_err(|_| format!("bad width in '{s}'"))?;
    if h == 0 || w == 0 {
        return Err("crop dimensions must be positive".into());
    }
    Ok((h, w))
}

enum Failure {
    Usage(String),
    Io(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Io(m) => Failure::Io(m),
            other => Failure::Usage(other.to_string()),
        }
    }
}

fn effective_config(g: &GlobalOpts) -> Result<BlockConfig, Failure> {
    let mut cfg = match &g.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Failure::Io(format!("{}: {e}", path.display())))?;
            import_params(&text).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?
        }
        None => BlockConfig::default(),
    };
    if let Some(b) = g.blocks.as_ref().and_then(|b| b.first()) {
        cfg.blocks = *b;
    }
    if let Some(w) = g.window {
        cfg.window = w;
    }
    if let Some(v) = g.gamma {
        cfg.gamma = v;
    }
    if let Some(v) = g.admm_iters {
        cfg.admm_iters = v;
    }
    if let Some(v) = g.cg_iters {
        cfg.cg_iters = v;
    }
    cfg.validate().map_err(|e| Failure::Usage(e.to_string()))?;
    Ok(cfg)
}

fn write_text(path: &Path, text: &str) -> Result<(), Failure> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        std::fs::create_dir_all(parent).map_err(|e| Failure::Io(format!("{}: {e}", parent.display())))?;
    }
    std::fs::write(path, text).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))
}

fn dataset(task: Task, args: &DatasetArgs, g: &GlobalOpts) -> Result<(), Failure> {
    let cfg = effective_config(g)?;
    let default_method = "igtv";
    let algorithm = Algorithm::parse(task, g.method.as_deref().unwrap_or(default_method)).map_err(Failure::Usage)?;
    let bayer: BayerPattern = g.bayer.parse().map_err(|e: Error| Failure::Usage(e.to_string()))?;
    let blocks = g.blocks.clone().unwrap_or_else(|| vec![cfg.blocks]);
    if blocks.contains(&0) {
        return Err(Failure::Usage("block counts must be >= 1".into()));
    }
    if let Some(dir) = &args.output {
        std::fs::create_dir_all(dir).map_err(|e| Failure::Io(format!("{}: {e}", dir.display())))?;
    }
    let files = list_images(&args.input)?;
    if files.is_empty() {
        eprintln!("warning: no supported images in {}", args.input.display());
    }
    let settings = RunSettings {
        task,
        algorithm,
        config: cfg,
        blocks,
        crop: g.crop,
        bayer,
        tile: g.tile,
        timing: !g.no_timing,
        output: args.output.clone(),
    };
    let report: RunReport = run_dataset(&files, &settings);
    for (file, reason) in &report.skipped {
        eprintln!("warning: skipped {file}: {reason}");
    }
    let csv = report.to_csv();
    let title = match task {
        Task::Demosaic => "Demosaicking",
        Task::Interp2x => "2x interpolation (Y channel)",
    };
    let report_path = g
        .report
        .clone()
        .or_else(|| args.output.as_ref().map(|d| d.join("report.csv")));
    match report_path {
        Some(path) => {
            write_text(&path, &csv)?;
            write_text(&path.with_extension("md"), &report.to_markdown(title))?;
        }
        None => print!("{csv}"),
    }
    for a in report.aggregates() {
        eprintln!(
            "{} T={} images={} psnr={:.4} ssim={:.4}",
            a.method, a.blocks, a.images, a.mean_psnr, a.mean_ssim
        );
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(EXIT_USAGE) } else { ExitCode::SUCCESS };
        }
    };
    if let Some(n) = cli.global.jobs {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: worker pool: {e}");
            return ExitCode::from(EXIT_USAGE);
        }
    }
    let result = match &cli.command {
        Command::Demosaic(a) => dataset(Task::Demosaic, a, &cli.global),
        Command::Interp2x(a) => dataset(Task::Interp2x, a, &cli.global),
        Command::Config => effective_config(&cli.global).map(|cfg| print!("{}", export_params(&cfg))),
        Command::Selftest { level } => {
            let level: Level = match level.parse() {
                Ok(l) => l,
                Err(e) => {
                    eprintln!("error: {e}");
                    return ExitCode::from(EXIT_USAGE);
                }
            };
            let report = selftest::run(level, cli.global.seed);
            print!("{}", report.to_text());
            return if report.passed() { ExitCode::SUCCESS } else { ExitCode::from(EXIT_SELFTEST) };
        }
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(EXIT_USAGE)
        }
        Err(Failure::Io(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(EXIT_IO)
        }
    }
}
