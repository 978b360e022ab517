//! Graph-based signal interpolation on pixel grids.
//!
//! Missing samples are recovered by minimizing either a quadratic graph
//! Laplacian regularizer (solved by conjugate gradient) or graph total
//! variation (an LP solved by ADMM), on graphs whose weights are learned
//! from the current estimate. The [`pipeline`] module stacks such solves into
//! fixed-depth blocks; [`imaging`] supplies Bayer and 2× samplers, baselines,
//! metrics and raster I/O.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod glr;
pub mod graph;
pub mod gtv;
pub mod imaging;
pub mod pipeline;
pub mod selftest;
pub mod sparse;

pub use error::{Error, Result};
pub use glr::{glr_interpolate, GlrProblem, SamplingSet};
pub use graph::GraphTopology;
pub use gtv::{gtv_interpolate, AdmmParams};
pub use imaging::{BayerPattern, Image};
pub use pipeline::{run_blocks, BlockConfig, InterpolationTask, Method};
pub use sparse::{CgParams, CsrMatrix};
