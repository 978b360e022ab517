use super::Image;
use crate::error::{Error, Result};
use crate::pipeline::{init_estimate_channel, InterpolationTask};

/// Mirror index into `0..n` without repeating the edge sample.
fn reflect101(i: isize, n: usize) -> usize {
    if n == 1 {
        return 0;
    }
    let period = 2 * (n as isize - 1);
    let m = i.rem_euclid(period);
    (if m >= n as isize { period - m } else { m }) as usize
}

const GREEN_KERNEL: [[f64; 3]; 3] = [[0.0, 1.0, 0.0], [1.0, 4.0, 1.0], [0.0, 1.0, 0.0]];
const CHROMA_KERNEL: [[f64; 3]; 3] = [[1.0, 2.0, 1.0], [2.0, 4.0, 2.0], [1.0, 2.0, 1.0]];

/// Bilinear demosaicking as normalized convolution: every missing sample is
/// the kernel-weighted mean of the observed same-color samples around it.
/// With a Bayer layout this is the usual per-position stencil set; pixels with
/// no observed neighbor fall back to inverse-distance weighting.
pub fn bilinear_demosaic(task: &InterpolationTask) -> Result<Image> {
    let (h, w) = (task.height(), task.width());
    let mut planes = Vec::with_capacity(task.channels().len());
    for (c, obs) in task.channels().iter().enumerate() {
        let kernel = if task.channels().len() == 3 && c == 1 {
            &GREEN_KERNEL
        } else {
            &CHROMA_KERNEL
        };
        let mut known = vec![false; h * w];
        let mut vals = vec![0.0; h * w];
        for (&i, &v) in obs.sampling().indices().iter().zip(obs.values()) {
            known[i] = true;
            vals[i] = v;
        }
        let mut out = vals.clone();
        let mut holes = false;
        for row in 0..h {
            for col in 0..w {
                let p = row * w + col;
                if known[p] {
                    continue;
                }
                let (mut num, mut den) = (0.0, 0.0);
                for (dr, krow) in kernel.iter().enumerate() {
                    for (dc, &k) in krow.iter().enumerate() {
                        if k == 0.0 {
                            continue;
                        }
                        let r = reflect101(row as isize + dr as isize - 1, h);
                        let cc = reflect101(col as isize + dc as isize - 1, w);
                        let q = r * w + cc;
                        if known[q] {
                            num += k * vals[q];
                            den += k;
                        }
                    }
                }
                if den > 0.0 {
                    out[p] = num / den;
                } else {
                    holes = true;
                }
            }
        }
        if holes {
            let idw = init_estimate_channel(h, w, obs, 2)?;
            for row in 0..h {
                for col in 0..w {
                    let p = row * w + col;
                    if !known[p] && !has_neighbor(&known, kernel, row, col, h, w) {
                        out[p] = idw[p];
                    }
                }
            }
        }
        planes.push(out);
    }
    Image::from_planes(h, w, planes)
}

fn has_neighbor(known: &[bool], kernel: &[[f64; 3]; 3], row: usize, col: usize, h: usize, w: usize) -> bool {
    kernel.iter().enumerate().any(|(dr, krow)| {
        krow.iter().enumerate().any(|(dc, &k)| {
            k != 0.0
                && known[reflect101(row as isize + dr as isize - 1, h) * w
                    + reflect101(col as isize + dc as isize - 1, w)]
        })
    })
}

/// Catmull-Rom cubic kernel (`a = −0.5`).
pub fn cubic_kernel(x: f64) -> f64 {
    const A: f64 = -0.5;
    let x = x.abs();
    if x <= 1.0 {
        ((A + 2.0) * x - (A + 3.0)) * x * x + 1.0
    } else if x < 2.0 {
        ((A * x - 5.0 * A) * x + 8.0 * A) * x - 4.0 * A
    } else {
        0.0
    }
}

/// Taps and weights for output index `o` at `o / factor` on an input of length `n`.
fn taps(o: usize, factor: usize, n: usize) -> [(usize, f64); 4] {
    let pos = o as f64 / factor as f64;
    let base = pos.floor() as isize;
    let frac = pos - base as f64;
    let mut t = [(0, 0.0); 4];
    for (k, slot) in t.iter_mut().enumerate() {
        let off = k as isize - 1;
        *slot = (reflect101(base + off, n), cubic_kernel(frac - off as f64));
    }
    t
}

/// Separable bicubic upsampling by an integer factor onto an
/// `out_h × out_w` grid; output `(factor·i, factor·j)` reproduces input `(i, j)`.
pub fn bicubic_upsample(lr: &Image, factor: usize, out_h: usize, out_w: usize) -> Result<Image> {
    if factor == 0 {
        return Err(Error::InvalidParameter("upsampling factor must be >= 1".into()));
    }
    if out_h.div_ceil(factor) != lr.height() || out_w.div_ceil(factor) != lr.width() {
        return Err(Error::InvalidImage(format!(
            "{}x{} input does not match a {out_h}x{out_w} output at factor {factor}",
            lr.height(),
            lr.width()
        )));
    }
    let (lh, lw) = (lr.height(), lr.width());
    let col_taps: Vec<_> = (0..out_w).map(|o| taps(o, factor, lw)).collect();
    let row_taps: Vec<_> = (0..out_h).map(|o| taps(o, factor, lh)).collect();
    let mut planes = Vec::with_capacity(lr.channels());
    for c in 0..lr.channels() {
        let src = lr.plane(c);
        let mut horiz = vec![0.0; lh * out_w];
        for r in 0..lh {
            for (o, t) in col_taps.iter().enumerate() {
                horiz[r * out_w + o] = t.iter().map(|&(i, k)| k * src[r * lw + i]).sum();
            }
        }
        let mut out = vec![0.0; out_h * out_w];
        for (o, t) in row_taps.iter().enumerate() {
            for col in 0..out_w {
                out[o * out_w + col] = t.iter().map(|&(i, k)| k * horiz[i * out_w + col]).sum();
            }
        }
        planes.push(out);
    }
    Image::from_planes(out_h, out_w, planes)
}
