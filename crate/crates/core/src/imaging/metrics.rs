use super::Image;
use crate::error::{Error, Result};

fn require_same(a: &Image, b: &Image) -> Result<()> {
    if !a.same_shape(b) {
        return Err(Error::InvalidImage(format!(
            "shape mismatch: {}x{}x{} vs {}x{}x{}",
            a.height(),
            a.width(),
            a.channels(),
            b.height(),
            b.width(),
            b.channels()
        )));
    }
    Ok(())
}

/// Mean squared error pooled over every sample of every channel.
pub fn mse(a: &Image, b: &Image) -> Result<f64> {
    require_same(a, b)?;
    let sum: f64 = a.data().iter().zip(b.data()).map(|(x, y)| (x - y) * (x - y)).sum();
    Ok(sum / a.data().len() as f64)
}

fn psnr_from_mse(mse: f64, peak: f64) -> f64 {
    if mse == 0.0 {
        f64::INFINITY
    } else {
        10.0 * (peak * peak / mse).log10()
    }
}

/// `10·log10(peak² / MSE)` with the MSE pooled across channels (CPSNR for
/// color images); `+∞` when the images are identical.
pub fn psnr(a: &Image, b: &Image, peak: f64) -> Result<f64> {
    Ok(psnr_from_mse(mse(a, b)?, peak))
}

/// Arithmetic mean of the per-channel PSNR values.
pub fn psnr_channel_mean(a: &Image, b: &Image, peak: f64) -> Result<f64> {
    require_same(a, b)?;
    let mut total = 0.0;
    for c in 0..a.channels() {
        total += psnr(&a.channel(c)?, &b.channel(c)?, peak)?;
    }
    Ok(total / a.channels() as f64)
}

const SSIM_SIGMA: f64 = 1.5;
const SSIM_RADIUS: usize = 5;
const SSIM_K1: f64 = 0.01;
const SSIM_K2: f64 = 0.03;
const SSIM_L: f64 = 255.0;

fn gaussian_taps() -> [f64; 2 * SSIM_RADIUS + 1] {
    let mut t = [0.0; 2 * SSIM_RADIUS + 1];
    for (k, v) in t.iter_mut().enumerate() {
        let x = k as f64 - SSIM_RADIUS as f64;
        *v = (-x * x / (2.0 * SSIM_SIGMA * SSIM_SIGMA)).exp();
    }
    let s: f64 = t.iter().sum();
    t.iter_mut().for_each(|v| *v /= s);
    t
}

/// Separable Gaussian filter evaluated only where the window fits.
fn filter_valid(src: &[f64], h: usize, w: usize, taps: &[f64]) -> Vec<f64> {
    let k = taps.len();
    let (oh, ow) = (h - k + 1, w - k + 1);
    let mut tmp = vec![0.0; h * ow];
    for r in 0..h {
        for c in 0..ow {
            tmp[r * ow + c] = taps.iter().enumerate().map(|(t, g)| g * src[r * w + c + t]).sum();
        }
    }
    let mut out = vec![0.0; oh * ow];
    for r in 0..oh {
        for c in 0..ow {
            out[r * ow + c] = taps.iter().enumerate().map(|(t, g)| g * tmp[(r + t) * ow + c]).sum();
        }
    }
    out
}

/// Mean local SSIM over all positions of an 11×11 Gaussian window
/// (σ = 1.5, K₁ = 0.01, K₂ = 0.03, L = 255). Single-channel inputs only.
pub fn ssim(a: &Image, b: &Image) -> Result<f64> {
    require_same(a, b)?;
    if a.channels() != 1 {
        return Err(Error::InvalidImage(format!(
            "ssim takes one channel, got {}",
            a.channels()
        )));
    }
    let win = 2 * SSIM_RADIUS + 1;
    let (h, w) = (a.height(), a.width());
    if h < win || w < win {
        return Err(Error::InvalidImage(format!(
            "ssim needs at least {win}x{win} pixels, got {h}x{w}"
        )));
    }
    let taps = gaussian_taps();
    let (x, y) = (a.data(), b.data());
    let xx: Vec<f64> = x.iter().map(|v| v * v).collect();
    let yy: Vec<f64> = y.iter().map(|v| v * v).collect();
    let xy: Vec<f64> = x.iter().zip(y).map(|(p, q)| p * q).collect();
    let ux = filter_valid(x, h, w, &taps);
    let uy = filter_valid(y, h, w, &taps);
    let uxx = filter_valid(&xx, h, w, &taps);
    let uyy = filter_valid(&yy, h, w, &taps);
    let uxy = filter_valid(&xy, h, w, &taps);
    let c1 = (SSIM_K1 * SSIM_L).powi(2);
    let c2 = (SSIM_K2 * SSIM_L).powi(2);
    let total: f64 = (0..ux.len())
        .map(|i| {
            let (mx, my) = (ux[i], uy[i]);
            let vx = uxx[i] - mx * mx;
            let vy = uyy[i] - my * my;
            let vxy = uxy[i] - mx * my;
            ((2.0 * mx * my + c1) * (2.0 * vxy + c2)) / ((mx * mx + my * my + c1) * (vx + vy + c2))
        })
        .sum();
    Ok(total / ux.len() as f64)
}

/// SSIM averaged over channels.
pub fn ssim_channel_mean(a: &Image, b: &Image) -> Result<f64> {
    require_same(a, b)?;
    let mut total = 0.0;
    for c in 0..a.channels() {
        total += ssim(&a.channel(c)?, &b.channel(c)?)?;
    }
    Ok(total / a.channels() as f64)
}
