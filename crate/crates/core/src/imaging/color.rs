use super::Image;
use crate::error::{Error, Result};

fn require_rgb(img: &Image, what: &str) -> Result<()> {
    if img.channels() != 3 {
        return Err(Error::InvalidImage(format!(
            "{what} needs 3 channels, got {}",
            img.channels()
        )));
    }
    Ok(())
}

/// Full-range BT.601 RGB → YCbCr.
pub fn rgb_to_ycbcr(img: &Image) -> Result<Image> {
    require_rgb(img, "rgb_to_ycbcr")?;
    let (r, g, b) = (img.plane(0), img.plane(1), img.plane(2));
    let n = img.pixels();
    let mut y = Vec::with_capacity(n);
    let mut cb = Vec::with_capacity(n);
    let mut cr = Vec::with_capacity(n);
    for i in 0..n {
        y.push(0.299 * r[i] + 0.587 * g[i] + 0.114 * b[i]);
        cb.push(128.0 - 0.168_736 * r[i] - 0.331_264 * g[i] + 0.5 * b[i]);
        cr.push(128.0 + 0.5 * r[i] - 0.418_688 * g[i] - 0.081_312 * b[i]);
    }
    Image::from_planes(img.height(), img.width(), vec![y, cb, cr])
}

/// Inverse of [`rgb_to_ycbcr`].
pub fn ycbcr_to_rgb(img: &Image) -> Result<Image> {
    require_rgb(img, "ycbcr_to_rgb")?;
    let (y, cb, cr) = (img.plane(0), img.plane(1), img.plane(2));
    let n = img.pixels();
    let mut r = Vec::with_capacity(n);
    let mut g = Vec::with_capacity(n);
    let mut b = Vec::with_capacity(n);
    for i in 0..n {
        let (u, v) = (cb[i] - 128.0, cr[i] - 128.0);
        r.push(y[i] + 1.402 * v);
        g.push(y[i] - 0.344_136 * u - 0.714_136 * v);
        b.push(y[i] + 1.772 * u);
    }
    Image::from_planes(img.height(), img.width(), vec![r, g, b])
}

/// Luma plane: Y of an RGB image, or the image itself when it is gray.
pub fn luma(img: &Image) -> Result<Image> {
    match img.channels() {
        1 => Ok(img.clone()),
        _ => rgb_to_ycbcr(img)?.channel(0),
    }
}
