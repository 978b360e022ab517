//! Image containers, Bayer and 2× samplers, classical baselines, color
//! conversion, quality metrics and raster I/O.

mod color;
mod image;
mod metrics;
#[cfg(feature = "png")]
mod png;
mod pnm;
mod resample;
mod sampling;

use std::path::Path;

pub use color::{luma, rgb_to_ycbcr, ycbcr_to_rgb};
pub use image::Image;
pub use metrics::{mse, psnr, psnr_channel_mean, ssim, ssim_channel_mean};
#[cfg(feature = "png")]
pub use png::decode_png;
pub use pnm::{decode_pnm, encode_pnm};
pub use resample::{bicubic_upsample, bilinear_demosaic, cubic_kernel};
pub use sampling::{downsample2x, mosaic, BayerPattern};

use crate::error::{Error, Result};

/// File extensions [`read_image`] understands in this build.
pub fn supported_extensions() -> &'static [&'static str] {
    if cfg!(feature = "png") {
        &["ppm", "pgm", "pnm", "png"]
    } else {
        &["ppm", "pgm", "pnm"]
    }
}

fn extension(path: &Path) -> String {
    path.extension()
        .and_then(|e| e.to_str())
        .map(str::to_ascii_lowercase)
        .unwrap_or_default()
}

/// Decodes by content: PNG signature or Netpbm magic.
pub fn decode_image(bytes: &[u8]) -> Result<Image> {
    if bytes.starts_with(b"\x89PNG") {
        #[cfg(feature = "png")]
        return decode_png(bytes);
        #[cfg(not(feature = "png"))]
        return Err(Error::Unsupported("PNG support not compiled in".into()));
    }
    decode_pnm(bytes)
}

pub fn read_image(path: &Path) -> Result<Image> {
    let bytes = std::fs::read(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    decode_image(&bytes).map_err(|e| match e {
        Error::Format(m) => Error::Format(format!("{}: {m}", path.display())),
        other => other,
    })
}

/// Writes P5/P6 regardless of the extension given.
pub fn write_image(path: &Path, img: &Image) -> Result<()> {
    std::fs::write(path, encode_pnm(img)).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

/// Whether `path` has an extension [`read_image`] accepts.
pub fn is_supported(path: &Path) -> bool {
    supported_extensions().contains(&extension(path).as_str())
}
