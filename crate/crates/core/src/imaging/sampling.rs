use std::fmt;
use std::str::FromStr;

use super::Image;
use crate::error::{Error, Result};
use crate::glr::SamplingSet;
use crate::pipeline::{ChannelObservation, InterpolationTask};

/// Color filter layout of the top-left 2×2 cell, read row by row.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum BayerPattern {
    #[default]
    Rggb,
    Bggr,
    Grbg,
    Gbrg,
}

impl BayerPattern {
    pub const ALL: [BayerPattern; 4] = [Self::Rggb, Self::Bggr, Self::Grbg, Self::Gbrg];

    fn cell(self) -> [usize; 4] {
        match self {
            Self::Rggb => [0, 1, 1, 2],
            Self::Bggr => [2, 1, 1, 0],
            Self::Grbg => [1, 0, 2, 1],
            Self::Gbrg => [1, 2, 0, 1],
        }
    }

    /// Channel index (0 = R, 1 = G, 2 = B) observed at a pixel.
    pub fn channel_at(self, row: usize, col: usize) -> usize {
        self.cell()[(row % 2) * 2 + col % 2]
    }
}

impl fmt::Display for BayerPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Rggb => "RGGB",
            Self::Bggr => "BGGR",
            Self::Grbg => "GRBG",
            Self::Gbrg => "GBRG",
        })
    }
}

impl FromStr for BayerPattern {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().as_str() {
            "RGGB" => Ok(Self::Rggb),
            "BGGR" => Ok(Self::Bggr),
            "GRBG" => Ok(Self::Grbg),
            "GBRG" => Ok(Self::Gbrg),
            _ => Err(Error::InvalidParameter(format!("unknown Bayer pattern '{s}'"))),
        }
    }
}

/// Keeps one color per pixel according to `pat`.
pub fn mosaic(img: &Image, pat: BayerPattern) -> Result<InterpolationTask> {
    if img.channels() != 3 {
        return Err(Error::InvalidImage(format!(
            "mosaic needs an RGB image, got {} channel(s)",
            img.channels()
        )));
    }
    let (h, w) = (img.height(), img.width());
    let mut idx = vec![Vec::new(); 3];
    let mut vals = vec![Vec::new(); 3];
    for row in 0..h {
        for col in 0..w {
            let c = pat.channel_at(row, col);
            idx[c].push(row * w + col);
            vals[c].push(img.get(c, row, col));
        }
    }
    let channels = idx
        .into_iter()
        .zip(vals)
        .map(|(i, v)| {
            let sampling = SamplingSet::new(h * w, i).map_err(|_| {
                Error::InvalidImage(format!("{h}x{w} image is too small for a full Bayer cell"))
            })?;
            ChannelObservation::new(sampling, v)
        })
        .collect::<Result<Vec<_>>>()?;
    InterpolationTask::new(h, w, channels)
}

/// Pixels at even rows and even columns; returns the low-resolution image
/// and the positions it occupies on the original grid.
pub fn downsample2x(img: &Image) -> Result<(Image, SamplingSet)> {
    let (h, w) = (img.height(), img.width());
    let (lh, lw) = (h.div_ceil(2), w.div_ceil(2));
    let mut indices = Vec::with_capacity(lh * lw);
    for r in (0..h).step_by(2) {
        for c in (0..w).step_by(2) {
            indices.push(r * w + c);
        }
    }
    let planes = (0..img.channels())
        .map(|ch| indices.iter().map(|&i| img.plane(ch)[i]).collect())
        .collect();
    Ok((Image::from_planes(lh, lw, planes)?, SamplingSet::new(h * w, indices)?))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rgb(h: usize, w: usize) -> Image {
        let n = h * w;
        Image::new(h, w, 3, (0..3 * n).map(|v| v as f64).collect()).unwrap()
    }

    #[test]
    fn rggb_2x2_layout() {
        let t = mosaic(&rgb(2, 2), BayerPattern::Rggb).unwrap();
        assert_eq!(t.channels()[0].sampling().indices(), &[0]);
        assert_eq!(t.channels()[1].sampling().indices(), &[1, 2]);
        assert_eq!(t.channels()[2].sampling().indices(), &[3]);
        assert_eq!(t.channels()[2].values(), &[11.0]);
    }

    #[test]
    fn counts_on_4x4() {
        for pat in BayerPattern::ALL {
            let t = mosaic(&rgb(4, 4), pat).unwrap();
            let k: Vec<usize> = t.channels().iter().map(|c| c.sampling().len()).collect();
            assert_eq!(k, vec![4, 8, 4], "{pat}");
        }
    }

    #[test]
    fn mosaic_rejects_gray() {
        let g = Image::filled(4, 4, 1, 1.0).unwrap();
        assert!(mosaic(&g, BayerPattern::Rggb).is_err());
    }

    #[test]
    fn pattern_parse() {
        assert_eq!("gbrg".parse::<BayerPattern>().unwrap(), BayerPattern::Gbrg);
        assert!("RGBG".parse::<BayerPattern>().is_err());
        for p in BayerPattern::ALL {
            assert_eq!(p.to_string().parse::<BayerPattern>().unwrap(), p);
        }
    }

    #[test]
    fn downsample_examples() {
        let img = Image::new(2, 2, 1, vec![1.0, 2.0, 3.0, 4.0]).unwrap();
        let (lr, s) = downsample2x(&img).unwrap();
        assert_eq!((lr.height(), lr.width()), (1, 1));
        assert_eq!(lr.data(), &[1.0]);
        assert_eq!(s.indices(), &[0]);

        let img = Image::new(4, 4, 1, (0..16).map(f64::from).collect()).unwrap();
        let (lr, s) = downsample2x(&img).unwrap();
        assert_eq!(s.indices(), &[0, 2, 8, 10]);
        assert_eq!(lr.data(), &[0.0, 2.0, 8.0, 10.0]);

        let img = Image::filled(5, 3, 3, 9.0).unwrap();
        let (lr, s) = downsample2x(&img).unwrap();
        assert_eq!((lr.height(), lr.width()), (3, 2));
        assert_eq!(s.len(), 6);
        assert!(lr.data().iter().all(|&v| v == 9.0));
    }
}
