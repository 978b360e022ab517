use crate::error::{Error, Result};

/// Planar image with `f64` samples, nominally in `[0, 255]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Image {
    height: usize,
    width: usize,
    channels: usize,
    data: Vec<f64>,
}

impl Image {
    /// `data` is plane-major: all of channel 0 row by row, then channel 1, ...
    pub fn new(height: usize, width: usize, channels: usize, data: Vec<f64>) -> Result<Self> {
        if height == 0 || width == 0 {
            return Err(Error::InvalidImage(format!("empty image {height}x{width}")));
        }
        if channels != 1 && channels != 3 {
            return Err(Error::InvalidImage(format!(
                "channel count must be 1 or 3, got {channels}"
            )));
        }
        let expected = height * width * channels;
        if data.len() != expected {
            return Err(Error::DimensionMismatch {
                context: "Image::new",
                expected,
                got: data.len(),
            });
        }
        if data.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("image samples"));
        }
        Ok(Self {
            height,
            width,
            channels,
            data,
        })
    }

    pub fn filled(height: usize, width: usize, channels: usize, value: f64) -> Result<Self> {
        Self::new(height, width, channels, vec![value; height * width * channels])
    }

    pub fn from_planes(height: usize, width: usize, planes: Vec<Vec<f64>>) -> Result<Self> {
        let channels = planes.len();
        if planes.iter().any(|p| p.len() != height * width) {
            return Err(Error::InvalidImage("plane sizes differ from the grid".into()));
        }
        Self::new(height, width, channels, planes.concat())
    }

    /// Interleaved 8-bit samples, e.g. a raster payload.
    pub fn from_interleaved_u8(height: usize, width: usize, channels: usize, bytes: &[u8]) -> Result<Self> {
        let n = height * width;
        if bytes.len() != n * channels {
            return Err(Error::DimensionMismatch {
                context: "Image::from_interleaved_u8",
                expected: n * channels,
                got: bytes.len(),
            });
        }
        let mut data = vec![0.0; n * channels];
        for (p, px) in bytes.chunks_exact(channels).enumerate() {
            for (c, &b) in px.iter().enumerate() {
                data[c * n + p] = f64::from(b);
            }
        }
        Self::new(height, width, channels, data)
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn channels(&self) -> usize {
        self.channels
    }

    pub fn pixels(&self) -> usize {
        self.height * self.width
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn get(&self, plane: usize, row: usize, col: usize) -> f64 {
        self.data[plane * self.pixels() + row * self.width + col]
    }

    pub fn set(&mut self, plane: usize, row: usize, col: usize, v: f64) {
        let n = self.pixels();
        self.data[plane * n + row * self.width + col] = v;
    }

    pub fn plane(&self, c: usize) -> &[f64] {
        let n = self.pixels();
        &self.data[c * n..(c + 1) * n]
    }

    pub fn planes(&self) -> Vec<Vec<f64>> {
        (0..self.channels).map(|c| self.plane(c).to_vec()).collect()
    }

    /// Samples rounded and clamped to 8 bits, interleaved.
    pub fn to_interleaved_u8(&self) -> Vec<u8> {
        let n = self.pixels();
        let mut out = Vec::with_capacity(n * self.channels);
        for p in 0..n {
            for c in 0..self.channels {
                out.push(self.data[c * n + p].round().clamp(0.0, 255.0) as u8);
            }
        }
        out
    }

    pub fn clipped(&self) -> Image {
        Image {
            data: self.data.iter().map(|v| v.clamp(0.0, 255.0)).collect(),
            ..self.clone()
        }
    }

    pub fn channel(&self, c: usize) -> Result<Image> {
        if c >= self.channels {
            return Err(Error::InvalidImage(format!("no channel {c}")));
        }
        Image::new(self.height, self.width, 1, self.plane(c).to_vec())
    }

    /// Centered `h × w` crop; dimensions larger than the image are clamped.
    pub fn crop_center(&self, h: usize, w: usize) -> Result<Image> {
        let (h, w) = (h.min(self.height), w.min(self.width));
        let (r0, c0) = ((self.height - h) / 2, (self.width - w) / 2);
        let mut planes = vec![Vec::with_capacity(h * w); self.channels];
        for (c, plane) in planes.iter_mut().enumerate() {
            for r in r0..r0 + h {
                for col in c0..c0 + w {
                    plane.push(self.get(c, r, col));
                }
            }
        }
        Image::from_planes(h, w, planes)
    }

    pub fn same_shape(&self, other: &Image) -> bool {
        self.height == other.height && self.width == other.width && self.channels == other.channels
    }
}
