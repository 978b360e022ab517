//! Binary Netpbm rasters: P5 (gray) and P6 (RGB), maxval 255.

use super::Image;
use crate::error::{Error, Result};

struct Cursor<'a> {
    buf: &'a [u8],
    pos: usize,
}

impl Cursor<'_> {
    fn skip_space_and_comments(&mut self) {
        while let Some(&b) = self.buf.get(self.pos) {
            if b == b'#' {
                while let Some(&c) = self.buf.get(self.pos) {
                    self.pos += 1;
                    if c == b'\n' || c == b'\r' {
                        break;
                    }
                }
            } else if b.is_ascii_whitespace() {
                self.pos += 1;
            } else {
                break;
            }
        }
    }

    fn number(&mut self, what: &str) -> Result<usize> {
        self.skip_space_and_comments();
        let start = self.pos;
        while self.buf.get(self.pos).is_some_and(u8::is_ascii_digit) {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(Error::Format(format!("expected {what} at byte {start}")));
        }
        std::str::from_utf8(&self.buf[start..self.pos])
            .ok()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| Error::Format(format!("{what} out of range")))
    }
}

/// Decodes a P5 or P6 byte stream. Trailing bytes after the raster are ignored.
pub fn decode_pnm(bytes: &[u8]) -> Result<Image> {
    let channels = match bytes.get(..2) {
        Some(b"P5") => 1,
        Some(b"P6") => 3,
        Some([b'P', b'1'..=b'7']) => {
            return Err(Error::Unsupported(format!(
                "Netpbm variant {} (only binary P5/P6)",
                String::from_utf8_lossy(&bytes[..2])
            )))
        }
        _ => return Err(Error::Format("missing P5/P6 magic".into())),
    };
    let mut cur = Cursor { buf: bytes, pos: 2 };
    if !cur.buf.get(cur.pos).is_some_and(|b| b.is_ascii_whitespace() || *b == b'#') {
        return Err(Error::Format("magic must be followed by whitespace".into()));
    }
    let width = cur.number("width")?;
    let height = cur.number("height")?;
    let maxval = cur.number("maxval")?;
    if width == 0 || height == 0 {
        return Err(Error::Format(format!("zero dimension {width}x{height}")));
    }
    if maxval != 255 {
        return Err(Error::Unsupported(format!("maxval {maxval} (only 255)")));
    }
    match cur.buf.get(cur.pos) {
        Some(b) if b.is_ascii_whitespace() => cur.pos += 1,
        _ => return Err(Error::Format("header must end with one whitespace byte".into())),
    }
    let need = width
        .checked_mul(height)
        .and_then(|n| n.checked_mul(channels))
        .ok_or_else(|| Error::Format("raster size overflows".into()))?;
    let payload = &bytes[cur.pos..];
    if payload.len() < need {
        return Err(Error::Format(format!(
            "truncated raster: need {need} bytes, have {}",
            payload.len()
        )));
    }
    Image::from_interleaved_u8(height, width, channels, &payload[..need])
}

/// Encodes as P5 (one channel) or P6 (three); samples are rounded and clamped to 8 bits.
pub fn encode_pnm(img: &Image) -> Vec<u8> {
    let magic = if img.channels() == 1 { "P5" } else { "P6" };
    let mut out = format!("{magic}\n{} {}\n255\n", img.width(), img.height()).into_bytes();
    out.extend(img.to_interleaved_u8());
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_p6_2x2() {
        let mut b = b"P6\n2 2\n255\n".to_vec();
        b.extend(0..12u8);
        let img = decode_pnm(&b).unwrap();
        assert_eq!((img.height(), img.width(), img.channels()), (2, 2, 3));
        assert_eq!(encode_pnm(&img), b);
    }

    #[test]
    fn comments_and_whitespace() {
        let mut b = b"P5 # gray\n# another\n 3\t1 #w h\n255\n".to_vec();
        b.extend([7, 8, 9]);
        let img = decode_pnm(&b).unwrap();
        assert_eq!(img.data(), &[7.0, 8.0, 9.0]);
    }

    #[test]
    fn errors() {
        assert!(matches!(decode_pnm(b"P6\n2 2\n65535\n"), Err(Error::Unsupported(_))));
        assert!(matches!(decode_pnm(b"P3\n1 1\n255\n1 2 3"), Err(Error::Unsupported(_))));
        assert!(matches!(decode_pnm(b"GIF89a"), Err(Error::Format(_))));
        assert!(matches!(decode_pnm(b"P6\n2 2\n255\n\x01\x02"), Err(Error::Format(_))));
        assert!(matches!(decode_pnm(b"P6\n0 2\n255\n"), Err(Error::Format(_))));
        assert!(matches!(decode_pnm(b"P6\n2"), Err(Error::Format(_))));
        assert!(matches!(decode_pnm(b"P5\n99999999999999999999999 1\n255\n"), Err(Error::Format(_))));
        assert!(matches!(decode_pnm(b"P5\n4294967296 4294967296\n255\n"), Err(Error::Format(_))));
        assert!(matches!(decode_pnm(b"P5x1 1\n255\n\x00"), Err(Error::Format(_))));
    }
}
