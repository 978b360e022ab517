//! 8-bit PNG decoding (gray, gray+alpha, RGB, RGBA, palette).

use super::Image;
use crate::error::{Error, Result};

pub fn decode_png(bytes: &[u8]) -> Result<Image> {
    let mut decoder = ::png::Decoder::new(std::io::Cursor::new(bytes));
    decoder.set_transformations(::png::Transformations::EXPAND);
    let mut reader = decoder.read_info().map_err(|e| Error::Format(format!("png: {e}")))?;
    let (width, height) = {
        let info = reader.info();
        (info.width as usize, info.height as usize)
    };
    let size = reader
        .output_buffer_size()
        .ok_or_else(|| Error::Format("png: image too large".into()))?;
    let mut buf = vec![0; size];
    let frame = reader
        .next_frame(&mut buf)
        .map_err(|e| Error::Format(format!("png: {e}")))?;
    if frame.bit_depth != ::png::BitDepth::Eight {
        return Err(Error::Unsupported(format!("png bit depth {:?}", frame.bit_depth)));
    }
    let stride = frame.line_size;
    let in_ch = frame.color_type.samples();
    let out_ch = match frame.color_type {
        ::png::ColorType::Grayscale | ::png::ColorType::GrayscaleAlpha => 1,
        ::png::ColorType::Rgb | ::png::ColorType::Rgba => 3,
        ::png::ColorType::Indexed => {
            return Err(Error::Unsupported("unexpanded palette png".into()))
        }
    };
    let mut packed = Vec::with_capacity(width * height * out_ch);
    for row in buf[..frame.buffer_size()].chunks_exact(stride).take(height) {
        for px in row[..width * in_ch].chunks_exact(in_ch) {
            packed.extend_from_slice(&px[..out_ch]);
        }
    }
    Image::from_interleaved_u8(height, width, out_ch, &packed)
}
