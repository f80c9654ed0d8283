//! Row-major 8-bit rasters and binary masks, plus PNG codecs for both.

use crate::geom::{Point, Rect};
use std::io::Cursor;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum RasterError {
    #[error("raster data length {actual} does not match {width}x{height}x{channels}")]
    LengthMismatch {
        width: usize,
        height: usize,
        channels: usize,
        actual: usize,
    },
    #[error("raster must be at least 1x1")]
    Empty,
    #[error("unsupported channel count {0} (expected 1 or 4)")]
    Channels(usize),
    #[error("png decode: {0}")]
    Decode(String),
    #[error("png encode: {0}")]
    Encode(String),
    #[error("unsupported png format: {0}")]
    Format(String),
}

/// 8-bit raster, origin top-left, y down. One channel for masks, four (RGBA) for artwork.
#[derive(Clone, PartialEq, Eq)]
pub struct Raster {
    width: usize,
    height: usize,
    channels: usize,
    data: Vec<u8>,
}

impl std::fmt::Debug for Raster {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Raster")
            .field("width", &self.width)
            .field("height", &self.height)
            .field("channels", &self.channels)
            .finish_non_exhaustive()
    }
}

impl Raster {
    pub fn new(width: usize, height: usize, channels: usize, data: Vec<u8>) -> Result<Self, RasterError> {
        if width == 0 || height == 0 {
            return Err(RasterError::Empty);
        }
        if channels != 1 && channels != 4 {
            return Err(RasterError::Channels(channels));
        }
        if data.len() != width * height * channels {
            return Err(RasterError::LengthMismatch {
                width,
                height,
                channels,
                actual: data.len(),
            });
        }
        Ok(Raster {
            width,
            height,
            channels,
            data,
        })
    }

    /// Solid RGBA raster.
    pub fn filled_rgba(width: usize, height: usize, rgba: [u8; 4]) -> Self {
        let data = rgba.iter().copied().cycle().take(width * height * 4).collect();
        Raster {
            width,
            height,
            channels: 4,
            data,
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn channels(&self) -> usize {
        self.channels
    }

    pub fn data(&self) -> &[u8] {
        &self.data
    }

    /// Samples of pixel `(x, y)`.
    pub fn pixel(&self, x: usize, y: usize) -> &[u8] {
        let i = (y * self.width + x) * self.channels;
        &self.data[i..i + self.channels]
    }

    pub fn set_pixel(&mut self, x: usize, y: usize, value: &[u8]) {
        let i = (y * self.width + x) * self.channels;
        self.data[i..i + self.channels].copy_from_slice(value);
    }

    /// Decode an 8-bit RGB or RGBA PNG into an RGBA raster.
    pub fn decode_png_rgba(bytes: &[u8]) -> Result<Self, RasterError> {
        let (info, buf) = decode_png(bytes)?;
        let (w, h) = (info.width as usize, info.height as usize);
        let data = match info.color_type {
            png::ColorType::Rgba => buf,
            png::ColorType::Rgb => buf
                .chunks_exact(3)
                .flat_map(|c| [c[0], c[1], c[2], 255])
                .collect(),
            other => {
                return Err(RasterError::Format(format!(
                    "artwork must be 8-bit RGB or RGBA, got {other:?}"
                )))
            }
        };
        Raster::new(w, h, 4, data)
    }

    /// Encode as PNG: grayscale for one channel, RGBA for four.
    pub fn encode_png(&self) -> Result<Vec<u8>, RasterError> {
        let mut out = Vec::new();
        {
            let mut enc = png::Encoder::new(&mut out, self.width as u32, self.height as u32);
            enc.set_color(if self.channels == 1 {
                png::ColorType::Grayscale
            } else {
                png::ColorType::Rgba
            });
            enc.set_depth(png::BitDepth::Eight);
            let mut writer = enc.write_header().map_err(|e| RasterError::Encode(e.to_string()))?;
            writer
                .write_image_data(&self.data)
                .map_err(|e| RasterError::Encode(e.to_string()))?;
        }
        Ok(out)
    }
}

fn decode_png(bytes: &[u8]) -> Result<(png::OutputInfo, Vec<u8>), RasterError> {
    let decoder = png::Decoder::new(Cursor::new(bytes));
    let mut reader = decoder.read_info().map_err(|e| RasterError::Decode(e.to_string()))?;
    let mut buf = vec![0; reader.output_buffer_size()];
    let info = reader
        .next_frame(&mut buf)
        .map_err(|e| RasterError::Decode(e.to_string()))?;
    if info.bit_depth != png::BitDepth::Eight {
        return Err(RasterError::Format(format!("bit depth {:?}, expected 8", info.bit_depth)));
    }
    buf.truncate(info.buffer_size());
    Ok((info, buf))
}

/// Binary mask over the canvas. Foreground is any sample greater than zero.
#[derive(Clone, PartialEq, Eq)]
pub struct Mask {
    width: usize,
    height: usize,
    bits: Vec<bool>,
}

impl std::fmt::Debug for Mask {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Mask({}x{}, {} fg)", self.width, self.height, self.count())
    }
}

impl Mask {
    pub fn empty(width: usize, height: usize) -> Self {
        Mask {
            width,
            height,
            bits: vec![false; width * height],
        }
    }

    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> bool) -> Self {
        let mut bits = Vec::with_capacity(width * height);
        for y in 0..height {
            for x in 0..width {
                bits.push(f(x, y));
            }
        }
        Mask { width, height, bits }
    }

    /// Threshold a single-channel raster (sample > 0).
    pub fn from_raster(raster: &Raster) -> Result<Self, RasterError> {
        if raster.channels() != 1 {
            return Err(RasterError::Channels(raster.channels()));
        }
        Ok(Mask {
            width: raster.width(),
            height: raster.height(),
            bits: raster.data().iter().map(|&v| v > 0).collect(),
        })
    }

    /// Decode a PNG mask. Grayscale is thresholded directly; colour inputs use their first channel.
    pub fn decode_png(bytes: &[u8]) -> Result<Self, RasterError> {
        let (info, buf) = decode_png(bytes)?;
        let stride = match info.color_type {
            png::ColorType::Grayscale => 1,
            png::ColorType::GrayscaleAlpha => 2,
            png::ColorType::Rgb => 3,
            png::ColorType::Rgba => 4,
            png::ColorType::Indexed => {
                return Err(RasterError::Format("indexed png masks are not supported".into()))
            }
        };
        Ok(Mask {
            width: info.width as usize,
            height: info.height as usize,
            bits: buf.chunks_exact(stride).map(|c| c[0] > 0).collect(),
        })
    }

    pub fn to_raster(&self) -> Raster {
        let data = self.bits.iter().map(|&b| if b { 255 } else { 0 }).collect();
        Raster {
            width: self.width,
            height: self.height,
            channels: 1,
            data,
        }
    }

    pub fn encode_png(&self) -> Result<Vec<u8>, RasterError> {
        self.to_raster().encode_png()
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn get(&self, x: usize, y: usize) -> bool {
        self.bits[y * self.width + x]
    }

    /// Like [`Mask::get`] but anything outside the raster is background.
    pub fn get_signed(&self, x: i64, y: i64) -> bool {
        x >= 0 && y >= 0 && (x as usize) < self.width && (y as usize) < self.height && self.get(x as usize, y as usize)
    }

    pub fn set(&mut self, x: usize, y: usize, value: bool) {
        self.bits[y * self.width + x] = value;
    }

    /// Whether the pixel containing `p` is foreground.
    pub fn contains_point(&self, p: Point) -> bool {
        match p.to_pixel() {
            Some((x, y)) => x < self.width && y < self.height && self.get(x, y),
            None => false,
        }
    }

    pub fn count(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }

    pub fn is_empty(&self) -> bool {
        !self.bits.iter().any(|&b| b)
    }

    /// Foreground pixel coordinates in raster order.
    pub fn foreground(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.bits
            .iter()
            .enumerate()
            .filter(|(_, &b)| b)
            .map(move |(i, _)| (i % self.width, i / self.width))
    }

    /// Pixel-edge bounding box of the foreground.
    pub fn bounds(&self) -> Option<Rect> {
        let mut it = self.foreground();
        let (x0, y0) = it.next()?;
        let (mut min_x, mut max_x, mut max_y) = (x0, x0, y0);
        for (x, y) in it {
            min_x = min_x.min(x);
            max_x = max_x.max(x);
            max_y = y;
        }
        Some(Rect::new(
            min_x as f64,
            y0 as f64,
            (max_x - min_x + 1) as f64,
            (max_y - y0 + 1) as f64,
        ))
    }

    /// Distance from `p` to the nearest foreground pixel center, by exhaustive search.
    pub fn nearest_foreground(&self, p: Point) -> Option<((usize, usize), f64)> {
        self.foreground()
            .map(|(x, y)| ((x, y), Point::pixel_center(x, y).distance(p)))
            .min_by(|a, b| a.1.total_cmp(&b.1))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_lengths() {
        assert!(matches!(Raster::new(2, 2, 4, vec![0; 15]), Err(RasterError::LengthMismatch { .. })));
        assert!(matches!(Raster::new(2, 2, 3, vec![0; 12]), Err(RasterError::Channels(3))));
        assert!(matches!(Raster::new(0, 2, 1, vec![]), Err(RasterError::Empty)));
    }

    #[test]
    fn mask_png_round_trip() {
        let m = Mask::from_fn(9, 5, |x, y| (x + y) % 3 == 0);
        let back = Mask::decode_png(&m.encode_png().unwrap()).unwrap();
        assert_eq!(m, back);
    }

    #[test]
    fn rgba_png_round_trip() {
        let mut r = Raster::filled_rgba(4, 3, [10, 20, 30, 255]);
        r.set_pixel(1, 2, &[200, 100, 0, 128]);
        let back = Raster::decode_png_rgba(&r.encode_png().unwrap()).unwrap();
        assert_eq!(r, back);
    }

    #[test]
    fn mask_bounds() {
        let m = Mask::from_fn(10, 10, |x, y| (2..5).contains(&x) && (3..9).contains(&y));
        assert_eq!(m.bounds(), Some(Rect::new(2.0, 3.0, 3.0, 6.0)));
        assert_eq!(Mask::empty(3, 3).bounds(), None);
    }
}
