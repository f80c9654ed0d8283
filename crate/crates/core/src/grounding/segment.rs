use super::GroundingError;
use crate::geom::Point;
use crate::scene::{Mask, Raster};
use std::collections::VecDeque;

/// Per-channel color tolerance of the built-in segmenter.
pub const DEFAULT_TOLERANCE: u8 = 24;

/// Whether two RGBA samples differ by at most `tolerance` in every channel.
pub fn within_tolerance(a: &[u8], b: &[u8], tolerance: u8) -> bool {
    a.iter().zip(b).all(|(&x, &y)| x.abs_diff(y) <= tolerance)
}

/// 4-connected flood fill from the pixel containing `seed`, keeping pixels whose
/// color stays within `tolerance` of the seed pixel's color on every channel.
pub fn segment_by_point(artwork: &Raster, seed: Point, tolerance: u8) -> Result<Mask, GroundingError> {
    if artwork.channels() != 4 {
        return Err(GroundingError::NotRgba(artwork.channels()));
    }
    let (w, h) = (artwork.width(), artwork.height());
    let (sx, sy) = seed
        .to_pixel()
        .filter(|&(x, y)| x < w && y < h)
        .ok_or(GroundingError::SeedOutOfBounds { x: seed.x, y: seed.y })?;
    let reference = artwork.pixel(sx, sy).to_vec();
    let mut mask = Mask::empty(w, h);
    mask.set(sx, sy, true);
    let mut queue = VecDeque::from([(sx, sy)]);
    while let Some((x, y)) = queue.pop_front() {
        let neighbors = [
            (x.wrapping_sub(1), y),
            (x + 1, y),
            (x, y.wrapping_sub(1)),
            (x, y + 1),
        ];
        for (nx, ny) in neighbors {
            if nx < w && ny < h && !mask.get(nx, ny) && within_tolerance(artwork.pixel(nx, ny), &reference, tolerance) {
                mask.set(nx, ny, true);
                queue.push_back((nx, ny));
            }
        }
    }
    Ok(mask)
}
