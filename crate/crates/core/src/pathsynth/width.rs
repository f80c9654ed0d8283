//! Exact Euclidean distance transform and per-vertex half-widths.

use super::{PathError, Polyline};
use crate::scene::Mask;

/// Smallest reported half-width, half a pixel.
pub const MIN_HALF_WIDTH: f64 = 0.5;

/// Half-width of the mask around each centerline vertex, in pixels.
#[derive(Clone, Debug, PartialEq)]
pub struct WidthProfile {
    pub half_widths: Vec<f64>,
}

impl WidthProfile {
    pub fn max(&self) -> f64 {
        self.half_widths.iter().copied().fold(MIN_HALF_WIDTH, f64::max)
    }
}

/// Squared distance from every pixel center to the nearest background pixel
/// center, where everything outside the raster counts as background.
#[derive(Clone, Debug)]
pub struct DistanceField {
    width: usize,
    height: usize,
    squared: Vec<f64>,
}

impl DistanceField {
    pub fn of_background(mask: &Mask) -> Self {
        // one pixel of background padding on every side
        let (w, h) = (mask.width() + 2, mask.height() + 2);
        let mut grid: Vec<f64> = vec![0.0; w * h];
        for (x, y) in mask.foreground() {
            grid[(y + 1) * w + x + 1] = f64::INFINITY;
        }
        let mut column = vec![0.0; h];
        let mut out = vec![0.0; h];
        for x in 0..w {
            for y in 0..h {
                column[y] = grid[y * w + x];
            }
            lower_envelope(&column, &mut out);
            for y in 0..h {
                grid[y * w + x] = out[y];
            }
        }
        let mut row = vec![0.0; w];
        let mut out = vec![0.0; w];
        for y in 0..h {
            row.copy_from_slice(&grid[y * w..(y + 1) * w]);
            lower_envelope(&row, &mut out);
            grid[y * w..(y + 1) * w].copy_from_slice(&out);
        }
        let squared = (0..mask.height())
            .flat_map(|y| {
                let start = (y + 1) * w + 1;
                grid[start..start + mask.width()].to_vec()
            })
            .collect();
        DistanceField {
            width: mask.width(),
            height: mask.height(),
            squared,
        }
    }

    pub fn distance(&self, x: usize, y: usize) -> f64 {
        self.squared[y * self.width + x].sqrt()
    }

    /// Distance to the background boundary (pixel edge), i.e. center distance minus half a pixel.
    pub fn half_width(&self, x: usize, y: usize) -> f64 {
        (self.distance(x, y) - 0.5).max(MIN_HALF_WIDTH)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }
}

/// 1D squared distance transform (lower envelope of parabolas).
fn lower_envelope(f: &[f64], d: &mut [f64]) {
    let n = f.len();
    let mut v = vec![0usize; n];
    let mut z = vec![0.0f64; n + 1];
    let mut k = 0usize;
    // skip leading infinite samples for the first parabola
    let Some(first) = f.iter().position(|v| v.is_finite()) else {
        d.fill(f64::INFINITY);
        return;
    };
    v[0] = first;
    z[0] = f64::NEG_INFINITY;
    z[1] = f64::INFINITY;
    for q in first + 1..n {
        if !f[q].is_finite() {
            continue;
        }
        loop {
            let p = v[k];
            let s = ((f[q] + (q * q) as f64) - (f[p] + (p * p) as f64)) / (2.0 * (q as f64 - p as f64));
            if s <= z[k] && k > 0 {
                k -= 1;
                continue;
            }
            if s <= z[k] {
                // k == 0 and z[0] is -inf; unreachable but keeps the loop total
                break;
            }
            k += 1;
            v[k] = q;
            z[k] = s;
            z[k + 1] = f64::INFINITY;
            break;
        }
    }
    let mut k = 0;
    for (q, slot) in d.iter_mut().enumerate() {
        while z[k + 1] < q as f64 {
            k += 1;
        }
        let dq = q as f64 - v[k] as f64;
        *slot = dq * dq + f[v[k]];
    }
}

/// Half-width of `mask` at each centerline vertex.
pub fn measure_width(mask: &Mask, centerline: &Polyline) -> Result<WidthProfile, PathError> {
    let field = DistanceField::of_background(mask);
    measure_width_in(&field, mask, centerline)
}

pub(crate) fn measure_width_in(field: &DistanceField, mask: &Mask, centerline: &Polyline) -> Result<WidthProfile, PathError> {
    let half_widths = centerline
        .points
        .iter()
        .enumerate()
        .map(|(index, &p)| {
            if !mask.contains_point(p) {
                return Err(PathError::VertexOutsideMask { index, x: p.x, y: p.y });
            }
            let (x, y) = p.to_pixel().expect("inside mask");
            Ok(field.half_width(x, y))
        })
        .collect::<Result<_, _>>()?;
    Ok(WidthProfile { half_widths })
}
