//! Laplacian / Taubin λ|μ polyline smoothing.

use super::{PathError, Polyline};
use crate::geom::Point;

/// Taubin's non-shrinking pair and iteration count used by the pipeline.
pub const DEFAULT_LAMBDA: f64 = 0.33;
pub const DEFAULT_MU: f64 = -0.34;
pub const DEFAULT_ITERATIONS: usize = 10;

fn relax(points: &[Point], closed: bool, factor: f64) -> Vec<Point> {
    let n = points.len();
    (0..n)
        .map(|i| {
            let (prev, next) = if closed {
                (points[(i + n - 1) % n], points[(i + 1) % n])
            } else if i == 0 || i == n - 1 {
                return points[i];
            } else {
                (points[i - 1], points[i + 1])
            };
            let p = points[i];
            p + ((prev + next) * 0.5 - p) * factor
        })
        .collect()
}

/// Each iteration moves every vertex toward its neighbor midpoint by `lambda`,
/// then by `mu` (skipped when `mu == 0`, giving plain Laplacian smoothing).
/// Open polylines keep their endpoints; closed ones wrap.
pub fn smooth_polyline(p: &Polyline, lambda: f64, mu: f64, iterations: usize) -> Result<Polyline, PathError> {
    if !(lambda > 0.0 && lambda < 1.0) {
        return Err(PathError::InvalidParameter(format!("lambda {lambda} outside (0, 1)")));
    }
    if !(mu > -1.0 && mu <= 0.0) {
        return Err(PathError::InvalidParameter(format!("mu {mu} outside (-1, 0]")));
    }
    let mut points = p.points.clone();
    for _ in 0..iterations {
        points = relax(&points, p.closed, lambda);
        if mu != 0.0 {
            points = relax(&points, p.closed, mu);
        }
    }
    Ok(Polyline {
        points,
        closed: p.closed,
    })
}
