//! Piecewise least-squares cubic fitting (Schneider's recursive scheme).
//!
//! Per region: chord-length parameters, closed-form least squares for the two
//! inner control distances along fixed end tangents, up to four rounds of
//! Newton-Raphson reparameterization, then a split at the worst point.

use super::bezier::{BezierPath, CubicSegment};
use super::{PathError, Polyline};
use crate::geom::Point;

/// Default fit tolerance in pixels.
pub const DEFAULT_MAX_ERROR: f64 = 2.0;
/// Newton-Raphson reparameterization rounds per region.
pub const MAX_NEWTON_ROUNDS: usize = 4;

/// Fit a C0 piecewise cubic so that every input point lies within `max_error`
/// of the curve. Closed polylines produce a closed path that starts and ends
/// at the first vertex.
pub fn fit_beziers(p: &Polyline, max_error: f64) -> Result<BezierPath, PathError> {
    if !(max_error > 0.0) {
        return Err(PathError::InvalidParameter(format!("max_error {max_error} must be positive")));
    }
    let mut pts = p.points.clone();
    pts.dedup_by(|b, a| a.distance(*b) <= 1e-9);
    if pts.iter().all(|q| q.distance(pts[0]) <= 1e-9) {
        return Err(PathError::Degenerate("all points coincide".into()));
    }
    if p.closed && pts.len() > 1 && pts[pts.len() - 1].distance(pts[0]) <= 1e-9 {
        pts.pop();
    }
    if p.closed {
        pts.push(pts[0]);
    }
    let last = pts.len() - 1;
    let (t_start, t_end) = if p.closed {
        let seam = center_tangent(&pts, 0, pts[1], pts[last - 1]);
        (-seam, seam)
    } else {
        (end_tangent(pts[0], pts[1], pts.get(2).copied()), end_tangent(pts[last], pts[last - 1], last.checked_sub(2).map(|i| pts[i])))
    };
    let mut segments = Vec::new();
    fit_region(&pts, 0, last, t_start, t_end, max_error, &mut segments);
    BezierPath::new(segments, p.closed)
}

/// One-sided 3-point tangent at `a`, pointing toward `b`.
fn end_tangent(a: Point, b: Point, c: Option<Point>) -> Point {
    let chord = (b - a).normalized().expect("consecutive points are distinct");
    match c {
        Some(c) => match (b * 4.0 - a * 3.0 - c).normalized() {
            Some(t) if t.dot(chord) > 0.0 => t,
            _ => chord,
        },
        None => chord,
    }
}

/// Central tangent at `pts[i]`, pointing backward (from `next` toward `prev`).
fn center_tangent(pts: &[Point], i: usize, next: Point, prev: Point) -> Point {
    (prev - next)
        .normalized()
        .or_else(|| (prev - pts[i]).normalized())
        .or_else(|| (pts[i] - next).normalized())
        .unwrap_or(Point::new(1.0, 0.0))
}

fn fit_region(pts: &[Point], first: usize, last: usize, t1: Point, t2: Point, error: f64, out: &mut Vec<CubicSegment>) {
    let region = &pts[first..=last];
    if region.len() == 2 {
        let dist = region[0].distance(region[1]) / 3.0;
        out.push(CubicSegment::new(region[0], region[0] + t1 * dist, region[1] + t2 * dist, region[1]));
        return;
    }

    let mut u = chord_length_parameters(region);
    let mut bez = generate(region, &u, t1, t2);
    let (mut max_err, mut split) = max_error(region, &bez, &u);
    let tolerance = error * error;
    if max_err <= tolerance {
        out.push(bez);
        return;
    }
    if max_err < tolerance * 4.0 {
        for _ in 0..MAX_NEWTON_ROUNDS {
            u = reparameterize(region, &bez, &u);
            bez = generate(region, &u, t1, t2);
            let (e, s) = max_error(region, &bez, &u);
            max_err = e;
            split = s;
            if max_err <= tolerance {
                out.push(bez);
                return;
            }
        }
    }

    let split = (first + split).clamp(first + 1, last - 1);
    let center = center_tangent(pts, split, pts[split + 1], pts[split - 1]);
    fit_region(pts, first, split, t1, center, error, out);
    fit_region(pts, split, last, -center, t2, error, out);
}

fn chord_length_parameters(region: &[Point]) -> Vec<f64> {
    let mut u = Vec::with_capacity(region.len());
    let mut acc = 0.0;
    u.push(0.0);
    for w in region.windows(2) {
        acc += w[0].distance(w[1]);
        u.push(acc);
    }
    let total = acc;
    u.iter_mut().for_each(|v| *v /= total);
    u
}

/// Least-squares inner control points with tangents `t1` (at the start) and `t2` (at the end, pointing back).
fn generate(region: &[Point], u: &[f64], t1: Point, t2: Point) -> CubicSegment {
    let p0 = region[0];
    let p3 = region[region.len() - 1];
    let (mut c00, mut c01, mut c11, mut x0, mut x1) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for (&p, &t) in region.iter().zip(u) {
        let mt = 1.0 - t;
        let b0 = mt * mt * mt;
        let b1 = 3.0 * t * mt * mt;
        let b2 = 3.0 * t * t * mt;
        let b3 = t * t * t;
        let a1 = t1 * b1;
        let a2 = t2 * b2;
        c00 += a1.dot(a1);
        c01 += a1.dot(a2);
        c11 += a2.dot(a2);
        let tmp = p - (p0 * (b0 + b1) + p3 * (b2 + b3));
        x0 += a1.dot(tmp);
        x1 += a2.dot(tmp);
    }
    let det = c00 * c11 - c01 * c01;
    let seg_len = p0.distance(p3);
    let (mut alpha_l, mut alpha_r) = if det.abs() > 1e-12 {
        ((x0 * c11 - c01 * x1) / det, (c00 * x1 - c01 * x0) / det)
    } else {
        (0.0, 0.0)
    };
    let eps = 1e-6 * seg_len.max(1e-9);
    let region_len: f64 = region.windows(2).map(|w| w[0].distance(w[1])).sum();
    // arms longer than the data itself mean a loop, not a fit; split instead
    let cap = 2.0 * region_len;
    if !(alpha_l > eps && alpha_r > eps && alpha_l <= cap && alpha_r <= cap) {
        let fallback = if seg_len > 1e-9 { seg_len } else { region_len } / 3.0;
        alpha_l = fallback;
        alpha_r = fallback;
    }
    CubicSegment::new(p0, p0 + t1 * alpha_l, p3 + t2 * alpha_r, p3)
}

/// Largest squared point-to-curve residual and the index where it occurs.
fn max_error(region: &[Point], bez: &CubicSegment, u: &[f64]) -> (f64, usize) {
    let mut worst = (0.0, region.len() / 2);
    for i in 1..region.len() - 1 {
        let d = (bez.eval(u[i]) - region[i]).length_squared();
        if d >= worst.0 {
            worst = (d, i);
        }
    }
    worst
}

fn reparameterize(region: &[Point], bez: &CubicSegment, u: &[f64]) -> Vec<f64> {
    region
        .iter()
        .zip(u)
        .map(|(&p, &t)| {
            let diff = bez.eval(t) - p;
            let d1 = bez.deriv(t);
            let d2 = bez.deriv2(t);
            let denom = d1.dot(d1) + diff.dot(d2);
            if denom.abs() < 1e-12 {
                t
            } else {
                (t - diff.dot(d1) / denom).clamp(0.0, 1.0)
            }
        })
        .collect()
}
