//! Splitting a path where it enters and leaves an occluder mask.
//!
//! Split positions are normalized arc length, the same parameter
//! [`sample_path`](super::sample_path) and keyframe baking use, so a crossing
//! at `u` happens at time `u × duration` for uniform motion.

use super::bezier::{ArcLengthTable, BezierPath, CubicSegment};
use super::PathError;
use crate::scene::Mask;
use serde::{Deserialize, Serialize};

/// Coarse samples along the path before refining each crossing.
pub const COARSE_SAMPLES: usize = 2048;
/// Bisection stops once the bracket is narrower than this.
pub const CROSSING_TOLERANCE: f64 = 1e-5;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Layer {
    Front,
    Back,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SplitPiece {
    pub path: BezierPath,
    pub layer: Layer,
    /// Normalized arc-length interval covered by this piece.
    pub t_range: (f64, f64),
}

#[derive(Clone, Debug, PartialEq)]
pub struct SplitPath {
    pub pieces: Vec<SplitPiece>,
}

impl SplitPath {
    /// Interior boundaries between consecutive pieces.
    pub fn crossings(&self) -> Vec<f64> {
        self.pieces.iter().skip(1).map(|p| p.t_range.0).collect()
    }

    /// Layer in effect at normalized arc length `u`.
    pub fn layer_at(&self, u: f64) -> Layer {
        self.pieces
            .iter()
            .find(|p| u <= p.t_range.1)
            .unwrap_or(&self.pieces[self.pieces.len() - 1])
            .layer
    }
}

/// Part of `path` between normalized arc lengths `a < b`.
pub(crate) fn subpath(table: &ArcLengthTable<'_>, a: f64, b: f64) -> BezierPath {
    let path = table.path();
    let (ia, ta) = table.locate(a);
    let (ib, tb) = table.locate(b);
    let segments: Vec<CubicSegment> = if ia == ib {
        vec![path.segments[ia].subsegment(ta, tb)]
    } else {
        let mut segs = vec![path.segments[ia].subsegment(ta, 1.0)];
        segs.extend_from_slice(&path.segments[ia + 1..ib]);
        if tb > 0.0 {
            segs.push(path.segments[ib].subsegment(0.0, tb));
        }
        segs
    };
    BezierPath {
        segments,
        closed: false,
    }
}

/// Split `path` into front/back pieces at the occluder's boundary.
pub fn split_path_by_mask(path: &BezierPath, occluder: &Mask) -> Result<SplitPath, PathError> {
    if occluder.is_empty() {
        return Err(PathError::EmptyMask);
    }
    let table = ArcLengthTable::new(path);
    let inside = |u: f64| occluder.contains_point(table.point_at(u));

    let mut crossings = Vec::new();
    let mut prev = inside(0.0);
    for j in 1..=COARSE_SAMPLES {
        let u = j as f64 / COARSE_SAMPLES as f64;
        let cur = inside(u);
        if cur != prev {
            let (mut lo, mut hi) = ((j - 1) as f64 / COARSE_SAMPLES as f64, u);
            while hi - lo >= CROSSING_TOLERANCE {
                let mid = 0.5 * (lo + hi);
                if inside(mid) == prev {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            crossings.push(0.5 * (lo + hi));
        }
        prev = cur;
    }

    let mut bounds = Vec::with_capacity(crossings.len() + 2);
    bounds.push(0.0);
    bounds.extend(crossings);
    bounds.push(1.0);
    let pieces = bounds
        .windows(2)
        .map(|w| {
            let (a, b) = (w[0], w[1]);
            let layer = if inside(0.5 * (a + b)) { Layer::Back } else { Layer::Front };
            let piece = if a <= 0.0 && b >= 1.0 {
                path.clone()
            } else {
                subpath(&table, a, b)
            };
            SplitPiece {
                path: piece,
                layer,
                t_range: (a, b),
            }
        })
        .collect();
    Ok(SplitPath { pieces })
}

#[cfg(test)]
mod tests {
    use super::super::ellipse::synth_ellipse;
    use super::*;
    use crate::geom::Point;

    #[test]
    fn outside_is_one_front_piece() {
        let circle = synth_ellipse(Point::new(200.0, 200.0), 50.0, 50.0, 0.0).unwrap();
        let occ = Mask::from_fn(400, 400, |x, y| x < 10 && y < 10);
        let s = split_path_by_mask(&circle, &occ).unwrap();
        assert_eq!(s.pieces.len(), 1);
        assert_eq!(s.pieces[0].layer, Layer::Front);
        assert_eq!(s.pieces[0].t_range, (0.0, 1.0));
        assert_eq!(s.pieces[0].path, circle);
    }

    #[test]
    fn empty_occluder() {
        let circle = synth_ellipse(Point::new(20.0, 20.0), 5.0, 5.0, 0.0).unwrap();
        assert!(matches!(split_path_by_mask(&circle, &Mask::empty(4, 4)), Err(PathError::EmptyMask)));
    }

    #[test]
    fn subpath_endpoints_follow_the_table() {
        let circle = synth_ellipse(Point::new(200.0, 200.0), 50.0, 30.0, 0.3).unwrap();
        let table = ArcLengthTable::new(&circle);
        let piece = subpath(&table, 0.1, 0.65);
        assert!(piece.start().distance(table.point_at(0.1)) < 1e-9);
        assert!(piece.end().distance(table.point_at(0.65)) < 1e-9);
        piece.check().unwrap();
    }
}
