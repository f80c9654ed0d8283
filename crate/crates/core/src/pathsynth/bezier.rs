//! Cubic Bézier segments, piecewise paths and arc-length sampling.

use super::PathError;
use crate::geom::Point;
use serde::{Deserialize, Serialize};

/// One cubic segment: endpoints `p0`, `p3` and inner controls `c1`, `c2`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(from = "[Point; 4]", into = "[Point; 4]")]
pub struct CubicSegment {
    pub p0: Point,
    pub c1: Point,
    pub c2: Point,
    pub p3: Point,
}

impl From<[Point; 4]> for CubicSegment {
    fn from(v: [Point; 4]) -> Self {
        CubicSegment::new(v[0], v[1], v[2], v[3])
    }
}

impl From<CubicSegment> for [Point; 4] {
    fn from(s: CubicSegment) -> Self {
        [s.p0, s.c1, s.c2, s.p3]
    }
}

impl CubicSegment {
    pub const fn new(p0: Point, c1: Point, c2: Point, p3: Point) -> Self {
        CubicSegment { p0, c1, c2, p3 }
    }

    /// Straight segment with controls at 1/3 and 2/3 of the chord.
    pub fn line(a: Point, b: Point) -> Self {
        CubicSegment::new(a, a.lerp(b, 1.0 / 3.0), a.lerp(b, 2.0 / 3.0), b)
    }

    pub fn eval(&self, t: f64) -> Point {
        let mt = 1.0 - t;
        let a = mt * mt * mt;
        let b = 3.0 * mt * mt * t;
        let c = 3.0 * mt * t * t;
        let d = t * t * t;
        Point::new(
            a * self.p0.x + b * self.c1.x + c * self.c2.x + d * self.p3.x,
            a * self.p0.y + b * self.c1.y + c * self.c2.y + d * self.p3.y,
        )
    }

    /// First derivative with respect to `t`.
    pub fn deriv(&self, t: f64) -> Point {
        let mt = 1.0 - t;
        (self.c1 - self.p0) * (3.0 * mt * mt) + (self.c2 - self.c1) * (6.0 * mt * t) + (self.p3 - self.c2) * (3.0 * t * t)
    }

    pub fn deriv2(&self, t: f64) -> Point {
        let mt = 1.0 - t;
        (self.c2 - self.c1 * 2.0 + self.p0) * (6.0 * mt) + (self.p3 - self.c2 * 2.0 + self.c1) * (6.0 * t)
    }

    /// de Casteljau subdivision at `t`.
    pub fn split(&self, t: f64) -> (CubicSegment, CubicSegment) {
        let ab = self.p0.lerp(self.c1, t);
        let bc = self.c1.lerp(self.c2, t);
        let cd = self.c2.lerp(self.p3, t);
        let abc = ab.lerp(bc, t);
        let bcd = bc.lerp(cd, t);
        let mid = abc.lerp(bcd, t);
        (
            CubicSegment::new(self.p0, ab, abc, mid),
            CubicSegment::new(mid, bcd, cd, self.p3),
        )
    }

    /// The part of the segment between parameters `t0 < t1`.
    pub fn subsegment(&self, t0: f64, t1: f64) -> CubicSegment {
        if t0 <= 0.0 && t1 >= 1.0 {
            return *self;
        }
        let right = if t0 <= 0.0 { *self } else { self.split(t0).1 };
        if t1 >= 1.0 {
            return right;
        }
        let local = (t1 - t0) / (1.0 - t0);
        right.split(local).0
    }

    /// Arc length over `[t0, t1]` by 8-point Gauss-Legendre quadrature.
    pub fn arc_length_between(&self, t0: f64, t1: f64) -> f64 {
        let half = 0.5 * (t1 - t0);
        let mid = 0.5 * (t1 + t0);
        GAUSS_LEGENDRE_8
            .iter()
            .map(|&(x, w)| w * self.deriv(mid + half * x).length())
            .sum::<f64>()
            * half
    }

    pub fn map_points(&self, mut f: impl FnMut(Point) -> Point) -> CubicSegment {
        CubicSegment::new(f(self.p0), f(self.c1), f(self.c2), f(self.p3))
    }
}

const GAUSS_LEGENDRE_8: [(f64, f64); 8] = [
    (-0.960_289_856_497_536_3, 0.101_228_536_290_376_3),
    (-0.796_666_477_413_626_7, 0.222_381_034_453_374_5),
    (-0.525_532_409_916_329_0, 0.313_706_645_877_887_3),
    (-0.183_434_642_495_649_8, 0.362_683_783_378_362_0),
    (0.183_434_642_495_649_8, 0.362_683_783_378_362_0),
    (0.525_532_409_916_329_0, 0.313_706_645_877_887_3),
    (0.796_666_477_413_626_7, 0.222_381_034_453_374_5),
    (0.960_289_856_497_536_3, 0.101_228_536_290_376_3),
];

/// Piecewise cubic path with exact C0 joins.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BezierPath {
    pub segments: Vec<CubicSegment>,
    pub closed: bool,
}

impl BezierPath {
    /// Validate continuity and closure.
    pub fn new(segments: Vec<CubicSegment>, closed: bool) -> Result<Self, PathError> {
        let path = BezierPath { segments, closed };
        path.check()?;
        Ok(path)
    }

    pub fn check(&self) -> Result<(), PathError> {
        if self.segments.is_empty() {
            return Err(PathError::Degenerate("path needs at least one segment".into()));
        }
        for (i, w) in self.segments.windows(2).enumerate() {
            if w[0].p3 != w[1].p0 {
                return Err(PathError::Degenerate(format!("segments {i} and {} are not joined", i + 1)));
            }
        }
        if self.closed && self.start() != self.end() {
            return Err(PathError::Degenerate("closed path does not return to its start".into()));
        }
        Ok(())
    }

    pub fn start(&self) -> Point {
        self.segments[0].p0
    }

    pub fn end(&self) -> Point {
        self.segments[self.segments.len() - 1].p3
    }

    /// Evaluate at a global parameter in `[0, 1]`, each segment spanning an equal share.
    pub fn eval_global(&self, t: f64) -> Point {
        let (i, local) = self.locate_global(t);
        self.segments[i].eval(local)
    }

    pub(crate) fn locate_global(&self, t: f64) -> (usize, f64) {
        let n = self.segments.len();
        let scaled = t.clamp(0.0, 1.0) * n as f64;
        let i = (scaled.floor() as usize).min(n - 1);
        (i, scaled - i as f64)
    }

    pub fn map_points(&self, mut f: impl FnMut(Point) -> Point) -> BezierPath {
        BezierPath {
            segments: self.segments.iter().map(|s| s.map_points(&mut f)).collect(),
            closed: self.closed,
        }
    }

    pub fn control_points(&self) -> impl Iterator<Item = Point> + '_ {
        self.segments.iter().flat_map(|s| [s.p0, s.c1, s.c2, s.p3])
    }

    /// Total length from the arc-length table.
    pub fn length(&self) -> f64 {
        ArcLengthTable::new(self).total()
    }
}

/// Entries per segment in the arc-length table.
pub const ARC_TABLE_ENTRIES: usize = 256;

/// Cumulative arc length per segment, for arc-length-uniform sampling.
#[derive(Clone, Debug)]
pub struct ArcLengthTable<'a> {
    path: &'a BezierPath,
    /// `cumulative[seg][k]`: length from the segment start to `t = (k + 1) / ENTRIES`.
    cumulative: Vec<[f64; ARC_TABLE_ENTRIES]>,
    /// Length before each segment, plus the total at the end.
    offsets: Vec<f64>,
}

impl<'a> ArcLengthTable<'a> {
    pub fn new(path: &'a BezierPath) -> Self {
        let mut cumulative = Vec::with_capacity(path.segments.len());
        let mut offsets = Vec::with_capacity(path.segments.len() + 1);
        let mut running = 0.0;
        for seg in &path.segments {
            offsets.push(running);
            let mut table = [0.0; ARC_TABLE_ENTRIES];
            let mut acc = 0.0;
            for (k, slot) in table.iter_mut().enumerate() {
                let t0 = k as f64 / ARC_TABLE_ENTRIES as f64;
                let t1 = (k + 1) as f64 / ARC_TABLE_ENTRIES as f64;
                acc += seg.arc_length_between(t0, t1);
                *slot = acc;
            }
            running += acc;
            cumulative.push(table);
        }
        offsets.push(running);
        ArcLengthTable {
            path,
            cumulative,
            offsets,
        }
    }

    pub fn total(&self) -> f64 {
        self.offsets[self.offsets.len() - 1]
    }

    pub fn segment_length(&self, i: usize) -> f64 {
        self.offsets[i + 1] - self.offsets[i]
    }

    /// Segment index and local parameter at normalized arc length `u`.
    pub fn locate(&self, u: f64) -> (usize, f64) {
        let n = self.path.segments.len();
        if u <= 0.0 {
            return (0, 0.0);
        }
        if u >= 1.0 {
            return (n - 1, 1.0);
        }
        let s = u * self.total();
        // first segment whose end offset reaches s
        let i = self.offsets[1..].partition_point(|&end| end < s).min(n - 1);
        let local = s - self.offsets[i];
        let table = &self.cumulative[i];
        let k = table.partition_point(|&c| c < local).min(ARC_TABLE_ENTRIES - 1);
        let before = if k == 0 { 0.0 } else { table[k - 1] };
        let span = table[k] - before;
        let frac = if span > 0.0 { ((local - before) / span).clamp(0.0, 1.0) } else { 0.0 };
        let t = (k as f64 + frac) / ARC_TABLE_ENTRIES as f64;
        (i, t)
    }

    /// Normalized arc length at segment `i`, local parameter `t` (table interpolation).
    pub fn u_at(&self, i: usize, t: f64) -> f64 {
        let total = self.total();
        if total <= 0.0 {
            return 0.0;
        }
        let pos = t.clamp(0.0, 1.0) * ARC_TABLE_ENTRIES as f64;
        let k = (pos.floor() as usize).min(ARC_TABLE_ENTRIES - 1);
        let before = if k == 0 { 0.0 } else { self.cumulative[i][k - 1] };
        let s = before + (self.cumulative[i][k] - before) * (pos - k as f64);
        (self.offsets[i] + s) / total
    }

    /// Point at normalized arc length `u`.
    pub fn point_at(&self, u: f64) -> Point {
        if u <= 0.0 {
            return self.path.start();
        }
        if u >= 1.0 {
            return self.path.end();
        }
        let (i, t) = self.locate(u);
        self.path.segments[i].eval(t)
    }

    pub fn path(&self) -> &BezierPath {
        self.path
    }
}

/// Point at normalized arc length `u ∈ [0, 1]`.
pub fn sample_path(path: &BezierPath, u: f64) -> Result<Point, PathError> {
    if !(0.0..=1.0).contains(&u) {
        return Err(PathError::OutOfRange(u));
    }
    Ok(ArcLengthTable::new(path).point_at(u))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s_curve() -> CubicSegment {
        CubicSegment::new(
            Point::new(0.0, 0.0),
            Point::new(30.0, 80.0),
            Point::new(70.0, -80.0),
            Point::new(100.0, 0.0),
        )
    }

    #[test]
    fn split_halves_rejoin() {
        let seg = s_curve();
        let (a, b) = seg.split(0.3);
        assert_eq!(a.p3, b.p0);
        for k in 0..=10 {
            let t = k as f64 / 10.0;
            let lhs = a.eval(t);
            let rhs = seg.eval(0.3 * t);
            assert!(lhs.distance(rhs) < 1e-9);
            assert!(b.eval(t).distance(seg.eval(0.3 + 0.7 * t)) < 1e-9);
        }
        let mid = seg.subsegment(0.2, 0.6);
        assert!(mid.eval(0.5).distance(seg.eval(0.4)) < 1e-9);
    }

    #[test]
    fn quadrature_matches_polyline_length() {
        let seg = s_curve();
        let n = 200_000;
        let brute: f64 = (0..n)
            .map(|k| seg.eval(k as f64 / n as f64).distance(seg.eval((k + 1) as f64 / n as f64)))
            .sum();
        let path = BezierPath::new(vec![seg], false).unwrap();
        let quad = path.length();
        assert!((quad - brute).abs() / brute < 1e-6, "{quad} vs {brute}");
    }

    #[test]
    fn line_midpoint() {
        let path = BezierPath::new(vec![CubicSegment::line(Point::new(0.0, 0.0), Point::new(10.0, 4.0))], false).unwrap();
        let m = sample_path(&path, 0.5).unwrap();
        assert!(m.distance(Point::new(5.0, 2.0)) < 1e-3);
        assert_eq!(sample_path(&path, 0.0).unwrap(), path.start());
        assert_eq!(sample_path(&path, 1.0).unwrap(), path.end());
        assert!(matches!(sample_path(&path, 1.5), Err(PathError::OutOfRange(_))));
    }

    #[test]
    fn locate_inverts_u_at() {
        let seg = s_curve();
        let path = BezierPath::new(vec![seg, seg.map_points(|p| p + Point::new(100.0, 0.0))], false).unwrap();
        let table = ArcLengthTable::new(&path);
        for k in 1..50 {
            let u = k as f64 / 50.0;
            let (i, t) = table.locate(u);
            assert!((table.u_at(i, t) - u).abs() < 1e-9);
        }
    }

    #[test]
    fn continuity_checked() {
        let a = CubicSegment::line(Point::new(0.0, 0.0), Point::new(1.0, 0.0));
        let b = CubicSegment::line(Point::new(1.0, 1e-12), Point::new(2.0, 0.0));
        assert!(BezierPath::new(vec![a, b], false).is_err());
    }
}
