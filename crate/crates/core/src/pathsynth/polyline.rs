use super::PathError;
use crate::geom::Point;

/// Minimum spacing between consecutive vertices.
pub const MIN_VERTEX_SPACING: f64 = 1e-9;

/// Ordered vertices in canvas pixels.
#[derive(Clone, Debug, PartialEq)]
pub struct Polyline {
    pub points: Vec<Point>,
    pub closed: bool,
}

impl Polyline {
    pub fn new(points: Vec<Point>, closed: bool) -> Result<Self, PathError> {
        if points.len() < 2 {
            return Err(PathError::Degenerate(format!("polyline needs 2 points, got {}", points.len())));
        }
        if let Some(i) = points.windows(2).position(|w| w[0].distance(w[1]) <= MIN_VERTEX_SPACING) {
            return Err(PathError::Degenerate(format!("vertices {i} and {} coincide", i + 1)));
        }
        Ok(Polyline { points, closed })
    }

    /// Drop consecutive duplicates, then validate.
    pub fn dedup(mut points: Vec<Point>, closed: bool) -> Result<Self, PathError> {
        points.dedup_by(|b, a| a.distance(*b) <= MIN_VERTEX_SPACING);
        if closed && points.len() > 2 && points[0].distance(points[points.len() - 1]) <= MIN_VERTEX_SPACING {
            points.pop();
        }
        Polyline::new(points, closed)
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Sum of edge lengths, including the closing edge for closed polylines.
    pub fn length(&self) -> f64 {
        let open: f64 = self.points.windows(2).map(|w| w[0].distance(w[1])).sum();
        if self.closed {
            open + self.points[self.points.len() - 1].distance(self.points[0])
        } else {
            open
        }
    }

    /// Shoelace signed area; negative means counterclockwise on a y-down canvas.
    pub fn signed_area(&self) -> f64 {
        let n = self.points.len();
        (0..n)
            .map(|i| self.points[i].cross(self.points[(i + 1) % n]))
            .sum::<f64>()
            / 2.0
    }
}
