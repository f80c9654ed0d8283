use super::bezier::{BezierPath, CubicSegment};
use super::PathError;
use crate::geom::Point;

/// Quarter-arc handle length as a fraction of the radius.
pub const KAPPA: f64 = 4.0 * (std::f64::consts::SQRT_2 - 1.0) / 3.0;

/// Closed four-segment ellipse centered at `center`, starting at parameter
/// angle 0 (the `+rx` end of the major axis before rotation) and running
/// toward `+ry`.
pub fn synth_ellipse(center: Point, rx: f64, ry: f64, rotation: f64) -> Result<BezierPath, PathError> {
    if !(rx > 0.0 && ry > 0.0) {
        return Err(PathError::InvalidParameter(format!("ellipse radii must be positive, got {rx} x {ry}")));
    }
    let (kx, ky) = (KAPPA * rx, KAPPA * ry);
    let local = [
        [(rx, 0.0), (rx, ky), (kx, ry), (0.0, ry)],
        [(0.0, ry), (-kx, ry), (-rx, ky), (-rx, 0.0)],
        [(-rx, 0.0), (-rx, -ky), (-kx, -ry), (0.0, -ry)],
        [(0.0, -ry), (kx, -ry), (rx, -ky), (rx, 0.0)],
    ];
    let place = |(x, y): (f64, f64)| Point::new(x, y).rotate_about(Point::ZERO, rotation) + center;
    let mut segments: Vec<CubicSegment> = local
        .iter()
        .map(|q| CubicSegment::new(place(q[0]), place(q[1]), place(q[2]), place(q[3])))
        .collect();
    // share endpoints bit-for-bit
    for i in 1..4 {
        segments[i].p0 = segments[i - 1].p3;
    }
    segments[3].p3 = segments[0].p0;
    BezierPath::new(segments, true)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn circle_starts_on_the_right() {
        let c = synth_ellipse(Point::ZERO, 100.0, 100.0, 0.0).unwrap();
        assert_eq!(c.start(), Point::new(100.0, 0.0));
        assert_eq!(c.segments.len(), 4);
        assert!(c.closed);
    }

    #[test]
    fn bad_radius() {
        assert!(synth_ellipse(Point::ZERO, 0.0, 1.0, 0.0).is_err());
        assert!(synth_ellipse(Point::ZERO, 1.0, -1.0, 0.0).is_err());
    }

    #[test]
    fn rotation_moves_the_start() {
        let c = synth_ellipse(Point::new(10.0, 10.0), 50.0, 20.0, std::f64::consts::FRAC_PI_2).unwrap();
        assert!(c.start().distance(Point::new(10.0, 60.0)) < 1e-12);
    }
}
