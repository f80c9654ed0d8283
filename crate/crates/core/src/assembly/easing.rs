use std::f64::consts::PI;

/// Control values of the standard ease-in-out timing curve.
pub const EASE_IN_OUT: [f64; 4] = [0.42, 0.0, 0.58, 1.0];

/// Time-remapping curve recorded on a track.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum EasingCurve {
    Linear,
    /// Cubic timing curve through (0,0), (0.42,0), (0.58,1), (1,1).
    EaseInOut,
    /// Linear progress along the path with a periodic hop superimposed; see [`gallop_offset`].
    Gallop { hop_count: u32, hop_height: f64 },
    /// Ball-drop settle: progress reaches the end, then rebounds three times before resting.
    Bounce,
    /// Cubic timing curve with control points (x1, y1), (x2, y2); x values in [0, 1].
    Custom([f64; 4]),
}

impl EasingCurve {
    pub fn kind(&self) -> &'static str {
        match self {
            EasingCurve::Linear => "linear",
            EasingCurve::EaseInOut => "ease_in_out",
            EasingCurve::Gallop { .. } => "gallop",
            EasingCurve::Bounce => "bounce",
            EasingCurve::Custom(_) => "custom",
        }
    }

    /// Whether the parameters are usable: custom x values in [0, 1], gallop hops ≥ 1.
    pub fn is_valid(&self) -> bool {
        match *self {
            EasingCurve::Custom([x1, y1, x2, y2]) => {
                (0.0..=1.0).contains(&x1) && (0.0..=1.0).contains(&x2) && y1.is_finite() && y2.is_finite()
            }
            EasingCurve::Gallop { hop_count, hop_height } => hop_count >= 1 && hop_height.is_finite(),
            _ => true,
        }
    }

    /// Progress at time fraction `x ∈ [0, 1]`.
    pub fn apply(&self, x: f64) -> f64 {
        let x = x.clamp(0.0, 1.0);
        match *self {
            EasingCurve::Linear | EasingCurve::Gallop { .. } => x,
            EasingCurve::EaseInOut => cubic_timing(EASE_IN_OUT, x),
            EasingCurve::Bounce => bounce_out(x),
            EasingCurve::Custom(p) => cubic_timing(p, x),
        }
    }
}

/// Vertical hop offset at path progress `u`: `−hop_height·|sin(π·hop_count·u)|` (negative is up).
pub fn gallop_offset(u: f64, hop_count: u32, hop_height: f64) -> f64 {
    -hop_height * (PI * f64::from(hop_count) * u).sin().abs()
}

fn bezier_1d(a: f64, b: f64, s: f64) -> f64 {
    // endpoints fixed at 0 and 1
    let m = 1.0 - s;
    3.0 * m * m * s * a + 3.0 * m * s * s * b + s * s * s
}

fn bezier_1d_deriv(a: f64, b: f64, s: f64) -> f64 {
    let m = 1.0 - s;
    3.0 * m * m * a + 6.0 * m * s * (b - a) + 3.0 * s * s * (1.0 - b)
}

/// Evaluate a CSS-style cubic timing function: solve x(s) = x, return y(s).
pub(crate) fn cubic_timing([x1, y1, x2, y2]: [f64; 4], x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    if x >= 1.0 {
        return 1.0;
    }
    // x(s) is monotone for x1, x2 in [0, 1]; Newton from s = x, bisection as a guard
    let mut s = x;
    for _ in 0..8 {
        let err = bezier_1d(x1, x2, s) - x;
        if err.abs() < 1e-12 {
            return bezier_1d(y1, y2, s);
        }
        let d = bezier_1d_deriv(x1, x2, s);
        if d.abs() < 1e-9 {
            break;
        }
        s = (s - err / d).clamp(0.0, 1.0);
    }
    let (mut lo, mut hi) = (0.0, 1.0);
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if bezier_1d(x1, x2, mid) < x {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    bezier_1d(y1, y2, 0.5 * (lo + hi))
}

fn bounce_out(x: f64) -> f64 {
    const N: f64 = 7.5625;
    const D: f64 = 2.75;
    if x < 1.0 / D {
        N * x * x
    } else if x < 2.0 / D {
        let x = x - 1.5 / D;
        N * x * x + 0.75
    } else if x < 2.5 / D {
        let x = x - 2.25 / D;
        N * x * x + 0.9375
    } else {
        let x = x - 2.625 / D;
        N * x * x + 0.984375
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gallop_boundaries_and_peak() {
        assert!(gallop_offset(0.0, 4, 10.0).abs() < 1e-9);
        assert!(gallop_offset(1.0, 4, 10.0).abs() < 1e-9);
        assert_eq!(gallop_offset(1.0 / 8.0, 4, 10.0), -10.0);
    }

    #[test]
    fn ease_in_out_is_symmetric_and_monotone() {
        let e = EasingCurve::EaseInOut;
        assert_eq!(e.apply(0.0), 0.0);
        assert_eq!(e.apply(1.0), 1.0);
        assert!((e.apply(0.5) - 0.5).abs() < 1e-9);
        let mut prev = 0.0;
        for i in 1..=100 {
            let x = i as f64 / 100.0;
            let y = e.apply(x);
            assert!(y >= prev);
            assert!((y + e.apply(1.0 - x) - 1.0).abs() < 1e-9);
            prev = y;
        }
    }

    #[test]
    fn bounce_is_continuous_and_ends_at_one() {
        assert_eq!(EasingCurve::Bounce.apply(1.0), 1.0);
        for k in [1.0, 2.0, 2.5] {
            let x = k / 2.75;
            assert!((bounce_out(x - 1e-9) - bounce_out(x)).abs() < 1e-6);
        }
    }

    #[test]
    fn custom_validity() {
        assert!(EasingCurve::Custom([0.1, -0.5, 0.9, 1.5]).is_valid());
        assert!(!EasingCurve::Custom([1.1, 0.0, 0.5, 1.0]).is_valid());
    }
}
