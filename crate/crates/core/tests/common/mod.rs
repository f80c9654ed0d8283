//! Test-side oracles and generators shared by the integration suites.
//!
//! Nothing here calls the library routine it is used to check: thinning
//! conditions, component labeling, nearest points on curves, arc length and
//! distance transforms are all recomputed from scratch.

#![allow(dead_code)]

use genanim::pathsynth::{BezierPath, CubicSegment};
use genanim::scene::Mask;
use genanim::Point;
use proptest::prelude::*;
use std::collections::VecDeque;
use std::path::PathBuf;

pub fn fixtures() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures")
}

pub const MARIO_PROMPT: &str = "Move Mario along the hilly path.";
pub const ORBIT_PROMPT: &str = "Make the Moon orbit around Earth.";
pub const FLY_IN_PROMPT: &str = "Fly in The Vision text from the left.";

/// (fixture file, prompt) for the three worked scenarios.
pub const GOLDEN: [(&str, &str); 3] = [
    ("mario_hills.scene.json", MARIO_PROMPT),
    ("earth_moon.scene.json", ORBIT_PROMPT),
    ("vision.scene.json", FLY_IN_PROMPT),
];

// ---------------------------------------------------------------- masks

/// 8-connected component count by breadth-first labeling.
pub fn components(mask: &Mask) -> usize {
    let (w, h) = (mask.width(), mask.height());
    let mut seen = vec![false; w * h];
    let mut count = 0;
    for y in 0..h {
        for x in 0..w {
            if !mask.get(x, y) || seen[y * w + x] {
                continue;
            }
            count += 1;
            seen[y * w + x] = true;
            let mut queue = VecDeque::from([(x, y)]);
            while let Some((cx, cy)) = queue.pop_front() {
                for dy in -1i64..=1 {
                    for dx in -1i64..=1 {
                        let (nx, ny) = (cx as i64 + dx, cy as i64 + dy);
                        if nx < 0 || ny < 0 || nx >= w as i64 || ny >= h as i64 {
                            continue;
                        }
                        let (nx, ny) = (nx as usize, ny as usize);
                        if mask.get(nx, ny) && !seen[ny * w + nx] {
                            seen[ny * w + nx] = true;
                            queue.push_back((nx, ny));
                        }
                    }
                }
            }
        }
    }
    count
}

/// Zhang and Suen's deletion test, transcribed from the 1984 CACM paper.
/// `step` is 1 or 2; pixels outside the image are 0.
pub fn zs_removable(mask: &Mask, x: usize, y: usize, step: u8) -> bool {
    let px = |dx: i64, dy: i64| u8::from(mask.get_signed(x as i64 + dx, y as i64 + dy));
    let (p2, p3, p4, p5) = (px(0, -1), px(1, -1), px(1, 0), px(1, 1));
    let (p6, p7, p8, p9) = (px(0, 1), px(-1, 1), px(-1, 0), px(-1, -1));
    let seq = [p2, p3, p4, p5, p6, p7, p8, p9, p2];
    let b = p2 + p3 + p4 + p5 + p6 + p7 + p8 + p9;
    let a = seq.windows(2).filter(|w| w[0] == 0 && w[1] == 1).count();
    let (c, d) = if step == 1 {
        (p2 * p4 * p6, p4 * p6 * p8)
    } else {
        (p2 * p4 * p8, p2 * p6 * p8)
    };
    (2..=6).contains(&b) && a == 1 && c == 0 && d == 0
}

pub fn is_subset(a: &Mask, b: &Mask) -> bool {
    a.foreground().all(|(x, y)| b.get(x, y))
}

/// Union of disks and rectangles on a small canvas.
pub fn blob_strategy() -> impl Strategy<Value = Mask> {
    let shape = (2usize..46, 2usize..46, 1usize..9, 1usize..9, any::<bool>());
    prop::collection::vec(shape, 1..5).prop_map(|shapes| {
        Mask::from_fn(48, 48, |x, y| {
            shapes.iter().any(|&(cx, cy, a, b, round)| {
                let (dx, dy) = (x as f64 - cx as f64, y as f64 - cy as f64);
                if round {
                    dx * dx + dy * dy <= (a * a) as f64
                } else {
                    dx.abs() <= a as f64 && dy.abs() <= b as f64
                }
            })
        })
    })
}

/// Exact distance from pixel `(x, y)` to the nearest background pixel center,
/// with everything off-canvas counting as background. Grows a square search
/// window until no unseen pixel can be closer than the best hit.
pub fn distance_to_background(mask: &Mask, x: usize, y: usize) -> f64 {
    if !mask.get(x, y) {
        return 0.0;
    }
    let mut best = f64::INFINITY;
    let mut r = 1i64;
    loop {
        for dy in -r..=r {
            for dx in -r..=r {
                if dx.abs() != r && dy.abs() != r {
                    continue;
                }
                if !mask.get_signed(x as i64 + dx, y as i64 + dy) {
                    best = best.min(((dx * dx + dy * dy) as f64).sqrt());
                }
            }
        }
        if best <= r as f64 {
            return best;
        }
        r += 1;
    }
}

// ---------------------------------------------------------------- curves

fn bez(s: &CubicSegment, t: f64) -> Point {
    let u = 1.0 - t;
    let (a, b, c, d) = (u * u * u, 3.0 * u * u * t, 3.0 * u * t * t, t * t * t);
    Point::new(
        a * s.p0.x + b * s.c1.x + c * s.c2.x + d * s.p3.x,
        a * s.p0.y + b * s.c1.y + c * s.c2.y + d * s.p3.y,
    )
}

/// Distance from `q` to the curve: coarse scan per segment, then golden-section refinement.
pub fn distance_to_path(path: &BezierPath, q: Point) -> f64 {
    let mut best = f64::INFINITY;
    for s in &path.segments {
        // at least one sample per quarter pixel of control polygon
        let polygon = s.p0.distance(s.c1) + s.c1.distance(s.c2) + s.c2.distance(s.p3);
        let scan = ((polygon * 4.0).ceil() as usize).max(400);
        let (mut bi, mut bd) = (0, f64::INFINITY);
        for i in 0..=scan {
            let d = bez(s, i as f64 / scan as f64).distance(q);
            if d < bd {
                (bi, bd) = (i, d);
            }
        }
        let (mut lo, mut hi) = (bi.saturating_sub(1) as f64 / scan as f64, (bi + 1).min(scan) as f64 / scan as f64);
        let g = 0.5 * (5f64.sqrt() - 1.0);
        for _ in 0..60 {
            let (m1, m2) = (hi - g * (hi - lo), lo + g * (hi - lo));
            if bez(s, m1).distance(q) < bez(s, m2).distance(q) {
                hi = m2;
            } else {
                lo = m1;
            }
        }
        best = best.min(bd).min(bez(s, 0.5 * (lo + hi)).distance(q));
    }
    best
}

/// Dense chord-length parameterization of a path, for arc-length lookups.
pub struct DenseArc {
    points: Vec<Point>,
    cumulative: Vec<f64>,
}

impl DenseArc {
    pub fn new(path: &BezierPath, per_segment: usize) -> Self {
        let mut points = vec![path.segments[0].p0];
        for s in &path.segments {
            for i in 1..=per_segment {
                points.push(bez(s, i as f64 / per_segment as f64));
            }
        }
        let mut cumulative = vec![0.0];
        for w in points.windows(2) {
            cumulative.push(cumulative.last().unwrap() + w[0].distance(w[1]));
        }
        DenseArc { points, cumulative }
    }

    pub fn total(&self) -> f64 {
        *self.cumulative.last().unwrap()
    }

    pub fn point_at(&self, u: f64) -> Point {
        let target = u.clamp(0.0, 1.0) * self.total();
        let i = self.cumulative.partition_point(|&c| c < target).clamp(1, self.points.len() - 1);
        let (c0, c1) = (self.cumulative[i - 1], self.cumulative[i]);
        let f = if c1 > c0 { (target - c0) / (c1 - c0) } else { 0.0 };
        self.points[i - 1].lerp(self.points[i], f)
    }
}

/// Smooth-ish random walks: bounded turning, varied step lengths.
pub fn polyline_strategy() -> impl Strategy<Value = Vec<Point>> {
    (
        (0.0f64..200.0, 0.0f64..200.0),
        0.0f64..std::f64::consts::TAU,
        prop::collection::vec((1.5f64..15.0, -0.6f64..0.6), 4..60),
    )
        .prop_map(|((x, y), heading, steps)| {
            let mut p = Point::new(x, y);
            let mut h = heading;
            let mut out = vec![p];
            for (len, turn) in steps {
                h += turn;
                p = p + Point::new(h.cos(), h.sin()) * len;
                out.push(p);
            }
            out
        })
}

/// Largest deviation of `|M⁻¹(p - c)|` from 1 over dense samples, where `M`
/// maps the unit circle onto the ellipse.
pub fn ellipse_radial_error(path: &BezierPath, center: Point, rx: f64, ry: f64, rotation: f64) -> f64 {
    let (sin, cos) = rotation.sin_cos();
    let mut worst = 0.0f64;
    for s in &path.segments {
        for i in 0..=200 {
            let d = bez(s, i as f64 / 200.0) - center;
            let (lx, ly) = (d.x * cos + d.y * sin, -d.x * sin + d.y * cos);
            let rho = ((lx / rx).powi(2) + (ly / ry).powi(2)).sqrt();
            worst = worst.max((rho - 1.0).abs());
        }
    }
    worst
}

// ---------------------------------------------------------------- cli and serve

/// `genanim run` in-process on a fixture; returns the JSON written to stdout.
pub fn cli_json(fixture: &str, prompt: &str, click: Option<Point>) -> Result<String, String> {
    let args = genanim::cli::RunArgs {
        scene: fixtures().join(fixture),
        prompt: prompt.into(),
        output: None,
        svg: None,
        click: click.map(genanim::cli::ClickPoint),
        mask: None,
        tuning: genanim::cli::Tuning::default(),
    };
    let (mut out, mut err) = (Vec::new(), Vec::new());
    match genanim::cli::run_once(&args, &mut out, &mut err) {
        0 => Ok(String::from_utf8(out).unwrap()),
        code => Err(format!("exit {code}: {}", String::from_utf8_lossy(&err))),
    }
}

pub fn http(method: &str, url: &str, body: &str) -> (u16, String) {
    let agent = ureq::Agent::config_builder().http_status_as_error(false).build().new_agent();
    let mut resp = match method {
        "GET" => agent.get(url).call(),
        _ => agent.post(url).header("Content-Type", "application/json").send(body),
    }
    .unwrap_or_else(|e| panic!("{method} {url}: {e}"));
    (resp.status().as_u16(), resp.body_mut().read_to_string().unwrap())
}

/// Scene JSON with the artwork inlined, as a browser client would send it.
pub fn scene_body(fixture: &str) -> String {
    genanim::scene::load_scene(fixtures().join(fixture))
        .unwrap()
        .with_embedded_artwork()
        .unwrap()
        .to_json_string()
}

/// The same request sequence a client makes: create, prompt, optional click, synthesize.
pub fn serve_json(base: &str, fixture: &str, prompt: &str, click: Option<Point>) -> Result<String, String> {
    let (status, body) = http("POST", &format!("{base}/session"), &scene_body(fixture));
    if status != 201 {
        return Err(format!("create: {status} {body}"));
    }
    let id = serde_json::from_str::<serde_json::Value>(&body).unwrap()["id"].as_str().unwrap().to_string();
    let prompt_body = serde_json::json!({ "text": prompt }).to_string();
    let (status, body) = http("POST", &format!("{base}/session/{id}/prompt"), &prompt_body);
    if status != 200 {
        return Err(format!("prompt: {status} {body}"));
    }
    if let Some(p) = click {
        let (status, body) = http("POST", &format!("{base}/session/{id}/click"), &serde_json::json!({ "x": p.x, "y": p.y }).to_string());
        if status != 200 {
            return Err(format!("click: {status} {body}"));
        }
    }
    let (status, body) = http("POST", &format!("{base}/session/{id}/synthesize"), "");
    if status != 200 {
        return Err(format!("synthesize: {status} {body}"));
    }
    Ok(body)
}

// ---------------------------------------------------------------- shared property bodies

use genanim::pathsynth::{fit_beziers, smooth_polyline, synth_ellipse, thin_mask, Polyline, DEFAULT_LAMBDA, DEFAULT_MU};
use proptest::test_runner::TestCaseError;

pub const ELLIPSE_RADIAL_TOLERANCE: f64 = 3e-4;

pub fn check_thinning(mask: &Mask) -> Result<(), TestCaseError> {
    let skel = thin_mask(mask).map_err(|e| TestCaseError::fail(e.to_string()))?;
    prop_assert!(is_subset(&skel, mask));
    prop_assert_eq!(components(&skel), components(mask));
    prop_assert_eq!(&thin_mask(&skel).unwrap(), &skel);
    for (x, y) in skel.foreground() {
        prop_assert!(!zs_removable(&skel, x, y, 1) && !zs_removable(&skel, x, y, 2), "({x}, {y}) still removable");
    }
    Ok(())
}

pub fn check_fit(points: &[Point], tol: f64) -> Result<(), TestCaseError> {
    let path = fit_beziers(&Polyline::new(points.to_vec(), false).unwrap(), tol).map_err(|e| TestCaseError::fail(e.to_string()))?;
    prop_assert_eq!(path.start(), points[0]);
    prop_assert_eq!(path.end(), *points.last().unwrap());
    for p in points {
        let d = distance_to_path(&path, *p);
        prop_assert!(d <= tol + 1e-6, "vertex {p:?} is {d} from the curve (tolerance {tol})");
    }
    Ok(())
}

/// Evenly spaced points on a line: `(origin, angle, step, count)`.
pub fn collinear_strategy() -> impl Strategy<Value = (Point, f64, f64, usize, usize)> {
    (
        (-100.0f64..100.0, -100.0f64..100.0).prop_map(|(x, y)| Point::new(x, y)),
        0.0f64..std::f64::consts::TAU,
        0.5f64..10.0,
        3usize..40,
        1usize..30,
    )
}

pub fn check_collinear_fixed((origin, angle, step, n, iterations): (Point, f64, f64, usize, usize)) -> Result<(), TestCaseError> {
    let dir = Point::new(angle.cos(), angle.sin());
    let pts: Vec<Point> = (0..n).map(|i| origin + dir * (step * i as f64)).collect();
    let s = smooth_polyline(&Polyline::new(pts.clone(), false).unwrap(), DEFAULT_LAMBDA, DEFAULT_MU, iterations).unwrap();
    prop_assert_eq!(s.points.len(), n);
    for (a, b) in s.points.iter().zip(&pts) {
        prop_assert!(a.distance(*b) <= 1e-9, "{a:?} moved from {b:?}");
    }
    Ok(())
}

/// `(center, rx, ry, rotation)` spanning tiny to large and round to flat.
pub fn ellipse_strategy() -> impl Strategy<Value = (Point, f64, f64, f64)> {
    (
        (-500.0f64..500.0, -500.0f64..500.0).prop_map(|(x, y)| Point::new(x, y)),
        1.0f64..800.0,
        0.05f64..1.0,
        -std::f64::consts::PI..std::f64::consts::PI,
    )
        .prop_map(|(c, rx, ratio, rot)| (c, rx, rx * ratio, rot))
}

pub fn check_ellipse((center, rx, ry, rotation): (Point, f64, f64, f64)) -> Result<(), TestCaseError> {
    let path = synth_ellipse(center, rx, ry, rotation).map_err(|e| TestCaseError::fail(e.to_string()))?;
    prop_assert!(path.closed);
    prop_assert_eq!(path.segments.len(), 4);
    let err = ellipse_radial_error(&path, center, rx, ry, rotation);
    prop_assert!(err <= ELLIPSE_RADIAL_TOLERANCE, "radial error {err}");
    Ok(())
}
