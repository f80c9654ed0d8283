//! Debug dumps: skeleton PNG and standalone SVGs of centerlines and fitted paths.

use super::bezier::BezierPath;
use super::Polyline;
use crate::scene::{Mask, RasterError};
use std::fmt::Write;

fn num(v: f64) -> String {
    let s = format!("{v:.3}");
    if s == "-0.000" {
        "0.000".to_string()
    } else {
        s
    }
}

/// SVG path data with absolute commands and three decimals.
pub fn path_d(path: &BezierPath) -> String {
    let mut d = String::new();
    let s0 = path.start();
    write!(d, "M {} {}", num(s0.x), num(s0.y)).unwrap();
    for s in &path.segments {
        write!(
            d,
            " C {} {} {} {} {} {}",
            num(s.c1.x),
            num(s.c1.y),
            num(s.c2.x),
            num(s.c2.y),
            num(s.p3.x),
            num(s.p3.y)
        )
        .unwrap();
    }
    if path.closed {
        d.push_str(" Z");
    }
    d
}

pub fn polyline_d(line: &Polyline) -> String {
    let mut d = String::new();
    for (i, p) in line.points.iter().enumerate() {
        let cmd = if i == 0 { 'M' } else { 'L' };
        write!(d, "{}{cmd} {} {}", if i == 0 { "" } else { " " }, num(p.x), num(p.y)).unwrap();
    }
    if line.closed {
        d.push_str(" Z");
    }
    d
}

fn document(width: usize, height: usize, body: &str) -> String {
    format!(
        "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"{width}\" height=\"{height}\" viewBox=\"0 0 {width} {height}\">\n{body}</svg>\n"
    )
}

pub fn centerline_svg(line: &Polyline, width: usize, height: usize) -> String {
    document(
        width,
        height,
        &format!("  <path d=\"{}\" fill=\"none\" stroke=\"#1f77b4\" stroke-width=\"1\"/>\n", polyline_d(line)),
    )
}

pub fn fitted_path_svg(path: &BezierPath, width: usize, height: usize) -> String {
    document(
        width,
        height,
        &format!("  <path d=\"{}\" fill=\"none\" stroke=\"#d62728\" stroke-width=\"2\"/>\n", path_d(path)),
    )
}

pub fn skeleton_png(skeleton: &Mask) -> Result<Vec<u8>, RasterError> {
    skeleton.encode_png()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::Point;
    use crate::pathsynth::bezier::CubicSegment;

    #[test]
    fn path_data_format() {
        let p = BezierPath::new(vec![CubicSegment::line(Point::new(0.0, 0.0), Point::new(3.0, -0.0001))], false).unwrap();
        assert_eq!(path_d(&p), "M 0.000 0.000 C 1.000 0.000 2.000 0.000 3.000 0.000");
        let l = Polyline::new(vec![Point::new(1.0, 2.0), Point::new(3.25, 4.0)], true).unwrap();
        assert_eq!(polyline_d(&l), "M 1.000 2.000 L 3.250 4.000 Z");
    }
}
