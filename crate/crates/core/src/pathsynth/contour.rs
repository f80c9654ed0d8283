//! Outer boundary tracing (Moore neighborhood, Jacob's stopping rule).

use super::{PathError, Polyline};
use crate::geom::Point;
use crate::scene::Mask;
use std::collections::VecDeque;

/// Components smaller than this many pixels produce no contour.
pub const MIN_COMPONENT_PIXELS: usize = 4;

/// Moore neighbors in clockwise order on a y-down canvas, starting west.
const MOORE: [(i64, i64); 8] = [(-1, 0), (-1, -1), (0, -1), (1, -1), (1, 0), (1, 1), (0, 1), (-1, 1)];

/// 8-connected component labels (0 = background) and the component count.
pub(crate) fn label_components(mask: &Mask) -> (Vec<u32>, u32) {
    let w = mask.width();
    let mut labels = vec![0u32; w * mask.height()];
    let mut next = 0u32;
    let mut queue = VecDeque::new();
    for (x, y) in mask.foreground() {
        if labels[y * w + x] != 0 {
            continue;
        }
        next += 1;
        labels[y * w + x] = next;
        queue.push_back((x, y));
        while let Some((cx, cy)) = queue.pop_front() {
            for (dx, dy) in MOORE {
                let (nx, ny) = (cx as i64 + dx, cy as i64 + dy);
                if mask.get_signed(nx, ny) {
                    let i = ny as usize * w + nx as usize;
                    if labels[i] == 0 {
                        labels[i] = next;
                        queue.push_back((nx as usize, ny as usize));
                    }
                }
            }
        }
    }
    (labels, next)
}

fn direction_index(from: (i64, i64), to: (i64, i64)) -> usize {
    let d = (to.0 - from.0, to.1 - from.1);
    MOORE.iter().position(|&m| m == d).expect("backtrack pixel is a Moore neighbor")
}

fn trace(
    inside: impl Fn(i64, i64) -> bool,
    start: (i64, i64),
    max_steps: usize,
) -> Vec<(i64, i64)> {
    let mut contour = vec![start];
    let mut p = start;
    let mut back = (start.0 - 1, start.1);
    let mut second: Option<(i64, i64)> = None;
    for _ in 0..max_steps {
        let idx = direction_index(p, back);
        let step = (1..=8).find_map(|k| {
            let (dx, dy) = MOORE[(idx + k) % 8];
            let q = (p.0 + dx, p.1 + dy);
            inside(q.0, q.1).then(|| {
                let (bx, by) = MOORE[(idx + k - 1) % 8];
                (q, (p.0 + bx, p.1 + by))
            })
        });
        let Some((q, new_back)) = step else {
            return contour; // isolated pixel
        };
        if p == start {
            match second {
                None => second = Some(q),
                Some(s) if s == q => {
                    contour.pop();
                    return contour;
                }
                Some(_) => {}
            }
        }
        contour.push(q);
        p = q;
        back = new_back;
    }
    contour
}

/// One closed, counterclockwise (as displayed) polyline per outer boundary of
/// each 8-connected foreground component, through boundary pixel centers.
pub fn extract_contours(mask: &Mask) -> Result<Vec<Polyline>, PathError> {
    if mask.is_empty() {
        return Err(PathError::EmptyMask);
    }
    let w = mask.width();
    let (labels, count) = label_components(mask);
    let mut sizes = vec![0usize; count as usize + 1];
    let mut starts: Vec<Option<(usize, usize)>> = vec![None; count as usize + 1];
    for (x, y) in mask.foreground() {
        let l = labels[y * w + x] as usize;
        sizes[l] += 1;
        starts[l].get_or_insert((x, y));
    }

    let mut out = Vec::new();
    for label in 1..=count as usize {
        if sizes[label] < MIN_COMPONENT_PIXELS {
            continue;
        }
        let (sx, sy) = starts[label].expect("component has a first pixel");
        let inside = |x: i64, y: i64| mask.get_signed(x, y) && labels[y as usize * w + x as usize] == label as u32;
        let pixels = trace(inside, (sx as i64, sy as i64), 4 * sizes[label] + 8);
        // The trace runs clockwise on screen; reverse while keeping the start vertex first.
        let mut points: Vec<Point> = Vec::with_capacity(pixels.len());
        points.push(Point::pixel_center(sx, sy));
        points.extend(pixels[1..].iter().rev().map(|&(x, y)| Point::pixel_center(x as usize, y as usize)));
        out.push(Polyline::dedup(points, true)?);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn square_block_boundary() {
        let m = Mask::from_fn(5, 5, |x, y| (1..4).contains(&x) && (1..4).contains(&y));
        let c = extract_contours(&m).unwrap();
        assert_eq!(c.len(), 1);
        let pts = &c[0].points;
        assert_eq!(pts.len(), 8);
        assert!(!pts.contains(&Point::pixel_center(2, 2)));
        assert!(c[0].signed_area() < 0.0, "counterclockwise on screen");
        assert_eq!(pts[0], Point::pixel_center(1, 1));
        // counterclockwise on screen from the top-left corner heads down the left edge
        assert_eq!(pts[1], Point::pixel_center(1, 2));
    }

    #[test]
    fn two_blobs_and_tiny_specks() {
        let m = Mask::from_fn(20, 10, |x, y| {
            let a = (1..5).contains(&x) && (1..5).contains(&y);
            let b = (10..18).contains(&x) && (2..8).contains(&y);
            let speck = x == 7 && y == 8;
            a || b || speck
        });
        assert_eq!(extract_contours(&m).unwrap().len(), 2);
    }

    #[test]
    fn empty_mask_errors() {
        assert!(matches!(extract_contours(&Mask::empty(4, 4)), Err(PathError::EmptyMask)));
    }

    #[test]
    fn concave_shape_visits_every_border_pixel() {
        // U shape: the inner notch must be traced too.
        let m = Mask::from_fn(7, 6, |x, y| (1..6).contains(&x) && (1..5).contains(&y) && !(x == 3 && y < 4));
        let c = &extract_contours(&m).unwrap()[0];
        for (x, y) in m.foreground() {
            let border = [(-1, 0), (1, 0), (0, -1), (0, 1)]
                .iter()
                .any(|&(dx, dy)| !m.get_signed(x as i64 + dx, y as i64 + dy));
            if border {
                assert!(c.points.contains(&Point::pixel_center(x, y)), "missing ({x},{y})");
            }
        }
    }
}
