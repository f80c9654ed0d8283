//! Ordered traversal of a thinned skeleton.

use super::{PathError, Polyline};
use crate::geom::Point;
use crate::scene::Mask;
use std::collections::VecDeque;

/// Branches ending at a junction with fewer pixels than this are pruned.
pub const DEFAULT_SPUR_LENGTH: usize = 5;

const RING: [(i64, i64); 8] = [(0, -1), (1, -1), (1, 0), (1, 1), (0, 1), (-1, 1), (-1, 0), (-1, -1)];

/// Pixel graph of a skeleton. Diagonal links are dropped when a shared
/// 4-neighbor already connects the two pixels, so staircases read as chains.
struct SkeletonGraph {
    pixels: Vec<(usize, usize)>,
    adjacency: Vec<Vec<usize>>,
}

impl SkeletonGraph {
    fn build(pixels: Vec<(usize, usize)>, width: usize, height: usize) -> Self {
        let mut index = vec![u32::MAX; width * height];
        for (i, &(x, y)) in pixels.iter().enumerate() {
            index[y * width + x] = i as u32;
        }
        let lookup = |x: i64, y: i64| -> Option<usize> {
            if x < 0 || y < 0 || x as usize >= width || y as usize >= height {
                return None;
            }
            let v = index[y as usize * width + x as usize];
            (v != u32::MAX).then_some(v as usize)
        };
        let adjacency = pixels
            .iter()
            .map(|&(x, y)| {
                let (x, y) = (x as i64, y as i64);
                RING.iter()
                    .filter_map(|&(dx, dy)| {
                        let q = lookup(x + dx, y + dy)?;
                        if dx != 0 && dy != 0 && (lookup(x + dx, y).is_some() || lookup(x, y + dy).is_some()) {
                            return None;
                        }
                        Some(q)
                    })
                    .collect()
            })
            .collect();
        SkeletonGraph { pixels, adjacency }
    }

    fn degree(&self, i: usize) -> usize {
        self.adjacency[i].len()
    }

    fn endpoints(&self) -> Vec<usize> {
        (0..self.pixels.len()).filter(|&i| self.degree(i) == 1).collect()
    }

    /// Pixels of the branch from endpoint `e` up to (excluding) the first junction,
    /// or `None` when the walk ends at another endpoint instead.
    fn branch_to_junction(&self, e: usize) -> Option<Vec<usize>> {
        let mut branch = vec![e];
        let (mut prev, mut cur) = (e, self.adjacency[e][0]);
        loop {
            match self.degree(cur) {
                1 => return None,
                2 => {
                    branch.push(cur);
                    let next = self.adjacency[cur].iter().copied().find(|&n| n != prev)?;
                    prev = cur;
                    cur = next;
                    if cur == e {
                        return None;
                    }
                }
                _ => return Some(branch),
            }
        }
    }

    fn bfs(&self, from: usize) -> (Vec<u32>, Vec<usize>) {
        let mut dist = vec![u32::MAX; self.pixels.len()];
        let mut parent = vec![usize::MAX; self.pixels.len()];
        let mut queue = VecDeque::from([from]);
        dist[from] = 0;
        while let Some(i) = queue.pop_front() {
            for &n in &self.adjacency[i] {
                if dist[n] == u32::MAX {
                    dist[n] = dist[i] + 1;
                    parent[n] = i;
                    queue.push_back(n);
                }
            }
        }
        (dist, parent)
    }
}

fn prune_spurs(pixels: Vec<(usize, usize)>, width: usize, height: usize, spur_length: usize) -> SkeletonGraph {
    let original = pixels.clone();
    let mut graph = SkeletonGraph::build(pixels, width, height);
    loop {
        let mut remove = vec![false; graph.pixels.len()];
        let mut any = false;
        for e in graph.endpoints() {
            if let Some(branch) = graph.branch_to_junction(e) {
                if branch.len() < spur_length {
                    for i in branch {
                        remove[i] = true;
                    }
                    any = true;
                }
            }
        }
        if !any {
            break;
        }
        let kept: Vec<(usize, usize)> = graph
            .pixels
            .iter()
            .zip(&remove)
            .filter(|(_, &r)| !r)
            .map(|(&p, _)| p)
            .collect();
        if kept.len() < 2 {
            return SkeletonGraph::build(original, width, height);
        }
        graph = SkeletonGraph::build(kept, width, height);
    }
    graph
}

/// Convert a skeleton raster into an ordered centerline.
///
/// Spurs shorter than `spur_length` pixels are pruned, then the longest
/// breadth-first path between any two endpoints is returned, starting from
/// the endpoint with the smaller `(x, y)`. A skeleton without endpoints (a
/// pure cycle) comes back as a closed polyline.
pub fn skeleton_to_polyline_with(skeleton: &Mask, spur_length: usize) -> Result<Polyline, PathError> {
    if skeleton.is_empty() {
        return Err(PathError::EmptyMask);
    }
    let pixels: Vec<(usize, usize)> = skeleton.foreground().collect();
    let graph = prune_spurs(pixels, skeleton.width(), skeleton.height(), spur_length);
    let center = |i: usize| {
        let (x, y) = graph.pixels[i];
        Point::pixel_center(x, y)
    };

    let endpoints = graph.endpoints();
    if endpoints.is_empty() {
        return closed_walk(&graph).map(|idx| idx.into_iter().map(center).collect()).and_then(|pts| Polyline::new(pts, true));
    }

    let mut best: Option<(u32, usize, usize, Vec<usize>)> = None;
    for &e in &endpoints {
        let (dist, parent) = graph.bfs(e);
        for &f in &endpoints {
            if f == e || dist[f] == u32::MAX {
                continue;
            }
            if best.as_ref().map_or(true, |b| dist[f] > b.0) {
                best = Some((dist[f], e, f, parent.clone()));
            }
        }
    }
    let Some((_, from, to, parent)) = best else {
        return Err(PathError::Degenerate("skeleton has no path between two endpoints".into()));
    };
    // walk back from `to` to `from`
    let mut chain = vec![to];
    let mut cur = to;
    while cur != from {
        cur = parent[cur];
        chain.push(cur);
    }
    // chain runs to -> from; orient so the smaller (x, y) endpoint comes first
    if graph.pixels[from] < graph.pixels[to] {
        chain.reverse();
    }
    Polyline::new(chain.into_iter().map(center).collect(), false)
}

/// [`skeleton_to_polyline_with`] using the default spur length.
pub fn skeleton_to_polyline(skeleton: &Mask) -> Result<Polyline, PathError> {
    skeleton_to_polyline_with(skeleton, DEFAULT_SPUR_LENGTH)
}

/// Greedy walk around the largest cycle-only component.
fn closed_walk(graph: &SkeletonGraph) -> Result<Vec<usize>, PathError> {
    let mut visited = vec![false; graph.pixels.len()];
    let mut best: Vec<usize> = Vec::new();
    for start in 0..graph.pixels.len() {
        if visited[start] {
            continue;
        }
        let mut walk = vec![start];
        visited[start] = true;
        let mut cur = start;
        while let Some(&next) = graph.adjacency[cur].iter().find(|&&n| !visited[n]) {
            visited[next] = true;
            walk.push(next);
            cur = next;
        }
        if walk.len() > best.len() {
            best = walk;
        }
    }
    if best.len() < 3 {
        return Err(PathError::Degenerate("skeleton cycle too short".into()));
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn straight_line_in_order() {
        let m = Mask::from_fn(14, 3, |x, y| y == 1 && (2..12).contains(&x));
        let p = skeleton_to_polyline(&m).unwrap();
        assert!(!p.closed);
        let expected: Vec<Point> = (2..12).map(|x| Point::pixel_center(x, 1)).collect();
        assert_eq!(p.points, expected);
    }

    #[test]
    fn t_shape_prunes_stem() {
        // bar of 20 along y = 1, stem of 3 below its middle
        let m = Mask::from_fn(24, 8, |x, y| (y == 1 && (2..22).contains(&x)) || (x == 11 && (2..5).contains(&y)));
        let p = skeleton_to_polyline(&m).unwrap();
        let expected: Vec<Point> = (2..22).map(|x| Point::pixel_center(x, 1)).collect();
        assert_eq!(p.points, expected);
    }

    #[test]
    fn ring_is_closed() {
        // 1-px square ring
        let m = Mask::from_fn(12, 12, |x, y| {
            let on_x = (2..10).contains(&x);
            let on_y = (2..10).contains(&y);
            (on_x && (y == 2 || y == 9)) || (on_y && (x == 2 || x == 9))
        });
        let p = skeleton_to_polyline(&m).unwrap();
        assert!(p.closed);
        assert_eq!(p.len(), m.count());
    }

    #[test]
    fn staircase_is_a_chain() {
        let m = Mask::from_fn(12, 12, |x, y| y + 1 == x || y == x);
        let p = skeleton_to_polyline(&m).unwrap();
        assert_eq!(p.len(), m.count());
        assert!(p.points.windows(2).all(|w| w[0].distance(w[1]) < 1.5));
    }

    #[test]
    fn empty_errors() {
        assert!(matches!(skeleton_to_polyline(&Mask::empty(3, 3)), Err(PathError::EmptyMask)));
    }
}
