//! Zhang-Suen thinning.
//!
//! Each subiteration marks every pixel that passes the classic conditions on
//! the current image, then deletes the marked pixels in raster order,
//! re-checking the conditions against the partially updated image. The first
//! deletion of a subiteration always succeeds, so the loop stops exactly when
//! neither subiteration marks anything. The re-check keeps 2-pixel-thick
//! structures (which the purely parallel rule erases) from vanishing, so the
//! 8-connected component count never changes.

use super::PathError;
use crate::scene::Mask;

/// Neighbors P2..P9: N, NE, E, SE, S, SW, W, NW.
const RING: [(i64, i64); 8] = [(0, -1), (1, -1), (1, 0), (1, 1), (0, 1), (-1, 1), (-1, 0), (-1, -1)];

fn ring(mask: &Mask, x: usize, y: usize) -> [bool; 8] {
    let mut out = [false; 8];
    for (slot, (dx, dy)) in out.iter_mut().zip(RING) {
        *slot = mask.get_signed(x as i64 + dx, y as i64 + dy);
    }
    out
}

/// Whether pixel `(x, y)` is deletable in subiteration `first` (true) or second.
fn deletable(mask: &Mask, x: usize, y: usize, first: bool) -> bool {
    let n = ring(mask, x, y);
    let b = n.iter().filter(|&&v| v).count();
    if !(2..=6).contains(&b) {
        return false;
    }
    let a = (0..8).filter(|&i| !n[i] && n[(i + 1) % 8]).count();
    if a != 1 {
        return false;
    }
    let [p2, _, p4, _, p6, _, p8, _] = n;
    if first {
        !(p2 && p4 && p6) && !(p4 && p6 && p8)
    } else {
        !(p2 && p4 && p8) && !(p2 && p6 && p8)
    }
}

/// Thin `mask` to a one-pixel-wide skeleton.
pub fn thin_mask(mask: &Mask) -> Result<Mask, PathError> {
    if mask.is_empty() {
        return Err(PathError::EmptyMask);
    }
    let mut out = mask.clone();
    let mut active: Vec<(usize, usize)> = out.foreground().collect();
    loop {
        let mut changed = false;
        for first in [true, false] {
            let marked: Vec<(usize, usize)> = active
                .iter()
                .copied()
                .filter(|&(x, y)| deletable(&out, x, y, first))
                .collect();
            for (x, y) in marked {
                if deletable(&out, x, y, first) {
                    out.set(x, y, false);
                    changed = true;
                }
            }
            active.retain(|&(x, y)| out.get(x, y));
        }
        if !changed {
            return Ok(out);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_pixel_unchanged() {
        let m = Mask::from_fn(5, 5, |x, y| x == 2 && y == 2);
        assert_eq!(thin_mask(&m).unwrap(), m);
    }

    #[test]
    fn two_by_two_block_survives() {
        let m = Mask::from_fn(6, 6, |x, y| (2..4).contains(&x) && (2..4).contains(&y));
        let s = thin_mask(&m).unwrap();
        assert!(s.count() >= 1);
    }

    #[test]
    fn empty_errors() {
        assert!(matches!(thin_mask(&Mask::empty(3, 3)), Err(PathError::EmptyMask)));
    }
}
