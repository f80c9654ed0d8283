use super::bezier::BezierPath;
use super::PathError;
use crate::geom::Point;
use crate::scene::TransformMatrix;
use nalgebra::Vector4;

/// Default depth of the motion plane: the object's own plane.
pub const DEFAULT_PLANE_DEPTH: f64 = 0.0;

/// Carry a screen-space motion path into an object's transformed plane.
///
/// Each control point `(x, y)` is lifted to `(x, y, plane_depth, 1)`, i.e. a
/// combination of the matrix's local basis columns, multiplied through the
/// full matrix and perspective-divided. The matrix is canvas-space, so a
/// rotation built about the object's anchor rotates the path about that
/// anchor. The identity transform returns the input untouched.
pub fn project_motion(path: &BezierPath, transform: &TransformMatrix, plane_depth: f64) -> Result<BezierPath, PathError> {
    if !transform.is_invertible() {
        return Err(PathError::SingularTransform(transform.determinant()));
    }
    if transform.is_identity() {
        return Ok(path.clone());
    }
    let mut projected = Vec::with_capacity(path.segments.len() * 4);
    for (index, p) in path.control_points().enumerate() {
        let v = transform.apply(Vector4::new(p.x, p.y, plane_depth, 1.0));
        if !(v[3] > 0.0) {
            return Err(PathError::BehindEye { index, x: p.x, y: p.y });
        }
        projected.push(Point::new(v[0] / v[3], v[1] / v[3]));
    }
    let mut it = projected.into_iter();
    Ok(path.map_points(|_| it.next().expect("one projected point per control point")))
}
