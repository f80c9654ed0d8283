use crate::geom::Point;
use nalgebra::{Matrix4, Vector4};

/// Smallest |det| accepted as invertible.
pub const MIN_DETERMINANT: f64 = 1e-9;

/// 4x4 homogeneous transform in canvas space, column-vector convention (`p' = M * p`).
///
/// 2D affine transforms embed with an identity z row and column.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TransformMatrix(Matrix4<f64>);

impl Default for TransformMatrix {
    fn default() -> Self {
        Self::identity()
    }
}

impl TransformMatrix {
    pub fn identity() -> Self {
        TransformMatrix(Matrix4::identity())
    }

    /// Build from 16 numbers in column-major order (the scene file layout).
    pub fn from_column_major(values: &[f64; 16]) -> Self {
        TransformMatrix(Matrix4::from_column_slice(values))
    }

    pub fn to_column_major(&self) -> [f64; 16] {
        let mut out = [0.0; 16];
        out.copy_from_slice(self.0.as_slice());
        out
    }

    pub fn from_matrix(m: Matrix4<f64>) -> Self {
        TransformMatrix(m)
    }

    pub fn matrix(&self) -> &Matrix4<f64> {
        &self.0
    }

    pub fn translation(dx: f64, dy: f64) -> Self {
        let mut m = Matrix4::identity();
        m[(0, 3)] = dx;
        m[(1, 3)] = dy;
        TransformMatrix(m)
    }

    /// Rotation about the z axis by `angle` radians.
    pub fn rotation_z(angle: f64) -> Self {
        let (s, c) = angle.sin_cos();
        let mut m = Matrix4::identity();
        m[(0, 0)] = c;
        m[(0, 1)] = -s;
        m[(1, 0)] = s;
        m[(1, 1)] = c;
        TransformMatrix(m)
    }

    /// Rotation about the z axis through `pivot`.
    pub fn rotation_z_about(angle: f64, pivot: Point) -> Self {
        Self::translation(pivot.x, pivot.y)
            .then_apply_after(&Self::rotation_z(angle))
            .then_apply_after(&Self::translation(-pivot.x, -pivot.y))
    }

    /// Embed a 2D affine map `[a c e; b d f]` (SVG order).
    pub fn affine_2d(a: f64, b: f64, c: f64, d: f64, e: f64, f: f64) -> Self {
        let mut m = Matrix4::identity();
        m[(0, 0)] = a;
        m[(1, 0)] = b;
        m[(0, 1)] = c;
        m[(1, 1)] = d;
        m[(0, 3)] = e;
        m[(1, 3)] = f;
        TransformMatrix(m)
    }

    /// `self * other`: apply `other` first, then `self`.
    pub fn then_apply_after(&self, other: &TransformMatrix) -> TransformMatrix {
        TransformMatrix(self.0 * other.0)
    }

    pub fn determinant(&self) -> f64 {
        self.0.determinant()
    }

    pub fn is_invertible(&self) -> bool {
        self.determinant().abs() > MIN_DETERMINANT
    }

    /// Exact comparison against the identity; no tolerance.
    pub fn is_identity(&self) -> bool {
        self.0 == Matrix4::identity()
    }

    pub fn apply(&self, v: Vector4<f64>) -> Vector4<f64> {
        self.0 * v
    }
}
