//! Mask-to-path geometry: centerline extraction, smoothing, Bézier fitting,
//! orbit synthesis, occlusion splitting and projection into transformed planes.

pub mod bezier;
mod contour;
pub mod debug;
mod ellipse;
mod fit;
mod polyline;
mod project;
mod skeleton;
mod smooth;
mod split;
mod thin;
mod width;

pub use bezier::{sample_path, ArcLengthTable, BezierPath, CubicSegment, ARC_TABLE_ENTRIES};
pub use contour::{extract_contours, MIN_COMPONENT_PIXELS};
pub use ellipse::{synth_ellipse, KAPPA};
pub use fit::{fit_beziers, DEFAULT_MAX_ERROR, MAX_NEWTON_ROUNDS};
pub use polyline::Polyline;
pub use project::{project_motion, DEFAULT_PLANE_DEPTH};
pub use skeleton::{skeleton_to_polyline, skeleton_to_polyline_with, DEFAULT_SPUR_LENGTH};
pub use smooth::{smooth_polyline, DEFAULT_ITERATIONS, DEFAULT_LAMBDA, DEFAULT_MU};
pub use split::{split_path_by_mask, Layer, SplitPath, SplitPiece, COARSE_SAMPLES, CROSSING_TOLERANCE};
pub use thin::thin_mask;
pub use width::{measure_width, DistanceField, WidthProfile, MIN_HALF_WIDTH};

use crate::scene::Mask;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum PathError {
    #[error("mask has no foreground pixels")]
    EmptyMask,
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("degenerate geometry: {0}")]
    Degenerate(String),
    #[error("centerline vertex {index} at ({x:.3}, {y:.3}) is outside the mask")]
    VertexOutsideMask { index: usize, x: f64, y: f64 },
    #[error("transform is singular (det = {0:e})")]
    SingularTransform(f64),
    #[error("control point {index} at ({x:.3}, {y:.3}) maps behind the eye")]
    BehindEye { index: usize, x: f64, y: f64 },
    #[error("sample position {0} outside [0, 1]")]
    OutOfRange(f64),
}

/// Knobs for [`synthesize_mask_path_with`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SynthesisParams {
    pub lambda: f64,
    pub mu: f64,
    pub smoothing_iterations: usize,
    pub max_error: f64,
    pub spur_length: usize,
}

impl Default for SynthesisParams {
    fn default() -> Self {
        SynthesisParams {
            lambda: DEFAULT_LAMBDA,
            mu: DEFAULT_MU,
            smoothing_iterations: DEFAULT_ITERATIONS,
            max_error: DEFAULT_MAX_ERROR,
            spur_length: DEFAULT_SPUR_LENGTH,
        }
    }
}

/// Everything the mask-to-path chain produces, for callers that want the intermediates.
#[derive(Clone, Debug)]
pub struct MaskPath {
    pub skeleton: Mask,
    pub centerline: Polyline,
    pub smoothed: Polyline,
    pub path: BezierPath,
    pub widths: WidthProfile,
}

/// Thin, order, smooth and fit a mask's centerline.
///
/// Widths are measured at the smoothed vertices; a vertex that smoothing
/// pushed off the foreground is measured at its unsmoothed skeleton pixel.
pub fn synthesize_mask_path_with(mask: &Mask, params: &SynthesisParams) -> Result<MaskPath, PathError> {
    let skeleton = thin_mask(mask)?;
    let centerline = skeleton_to_polyline_with(&skeleton, params.spur_length)?;
    let smoothed = smooth_polyline(&centerline, params.lambda, params.mu, params.smoothing_iterations)?;
    let path = fit_beziers(&smoothed, params.max_error)?;
    let field = DistanceField::of_background(mask);
    let half_widths = smoothed
        .points
        .iter()
        .zip(&centerline.points)
        .map(|(&s, &c)| {
            let p = if mask.contains_point(s) { s } else { c };
            let (x, y) = p.to_pixel().expect("skeleton pixels are on the canvas");
            field.half_width(x, y)
        })
        .collect();
    Ok(MaskPath {
        skeleton,
        centerline,
        smoothed,
        path,
        widths: WidthProfile { half_widths },
    })
}

/// Convenience entry point: default smoothing pair, given iterations and fit tolerance.
pub fn synthesize_mask_path(mask: &Mask, smoothing_iterations: usize, max_error: f64) -> Result<(BezierPath, WidthProfile), PathError> {
    let params = SynthesisParams {
        smoothing_iterations,
        max_error,
        ..SynthesisParams::default()
    };
    let out = synthesize_mask_path_with(mask, &params)?;
    Ok((out.path, out.widths))
}
