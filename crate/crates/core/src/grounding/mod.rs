//! Binding an entity name to pixels.
//!
//! The built-in segmenter is a colour-tolerance flood fill seeded at an
//! object's anchor; a real segmentation service can be plugged in over HTTP
//! and is always backed by the flood fill when it fails.

mod segment;

pub use segment::{segment_by_point, within_tolerance, DEFAULT_TOLERANCE};

use crate::geom::{Point, Rect};
use crate::remote::{env_var, post_json, REMOTE_TIMEOUT};
use crate::scene::{find_objects_by_name, name_score, Mask, Raster, RasterError, SceneDocument, SceneError};
use base64::Engine;
use serde::Deserialize;
use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::Duration;
use thiserror::Error;

/// Score margin by which the best candidate must beat the runner-up to be picked without a click.
pub const AUTO_RESOLVE_MARGIN: f64 = 0.3;

/// Score given to an external mask that contains no matching object's anchor.
pub const UNMATCHED_MASK_SCORE: f64 = 0.5;

#[derive(Debug, Error)]
pub enum GroundingError {
    #[error("artwork must be RGBA, got {0} channel(s)")]
    NotRgba(usize),
    #[error("seed ({x:.1}, {y:.1}) lies outside the canvas")]
    SeedOutOfBounds { x: f64, y: f64 },
    #[error("click ({x:.1}, {y:.1}) lies outside the canvas")]
    ClickOutOfBounds { x: f64, y: f64 },
    #[error("no candidates to choose from")]
    NoCandidates,
    #[error("mask {path}: {source}")]
    MaskDecode {
        path: PathBuf,
        #[source]
        source: RasterError,
    },
    #[error("mask {path} is {found_w}x{found_h} but canvas is {canvas_w}x{canvas_h}")]
    MaskSize {
        path: PathBuf,
        found_w: usize,
        found_h: usize,
        canvas_w: usize,
        canvas_h: usize,
    },
    #[error("mask {0} has no foreground pixels")]
    EmptyMask(PathBuf),
    #[error("reading {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("segmenter: {0}")]
    Segmenter(String),
    #[error(transparent)]
    Scene(#[from] SceneError),
}

/// One possible grounding of the entity.
#[derive(Clone, Debug, PartialEq)]
pub struct Candidate {
    /// Scene object the mask was seeded from or matched to, if any.
    pub object_id: Option<String>,
    pub mask: Mask,
    /// Match confidence in `[0, 1]`.
    pub score: f64,
    /// Pixel-edge bounding box of the mask.
    pub bounds: Rect,
}

impl Candidate {
    fn new(object_id: Option<String>, mask: Mask, score: f64) -> Option<Self> {
        let bounds = mask.bounds()?;
        Some(Candidate {
            object_id,
            mask,
            score,
            bounds,
        })
    }
}

/// Ranked candidates for one entity query, plus the chosen one if known.
#[derive(Clone, Debug)]
pub struct CandidateSet {
    /// Non-increasing score order.
    pub candidates: Vec<Candidate>,
    pub resolved: Option<usize>,
    /// Non-fatal issues met while grounding, e.g. a failed external segmenter.
    pub warnings: Vec<String>,
    artwork: Arc<Raster>,
    tolerance: u8,
}

impl CandidateSet {
    fn from_ranked(candidates: Vec<Candidate>, artwork: Arc<Raster>, tolerance: u8) -> Self {
        let resolved = match candidates.as_slice() {
            [_] => Some(0),
            [a, b, ..] if a.score - b.score >= AUTO_RESOLVE_MARGIN => Some(0),
            _ => None,
        };
        CandidateSet {
            candidates,
            resolved,
            warnings: Vec::new(),
            artwork,
            tolerance,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.candidates.is_empty()
    }

    pub fn len(&self) -> usize {
        self.candidates.len()
    }

    pub fn resolved_candidate(&self) -> Option<&Candidate> {
        self.resolved.map(|i| &self.candidates[i])
    }

    /// Whether a click is needed before synthesis can proceed.
    pub fn needs_click(&self) -> bool {
        !self.candidates.is_empty() && self.resolved.is_none()
    }

    pub fn tolerance(&self) -> u8 {
        self.tolerance
    }
}

/// One flood-filled candidate per scene object whose name matches `entity_query`.
pub fn propose_candidates(scene: &SceneDocument, entity_query: &str) -> Result<CandidateSet, GroundingError> {
    propose_candidates_with(scene, entity_query, DEFAULT_TOLERANCE)
}

pub fn propose_candidates_with(scene: &SceneDocument, entity_query: &str, tolerance: u8) -> Result<CandidateSet, GroundingError> {
    let mut candidates = Vec::new();
    for hit in find_objects_by_name(scene, entity_query)? {
        let mask = segment_by_point(&scene.artwork, hit.object.anchor, tolerance)?;
        candidates.extend(Candidate::new(Some(hit.object.id.clone()), mask, hit.score));
    }
    Ok(CandidateSet::from_ranked(candidates, scene.artwork.clone(), tolerance))
}

/// Resolve `set` with a user click and refine the chosen mask by re-segmenting from it.
///
/// The candidate containing the click wins; otherwise the one whose nearest
/// foreground pixel is closest. The refill is seeded at the click when it is
/// on the mask, else at that nearest pixel.
pub fn disambiguate(set: &CandidateSet, click: Point) -> Result<CandidateSet, GroundingError> {
    if set.candidates.is_empty() {
        return Err(GroundingError::NoCandidates);
    }
    let (w, h) = (set.artwork.width(), set.artwork.height());
    if !matches!(click.to_pixel(), Some((x, y)) if x < w && y < h) {
        return Err(GroundingError::ClickOutOfBounds { x: click.x, y: click.y });
    }
    let (index, seed) = match set.candidates.iter().position(|c| c.mask.contains_point(click)) {
        Some(i) => (i, click),
        None => set
            .candidates
            .iter()
            .enumerate()
            .filter_map(|(i, c)| c.mask.nearest_foreground(click).map(|(px, d)| (i, px, d)))
            .min_by(|a, b| a.2.total_cmp(&b.2).then(a.0.cmp(&b.0)))
            .map(|(i, (x, y), _)| (i, Point::pixel_center(x, y)))
            .ok_or(GroundingError::NoCandidates)?,
    };
    let mut out = set.clone();
    let refined = segment_by_point(&set.artwork, seed, set.tolerance)?;
    let chosen = &mut out.candidates[index];
    chosen.bounds = refined.bounds().expect("seed pixel is foreground");
    chosen.mask = refined;
    out.resolved = Some(index);
    Ok(out)
}

/// Read a mask PNG and check it against the scene canvas.
pub fn load_mask(path: impl AsRef<Path>, scene: &SceneDocument) -> Result<Mask, GroundingError> {
    let path = path.as_ref();
    let bytes = std::fs::read(path).map_err(|source| GroundingError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let mask = Mask::decode_png(&bytes).map_err(|source| GroundingError::MaskDecode {
        path: path.to_path_buf(),
        source,
    })?;
    if mask.width() != scene.canvas_width || mask.height() != scene.canvas_height {
        return Err(GroundingError::MaskSize {
            path: path.to_path_buf(),
            found_w: mask.width(),
            found_h: mask.height(),
            canvas_w: scene.canvas_width,
            canvas_h: scene.canvas_height,
        });
    }
    if mask.is_empty() {
        return Err(GroundingError::EmptyMask(path.to_path_buf()));
    }
    Ok(mask)
}

/// Where to reach an external segmentation service.
#[derive(Clone, Debug, PartialEq)]
pub struct SegmenterConfig {
    pub url: String,
    pub timeout: Duration,
}

impl SegmenterConfig {
    pub const ENV_URL: &'static str = "GENANIM_SEGMENTER_URL";

    pub fn new(url: impl Into<String>) -> Self {
        SegmenterConfig {
            url: url.into(),
            timeout: REMOTE_TIMEOUT,
        }
    }

    /// `None` when `GENANIM_SEGMENTER_URL` is unset or empty.
    pub fn from_env() -> Option<Self> {
        env_var(Self::ENV_URL).map(Self::new)
    }
}

#[derive(Deserialize)]
struct SegmenterResponse {
    masks: Vec<String>,
}

/// Masks returned by an external segmenter, plus warnings for masks it had to drop.
#[derive(Clone, Debug, Default)]
pub struct ExternalMasks {
    pub masks: Vec<Mask>,
    pub warnings: Vec<String>,
}

/// Ask an external service for masks of `entity_query`.
///
/// Request: `{"image": <base64 PNG>, "query": ..., "seed": [x, y]?}`.
/// Response: `{"masks": [<base64 PNG>, ...]}`. Masks that fail to decode, have
/// the wrong size or are empty are dropped with a warning.
pub fn query_external_segmenter(
    artwork: &Raster,
    entity_query: &str,
    seed: Option<Point>,
    config: &SegmenterConfig,
) -> Result<ExternalMasks, GroundingError> {
    let b64 = base64::engine::general_purpose::STANDARD;
    let png = artwork
        .encode_png()
        .map_err(|e| GroundingError::Segmenter(format!("encoding artwork: {e}")))?;
    let mut request = serde_json::json!({ "image": b64.encode(png), "query": entity_query });
    if let Some(p) = seed {
        request["seed"] = serde_json::json!([p.x, p.y]);
    }
    let text = post_json(&config.url, None, &request.to_string(), config.timeout).map_err(GroundingError::Segmenter)?;
    let response: SegmenterResponse =
        serde_json::from_str(&text).map_err(|e| GroundingError::Segmenter(format!("malformed response: {e}")))?;
    let mut out = ExternalMasks::default();
    for (i, encoded) in response.masks.iter().enumerate() {
        let decoded = b64
            .decode(encoded.trim())
            .map_err(|e| e.to_string())
            .and_then(|bytes| Mask::decode_png(&bytes).map_err(|e| e.to_string()));
        match decoded {
            Err(e) => out.warnings.push(format!("segmenter mask {i} dropped: {e}")),
            Ok(m) if m.width() != artwork.width() || m.height() != artwork.height() => out.warnings.push(format!(
                "segmenter mask {i} dropped: {}x{} does not match canvas {}x{}",
                m.width(),
                m.height(),
                artwork.width(),
                artwork.height()
            )),
            Ok(m) if m.is_empty() => out.warnings.push(format!("segmenter mask {i} dropped: no foreground")),
            Ok(m) => out.masks.push(m),
        }
    }
    Ok(out)
}

/// Rank externally produced masks against the scene.
///
/// Each mask is credited to the best name-matching object whose anchor it
/// covers; a mask covering none scores [`UNMATCHED_MASK_SCORE`].
pub fn candidates_from_masks(
    scene: &SceneDocument,
    entity_query: &str,
    masks: Vec<Mask>,
    tolerance: u8,
) -> Result<CandidateSet, GroundingError> {
    if entity_query.trim().is_empty() {
        return Err(SceneError::EmptyQuery.into());
    }
    let mut candidates: Vec<(usize, Candidate)> = masks
        .into_iter()
        .enumerate()
        .filter_map(|(i, mask)| {
            let best = scene
                .objects
                .iter()
                .filter(|o| mask.contains_point(o.anchor))
                .filter_map(|o| name_score(entity_query, &o.name).map(|s| (o, s)))
                .max_by(|a, b| a.1.total_cmp(&b.1).then_with(|| b.0.id.cmp(&a.0.id)));
            let (id, score) = match best {
                Some((o, s)) => (Some(o.id.clone()), s),
                None => (None, UNMATCHED_MASK_SCORE),
            };
            Candidate::new(id, mask, score).map(|c| (i, c))
        })
        .collect();
    candidates.sort_by(|a, b| b.1.score.total_cmp(&a.1.score).then(a.0.cmp(&b.0)));
    Ok(CandidateSet::from_ranked(
        candidates.into_iter().map(|(_, c)| c).collect(),
        scene.artwork.clone(),
        tolerance,
    ))
}

/// Ground `entity_query`, preferring the external segmenter when configured.
///
/// Any segmenter failure, or a response with no usable masks, falls back to
/// [`propose_candidates_with`] and records why in `warnings`.
pub fn ground_entity(
    scene: &SceneDocument,
    entity_query: &str,
    tolerance: u8,
    segmenter: Option<&SegmenterConfig>,
) -> Result<CandidateSet, GroundingError> {
    let mut warnings = Vec::new();
    if let Some(config) = segmenter {
        match query_external_segmenter(&scene.artwork, entity_query, None, config) {
            Ok(ext) if !ext.masks.is_empty() => {
                let mut set = candidates_from_masks(scene, entity_query, ext.masks, tolerance)?;
                set.warnings = ext.warnings;
                return Ok(set);
            }
            Ok(ext) => {
                warnings.extend(ext.warnings);
                warnings.push("segmenter returned no usable masks; using built-in segmenter".into());
            }
            Err(e) => warnings.push(format!("{e}; using built-in segmenter")),
        }
    }
    let mut set = propose_candidates_with(scene, entity_query, tolerance)?;
    set.warnings = warnings;
    Ok(set)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scene::{SceneObject, TransformMatrix};

    fn two_boxes() -> SceneDocument {
        let mut art = Raster::filled_rgba(20, 10, [0, 0, 0, 255]);
        for y in 2..8 {
            for x in 2..6 {
                art.set_pixel(x, y, &[200, 0, 0, 255]);
            }
            for x in 12..18 {
                art.set_pixel(x, y, &[0, 200, 0, 255]);
            }
        }
        let obj = |id: &str, name: &str, x: f64, z| SceneObject {
            id: id.into(),
            name: name.into(),
            bounds: Rect::new(x, 2.0, 4.0, 6.0),
            anchor: Point::new(x + 1.5, 4.5),
            z_order: z,
            transform: TransformMatrix::identity(),
            tags: vec![],
        };
        SceneDocument::new(20, 10, vec![obj("l", "left box", 2.0, 1), obj("r", "right box", 12.0, 2)], art, "a.png").unwrap()
    }

    #[test]
    fn equal_scores_stay_unresolved() {
        let set = propose_candidates(&two_boxes(), "box").unwrap();
        assert_eq!(set.len(), 2);
        assert_eq!(set.resolved, None);
        assert_eq!(set.candidates[0].mask.count(), 24);
    }

    #[test]
    fn exact_name_auto_resolves() {
        let set = propose_candidates(&two_boxes(), "left box").unwrap();
        assert_eq!(set.resolved, Some(0));
        assert_eq!(set.candidates[0].object_id.as_deref(), Some("l"));
        assert!(propose_candidates(&two_boxes(), "zebra").unwrap().is_empty());
    }

    #[test]
    fn click_picks_and_refines() {
        let set = propose_candidates(&two_boxes(), "box").unwrap();
        let right = set.candidates.iter().position(|c| c.object_id.as_deref() == Some("r")).unwrap();
        let chosen = disambiguate(&set, Point::new(15.0, 5.0)).unwrap();
        assert_eq!(chosen.resolved, Some(right));
        // background click nearer the left box
        let chosen = disambiguate(&set, Point::new(7.5, 5.0)).unwrap();
        assert_eq!(chosen.resolved_candidate().unwrap().object_id.as_deref(), Some("l"));
        assert!(matches!(disambiguate(&set, Point::new(25.0, 5.0)), Err(GroundingError::ClickOutOfBounds { .. })));
    }

    #[test]
    fn external_masks_scored_by_anchor() {
        let scene = two_boxes();
        let right = Mask::from_fn(20, 10, |x, _| x >= 10);
        let nothing = Mask::from_fn(20, 10, |x, y| x == 0 && y == 0);
        let set = candidates_from_masks(&scene, "right box", vec![nothing, right], 24).unwrap();
        assert_eq!(set.candidates[0].object_id.as_deref(), Some("r"));
        assert_eq!(set.candidates[0].score, 1.0);
        assert_eq!(set.candidates[1].score, UNMATCHED_MASK_SCORE);
        assert_eq!(set.resolved, Some(0));
    }

    #[test]
    fn unreachable_segmenter_falls_back() {
        let config = SegmenterConfig {
            url: "http://127.0.0.1:9/segment".into(),
            timeout: Duration::from_millis(500),
        };
        let set = ground_entity(&two_boxes(), "left box", DEFAULT_TOLERANCE, Some(&config)).unwrap();
        assert_eq!(set.resolved, Some(0));
        assert_eq!(set.warnings.len(), 1);
    }
}
