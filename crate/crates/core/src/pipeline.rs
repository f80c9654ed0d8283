//! The four stages wired together, shared by the command line and serve mode
//! so both produce identical bytes for identical inputs.

use crate::assembly::{assemble, directional_path, export_animation_json, export_svg, resolve_object, AnimationDocument, Geometry};
use crate::geom::Point;
use crate::grounding::{disambiguate, ground_entity, CandidateSet, SegmenterConfig, DEFAULT_TOLERANCE};
use crate::intent::{parse_prompt_with, AnimationIntent, IntentParseTrace, Mode, RemoteBackendConfig};
use crate::pathsynth::{split_path_by_mask, synth_ellipse, synthesize_mask_path_with, BezierPath, CubicSegment, SynthesisParams};
use crate::scene::{Mask, SceneDocument};
use std::fmt;
use thiserror::Error;

/// Orbit height as a fraction of its width.
pub const DEFAULT_ORBIT_RY_RATIO: f64 = 0.45;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Stage {
    Scene,
    Intent,
    Grounding,
    Pathsynth,
    Assembly,
    Output,
    Serve,
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Stage::Scene => "scene",
            Stage::Intent => "intent",
            Stage::Grounding => "grounding",
            Stage::Pathsynth => "pathsynth",
            Stage::Assembly => "assembly",
            Stage::Output => "output",
            Stage::Serve => "serve",
        })
    }
}

/// A failure tagged with the stage that produced it; displays as `[stage] message`.
#[derive(Debug, Error, Clone, PartialEq)]
#[error("[{stage}] {message}")]
pub struct StageError {
    pub stage: Stage,
    pub message: String,
}

impl StageError {
    pub fn new(stage: Stage, message: impl fmt::Display) -> Self {
        StageError {
            stage,
            message: message.to_string(),
        }
    }
}

fn at<E: fmt::Display>(stage: Stage) -> impl Fn(E) -> StageError {
    move |e| StageError::new(stage, e)
}

/// Tunables for one pipeline run, after flags, environment and scene defaults are merged.
#[derive(Clone, Debug, PartialEq)]
pub struct PipelineConfig {
    pub tolerance: u8,
    pub synthesis: SynthesisParams,
    /// Forces the duration regardless of the prompt.
    pub duration_override: Option<u32>,
    /// Used when the prompt states no duration.
    pub default_duration_ms: Option<u32>,
    /// Orbit width override; by default the subject-to-entity distance.
    pub orbit_rx: Option<f64>,
    pub orbit_ry_ratio: f64,
    /// Precomputed entity mask, bypassing segmentation.
    pub entity_mask: Option<Mask>,
    pub llm: Option<RemoteBackendConfig>,
    pub segmenter: Option<SegmenterConfig>,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            tolerance: DEFAULT_TOLERANCE,
            synthesis: SynthesisParams::default(),
            duration_override: None,
            default_duration_ms: None,
            orbit_rx: None,
            orbit_ry_ratio: DEFAULT_ORBIT_RY_RATIO,
            entity_mask: None,
            llm: None,
            segmenter: None,
        }
    }
}

/// Stage 1: prompt to intent, with duration overrides applied.
pub fn interpret(prompt: &str, scene: &SceneDocument, config: &PipelineConfig) -> Result<(AnimationIntent, IntentParseTrace), StageError> {
    let (mut intent, trace) = parse_prompt_with(prompt, scene, config.llm.as_ref()).map_err(at(Stage::Intent))?;
    let prompt_default = trace.matched_rules.iter().any(|r| r == "duration:default");
    if let Some(d) = config.duration_override {
        intent.duration_ms = d;
    } else if let (true, Some(d)) = (prompt_default, config.default_duration_ms) {
        intent.duration_ms = d;
    }
    intent.check().map_err(at(Stage::Intent))?;
    Ok((intent, trace))
}

/// Stage 2: candidate masks for the intent's entity; `None` when the mode needs no entity.
pub fn ground(scene: &SceneDocument, intent: &AnimationIntent, config: &PipelineConfig) -> Result<Option<CandidateSet>, StageError> {
    if !matches!(intent.mode, Mode::PathFollow | Mode::Orbit) {
        return Ok(None);
    }
    let entity = intent.entity.as_deref().unwrap_or_default();
    let set = match &config.entity_mask {
        Some(mask) => crate::grounding::candidates_from_masks(scene, entity, vec![mask.clone()], config.tolerance),
        None => ground_entity(scene, entity, config.tolerance, config.segmenter.as_ref()),
    }
    .map_err(at(Stage::Grounding))?;
    if set.is_empty() {
        let names: Vec<&str> = scene.objects.iter().map(|o| o.name.as_str()).collect();
        return Err(StageError::new(
            Stage::Grounding,
            format!("no scene object matches `{entity}` (objects: {})", names.join(", ")),
        ));
    }
    Ok(Some(set))
}

fn reversed(path: &BezierPath) -> BezierPath {
    let segments = path
        .segments
        .iter()
        .rev()
        .map(|s| CubicSegment::new(s.p3, s.c2, s.c1, s.p0))
        .collect();
    BezierPath::new(segments, path.closed).expect("reversal keeps continuity")
}

/// Stages 3 and 4: geometry for the intent's mode, then the assembled document.
pub fn synthesize(
    scene: &SceneDocument,
    intent: &AnimationIntent,
    candidates: Option<&CandidateSet>,
    config: &PipelineConfig,
) -> Result<(Geometry, AnimationDocument), StageError> {
    let subject = resolve_object(scene, &intent.subject).map_err(at(Stage::Grounding))?;
    let resolved = || {
        candidates
            .and_then(CandidateSet::resolved_candidate)
            .ok_or_else(|| StageError::new(Stage::Grounding, "entity is ambiguous and no click was given"))
    };
    let geometry = match intent.mode {
        Mode::PathFollow => {
            let mask = &resolved()?.mask;
            let out = synthesize_mask_path_with(mask, &config.synthesis).map_err(at(Stage::Pathsynth))?;
            // travel away from the end nearest the subject
            let path = if out.path.end().distance(subject.anchor) < out.path.start().distance(subject.anchor) {
                reversed(&out.path)
            } else {
                out.path
            };
            Geometry::Path(path)
        }
        Mode::Orbit => {
            let candidate = resolved()?;
            let occluder = match &candidate.object_id {
                Some(id) => scene.object(id),
                None => None,
            };
            let occluder = match occluder {
                Some(o) => o,
                None => resolve_object(scene, intent.entity.as_deref().unwrap_or_default()).map_err(at(Stage::Grounding))?,
            };
            let center = occluder.anchor;
            let rx = config.orbit_rx.unwrap_or_else(|| subject.anchor.distance(center));
            let path = synth_ellipse(center, rx, config.orbit_ry_ratio * rx, 0.0).map_err(at(Stage::Pathsynth))?;
            let split = split_path_by_mask(&path, &candidate.mask).map_err(at(Stage::Pathsynth))?;
            Geometry::Orbit {
                path,
                split,
                occluder_id: occluder.id.clone(),
            }
        }
        Mode::Directional => {
            let direction = intent.direction.expect("validated intents carry a direction");
            let path = directional_path(subject, direction, scene.canvas_width, scene.canvas_height).map_err(at(Stage::Pathsynth))?;
            Geometry::Directional(path)
        }
        Mode::InPlace => Geometry::InPlace,
    };
    let doc = assemble(intent, scene, &geometry).map_err(at(Stage::Assembly))?;
    Ok((geometry, doc))
}

/// Everything a completed run produced.
#[derive(Clone, Debug)]
pub struct RunResult {
    pub intent: AnimationIntent,
    pub trace: IntentParseTrace,
    pub candidates: Option<CandidateSet>,
    pub geometry: Geometry,
    pub document: AnimationDocument,
}

impl RunResult {
    pub fn json(&self) -> String {
        export_animation_json(&self.document)
    }

    pub fn svg(&self, scene: &SceneDocument) -> String {
        export_svg(&self.document, scene)
    }

    /// Warnings from every stage, in order.
    pub fn warnings(&self) -> Vec<String> {
        let mut w = self.trace.warnings.clone();
        if let Some(c) = &self.candidates {
            w.extend(c.warnings.iter().cloned());
        }
        w
    }
}

#[derive(Clone, Debug)]
pub enum Outcome {
    Done(Box<RunResult>),
    /// Several candidates fit the entity and no click picked one.
    NeedsClick {
        intent: AnimationIntent,
        trace: IntentParseTrace,
        candidates: CandidateSet,
    },
}

/// Run every stage; a click, when given, resolves (or overrides) the entity's candidate.
pub fn run_pipeline(scene: &SceneDocument, prompt: &str, click: Option<Point>, config: &PipelineConfig) -> Result<Outcome, StageError> {
    let (intent, trace) = interpret(prompt, scene, config)?;
    let mut candidates = ground(scene, &intent, config)?;
    if let (Some(set), Some(p)) = (&candidates, click) {
        candidates = Some(disambiguate(set, p).map_err(at(Stage::Grounding))?);
    }
    if let Some(set) = &candidates {
        if set.needs_click() {
            return Ok(Outcome::NeedsClick {
                intent,
                trace,
                candidates: set.clone(),
            });
        }
    }
    let (geometry, document) = synthesize(scene, &intent, candidates.as_ref(), config)?;
    Ok(Outcome::Done(Box::new(RunResult {
        intent,
        trace,
        candidates,
        geometry,
        document,
    })))
}
