//! Turning an intent plus synthesized geometry into a keyframed animation
//! document, and exporting that document as canonical JSON or animated SVG.
//!
//! Position tracks are baked at 60 keyframes per second: each keyframe sits
//! on the motion path at the eased arc-length fraction of its time. The
//! easing curve is still recorded on the track for engines that interpolate
//! symbolically.
//!
//! In-place presets map to property tracks:
//!
//! | preset   | track     | keyframes (time fraction → value)                  | easing        |
//! |----------|-----------|----------------------------------------------------|---------------|
//! | appear   | opacity   | 0 → 0, 0.1 → 1, 1 → 1                               | linear        |
//! | fade_in  | opacity   | 0 → 0, 1 → 1                                        | ease_in_out   |
//! | fade_out | opacity   | 0 → 1, 1 → 0                                        | ease_in_out   |
//! | grow     | scale     | 0 → 0.5, 1 → 1                                      | ease_in_out   |
//! | shrink   | scale     | 0 → 1, 1 → 0.5                                      | ease_in_out   |
//! | pulse    | scale     | 0 → 1, 0.5 → 1.15, 1 → 1                            | ease_in_out   |
//! | pop      | scale     | 0 → 0, 0.7 → 1.2, 1 → 1                             | ease_in_out   |
//! | rotate   | rotation  | 0 → 0°, 1 → 360°                                    | ease_in_out   |
//! | spin     | rotation  | 0 → 0°, 1 → 720°                                    | linear        |
//! | dance    | rotation  | ±15° at quarters, back to 0                         | linear        |
//! | wave     | rotation  | ±10° at fifths, back to 0                           | linear        |
//! | bounce   | position  | from half a body height above the anchor            | bounce        |
//! | drop     | position  | from a full body height above the anchor            | custom ease-in|
//! | rise     | position  | from a full body height below the anchor            | custom ease-out|
//! | float    | position  | up 10 px and back                                   | ease_in_out   |
//! | shake    | position  | ±6 px horizontal zig-zag                            | linear        |
//!
//! `gallop`, `custom_path`, `orbit`, `fly_in`, `slide` and `swoosh` need a
//! path or an entry side and have no in-place form.

mod easing;
mod json;
mod svg;

pub use easing::{gallop_offset, EasingCurve, EASE_IN_OUT};
pub use json::{export_animation_json, parse_animation_json};
pub use svg::export_svg;

use crate::geom::Point;
use crate::intent::{AnimationIntent, Direction, Mode, Preset};
use crate::pathsynth::{project_motion, ArcLengthTable, BezierPath, CubicSegment, Layer, PathError, SplitPath, DEFAULT_PLANE_DEPTH};
use crate::scene::{find_objects_by_name, SceneDocument, SceneObject};
use thiserror::Error;

/// Baking rate of position tracks.
pub const KEYFRAMES_PER_SECOND: u32 = 60;
/// Path length covered by one gallop hop.
pub const GALLOP_PX_PER_HOP: f64 = 120.0;
pub const GALLOP_MIN_HOPS: u32 = 3;
/// Hop height as a fraction of the subject's height.
pub const GALLOP_HEIGHT_RATIO: f64 = 0.15;

const FLOAT_PX: f64 = 10.0;
const SHAKE_PX: f64 = 6.0;
const EASE_IN: [f64; 4] = [0.42, 0.0, 1.0, 1.0];
const EASE_OUT: [f64; 4] = [0.0, 0.0, 0.58, 1.0];

#[derive(Debug, Error, PartialEq)]
pub enum AssemblyError {
    #[error("mode {mode} cannot use {geometry} geometry")]
    GeometryMismatch { mode: Mode, geometry: &'static str },
    #[error("no scene object matches `{0}`")]
    UnknownObject(String),
    #[error("preset {0} has no in-place form")]
    NotInPlace(Preset),
    #[error("occlusion crossings collide at {time_ms} ms; lengthen the animation")]
    CrossingCollision { time_ms: u32 },
    #[error("invalid animation document: {0}")]
    Invalid(String),
    #[error("malformed animation JSON at `{path}`: {message}")]
    Json { path: String, message: String },
    #[error(transparent)]
    Path(#[from] PathError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Property {
    Position,
    Opacity,
    Scale,
    Rotation,
    ZOrder,
    Visibility,
}

impl Property {
    pub const ALL: [Property; 6] = [
        Property::Position,
        Property::Opacity,
        Property::Scale,
        Property::Rotation,
        Property::ZOrder,
        Property::Visibility,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Property::Position => "position",
            Property::Opacity => "opacity",
            Property::Scale => "scale",
            Property::Rotation => "rotation",
            Property::ZOrder => "z_order",
            Property::Visibility => "visibility",
        }
    }

    /// Step-interpolated properties hold each value until the next keyframe.
    pub fn is_step(self) -> bool {
        matches!(self, Property::ZOrder | Property::Visibility)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum KeyValue {
    Point(Point),
    Number(f64),
    Step(i64),
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Keyframe {
    pub time_ms: u32,
    pub value: KeyValue,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Track {
    pub object_id: String,
    pub property: Property,
    pub keyframes: Vec<Keyframe>,
    pub easing: EasingCurve,
    /// Source path of a position track.
    pub motion_path: Option<BezierPath>,
}

impl Track {
    /// Value in effect at `time_ms` for step tracks.
    pub fn step_value_at(&self, time_ms: u32) -> Option<i64> {
        self.keyframes
            .iter()
            .take_while(|k| k.time_ms <= time_ms)
            .last()
            .and_then(|k| match k.value {
                KeyValue::Step(v) => Some(v),
                _ => None,
            })
    }
}

/// A keyframed timeline over scene objects.
#[derive(Clone, Debug, PartialEq)]
pub struct AnimationDocument {
    pub scene_ref: String,
    pub duration_ms: u32,
    pub tracks: Vec<Track>,
    pub looping: bool,
}

impl AnimationDocument {
    pub fn check(&self) -> Result<(), AssemblyError> {
        let bad = |m: String| Err(AssemblyError::Invalid(m));
        if self.duration_ms == 0 {
            return bad("duration_ms must be positive".into());
        }
        if self.tracks.is_empty() {
            return bad("a document needs at least one track".into());
        }
        for (i, t) in self.tracks.iter().enumerate() {
            if t.keyframes.is_empty() {
                return bad(format!("track {i} has no keyframes"));
            }
            if !t.easing.is_valid() {
                return bad(format!("track {i} has invalid easing parameters"));
            }
            if t.keyframes.windows(2).any(|w| w[0].time_ms >= w[1].time_ms) {
                return bad(format!("track {i} keyframe times are not strictly increasing"));
            }
            if t.keyframes.last().is_some_and(|k| k.time_ms > self.duration_ms) {
                return bad(format!("track {i} has a keyframe after the end"));
            }
            let kinds_ok = t.keyframes.iter().all(|k| match (t.property, k.value) {
                (Property::Position, KeyValue::Point(_)) => true,
                (p, KeyValue::Step(_)) => p.is_step(),
                (p, KeyValue::Number(_)) => !p.is_step() && p != Property::Position,
                _ => false,
            });
            if !kinds_ok {
                return bad(format!("track {i} has values of the wrong kind for {}", t.property.name()));
            }
            if t.motion_path.is_some() && t.property != Property::Position {
                return bad(format!("track {i}: only position tracks carry a motion path"));
            }
        }
        Ok(())
    }
}

/// Geometry produced by path synthesis, one variant per intent mode.
#[derive(Clone, Debug, PartialEq)]
pub enum Geometry {
    /// Fitted path for path_follow.
    Path(BezierPath),
    /// Closed orbit, its occlusion split and the occluding object's id.
    Orbit { path: BezierPath, split: SplitPath, occluder_id: String },
    /// Entry path, already in the subject's projected plane.
    Directional(BezierPath),
    InPlace,
}

impl Geometry {
    fn name(&self) -> &'static str {
        match self {
            Geometry::Path(_) => "path",
            Geometry::Orbit { .. } => "orbit",
            Geometry::Directional(_) => "directional",
            Geometry::InPlace => "in-place",
        }
    }
}

/// Best-scoring scene object for a name query.
pub fn resolve_object<'a>(scene: &'a SceneDocument, query: &str) -> Result<&'a SceneObject, AssemblyError> {
    find_objects_by_name(scene, query)
        .ok()
        .and_then(|hits| hits.first().map(|h| h.object))
        .ok_or_else(|| AssemblyError::UnknownObject(query.to_string()))
}

/// Keyframe times at 60 per second, first at 0 and last at `duration_ms`.
pub fn keyframe_times(duration_ms: u32) -> Vec<u32> {
    let d = u64::from(duration_ms);
    let n = ((d * u64::from(KEYFRAMES_PER_SECOND) + 500) / 1000).max(1);
    (0..=n).map(|i| ((2 * i * d + n) / (2 * n)) as u32).collect()
}

/// Position track along `path`, keyframes at the eased arc-length fraction of each time.
pub fn position_track(object_id: &str, path: &BezierPath, easing: EasingCurve, duration_ms: u32) -> Track {
    let table = ArcLengthTable::new(path);
    let keyframes = keyframe_times(duration_ms)
        .into_iter()
        .map(|t| Keyframe {
            time_ms: t,
            value: KeyValue::Point(table.point_at(easing.apply(f64::from(t) / f64::from(duration_ms)))),
        })
        .collect();
    Track {
        object_id: object_id.to_string(),
        property: Property::Position,
        keyframes,
        easing,
        motion_path: Some(path.clone()),
    }
}

/// Gallop parameters for a subject travelling `path`.
pub fn gallop_easing(path: &BezierPath, subject: &SceneObject) -> EasingCurve {
    let hops = (path.length() / GALLOP_PX_PER_HOP).round() as u32;
    EasingCurve::Gallop {
        hop_count: hops.max(GALLOP_MIN_HOPS),
        hop_height: GALLOP_HEIGHT_RATIO * subject.bounds.height,
    }
}

/// Entry path from off-canvas to the subject's anchor, in the subject's projected plane.
///
/// In the object's own plane the start sits outside the canvas by the
/// subject's extent on the named side. After projection, the direction of
/// travel is kept and the start is pushed out along it until it leaves the
/// canvas grown by the subject's extent, so it is always off-canvas.
pub fn directional_path(subject: &SceneObject, direction: Direction, canvas_w: usize, canvas_h: usize) -> Result<BezierPath, PathError> {
    let a = subject.anchor;
    let (w, h) = (subject.bounds.width, subject.bounds.height);
    let (cw, ch) = (canvas_w as f64, canvas_h as f64);
    let start = match direction {
        Direction::Left => Point::new(-w, a.y),
        Direction::Right => Point::new(cw + w, a.y),
        Direction::Top => Point::new(a.x, -h),
        Direction::Bottom => Point::new(a.x, ch + h),
    };
    let local = BezierPath::new(vec![CubicSegment::line(start, a)], false)?;
    let projected = project_motion(&local, &subject.transform, DEFAULT_PLANE_DEPTH)?;
    if subject.transform.is_identity() {
        return Ok(projected);
    }
    let end = projected.end();
    let dir = (projected.start() - end)
        .normalized()
        .ok_or_else(|| PathError::Degenerate("entry direction collapses under the transform".into()))?;
    let exit = |p: f64, d: f64, lo: f64, hi: f64| {
        if d > 0.0 {
            (hi - p) / d
        } else if d < 0.0 {
            (lo - p) / d
        } else {
            f64::INFINITY
        }
    };
    let s = exit(end.x, dir.x, -w, cw + w).min(exit(end.y, dir.y, -h, ch + h));
    let start = if s.is_finite() && s > 0.0 { end + dir * s } else { projected.start() };
    BezierPath::new(vec![CubicSegment::line(start, end)], false)
}

fn scalar_track(object_id: &str, property: Property, keys: &[(f64, f64)], easing: EasingCurve, duration_ms: u32) -> Track {
    let keyframes = keys
        .iter()
        .map(|&(f, v)| Keyframe {
            time_ms: (f * f64::from(duration_ms)).round() as u32,
            value: KeyValue::Number(v),
        })
        .collect();
    Track {
        object_id: object_id.to_string(),
        property,
        keyframes,
        easing,
        motion_path: None,
    }
}

fn polyline_path(points: &[Point]) -> BezierPath {
    let segments = points.windows(2).map(|w| CubicSegment::line(w[0], w[1])).collect();
    BezierPath::new(segments, false).expect("consecutive line segments share endpoints")
}

fn in_place_track(preset: Preset, subject: &SceneObject, d: u32) -> Result<Track, AssemblyError> {
    use Property::*;
    let id = subject.id.as_str();
    let a = subject.anchor;
    let h = subject.bounds.height;
    let ease = EasingCurve::EaseInOut;
    let lin = EasingCurve::Linear;
    Ok(match preset {
        Preset::Appear => scalar_track(id, Opacity, &[(0.0, 0.0), (0.1, 1.0), (1.0, 1.0)], lin, d),
        Preset::FadeIn => scalar_track(id, Opacity, &[(0.0, 0.0), (1.0, 1.0)], ease, d),
        Preset::FadeOut => scalar_track(id, Opacity, &[(0.0, 1.0), (1.0, 0.0)], ease, d),
        Preset::Grow => scalar_track(id, Scale, &[(0.0, 0.5), (1.0, 1.0)], ease, d),
        Preset::Shrink => scalar_track(id, Scale, &[(0.0, 1.0), (1.0, 0.5)], ease, d),
        Preset::Pulse => scalar_track(id, Scale, &[(0.0, 1.0), (0.5, 1.15), (1.0, 1.0)], ease, d),
        Preset::Pop => scalar_track(id, Scale, &[(0.0, 0.0), (0.7, 1.2), (1.0, 1.0)], ease, d),
        Preset::Rotate => scalar_track(id, Rotation, &[(0.0, 0.0), (1.0, 360.0)], ease, d),
        Preset::Spin => scalar_track(id, Rotation, &[(0.0, 0.0), (1.0, 720.0)], lin, d),
        Preset::Dance => scalar_track(id, Rotation, &[(0.0, 0.0), (0.25, 15.0), (0.5, -15.0), (0.75, 15.0), (1.0, 0.0)], lin, d),
        Preset::Wave => scalar_track(
            id,
            Rotation,
            &[(0.0, 0.0), (0.2, 10.0), (0.4, -10.0), (0.6, 10.0), (0.8, -10.0), (1.0, 0.0)],
            lin,
            d,
        ),
        Preset::Bounce => position_track(id, &polyline_path(&[a - Point::new(0.0, 0.5 * h), a]), EasingCurve::Bounce, d),
        Preset::Drop => position_track(id, &polyline_path(&[a - Point::new(0.0, h), a]), EasingCurve::Custom(EASE_IN), d),
        Preset::Rise => position_track(id, &polyline_path(&[a + Point::new(0.0, h), a]), EasingCurve::Custom(EASE_OUT), d),
        Preset::Float => position_track(id, &polyline_path(&[a, a - Point::new(0.0, FLOAT_PX), a]), ease, d),
        Preset::Shake => {
            let dx = Point::new(SHAKE_PX, 0.0);
            position_track(id, &polyline_path(&[a, a + dx, a - dx, a + dx, a - dx, a]), lin, d)
        }
        Preset::Gallop | Preset::CustomPath | Preset::Orbit | Preset::FlyIn | Preset::Slide | Preset::Swoosh => {
            return Err(AssemblyError::NotInPlace(preset))
        }
    })
}

fn path_follow_easing(preset: Preset, path: &BezierPath, subject: &SceneObject) -> EasingCurve {
    match preset {
        Preset::Gallop => gallop_easing(path, subject),
        Preset::Bounce => EasingCurve::Bounce,
        _ => EasingCurve::Linear,
    }
}

/// z-order and visibility step tracks switching at each crossing of `split`.
fn occlusion_tracks(subject_id: &str, occluder_z: i64, split: &SplitPath, d: u32) -> Result<[Track; 2], AssemblyError> {
    let mut z = Vec::with_capacity(split.pieces.len());
    let mut vis = Vec::with_capacity(split.pieces.len());
    for (k, piece) in split.pieces.iter().enumerate() {
        let time_ms = if k == 0 { 0 } else { (piece.t_range.0 * f64::from(d)).round() as u32 };
        if z.last().is_some_and(|prev: &Keyframe| prev.time_ms >= time_ms) {
            return Err(AssemblyError::CrossingCollision { time_ms });
        }
        let front = piece.layer == Layer::Front;
        z.push(Keyframe {
            time_ms,
            value: KeyValue::Step(if front { occluder_z + 1 } else { occluder_z - 1 }),
        });
        vis.push(Keyframe {
            time_ms,
            value: KeyValue::Step(i64::from(front)),
        });
    }
    let track = |property, keyframes| Track {
        object_id: subject_id.to_string(),
        property,
        keyframes,
        easing: EasingCurve::Linear,
        motion_path: None,
    };
    Ok([track(Property::ZOrder, z), track(Property::Visibility, vis)])
}

/// Build the animation document for `intent` from matching `geometry`.
pub fn assemble(intent: &AnimationIntent, scene: &SceneDocument, geometry: &Geometry) -> Result<AnimationDocument, AssemblyError> {
    let subject = resolve_object(scene, &intent.subject)?;
    let d = intent.duration_ms;
    let mismatch = || AssemblyError::GeometryMismatch {
        mode: intent.mode,
        geometry: geometry.name(),
    };
    let tracks = match (intent.mode, geometry) {
        (Mode::PathFollow, Geometry::Path(path)) => {
            vec![position_track(&subject.id, path, path_follow_easing(intent.preset, path, subject), d)]
        }
        (Mode::Orbit, Geometry::Orbit { path, split, occluder_id }) => {
            let occluder = scene
                .object(occluder_id)
                .ok_or_else(|| AssemblyError::UnknownObject(occluder_id.clone()))?;
            let [z, vis] = occlusion_tracks(&subject.id, occluder.z_order, split, d)?;
            vec![position_track(&subject.id, path, EasingCurve::Linear, d), z, vis]
        }
        (Mode::Directional, Geometry::Directional(path)) => {
            vec![position_track(&subject.id, path, EasingCurve::EaseInOut, d)]
        }
        (Mode::InPlace, Geometry::InPlace) => vec![in_place_track(intent.preset, subject, d)?],
        _ => return Err(mismatch()),
    };
    let doc = AnimationDocument {
        scene_ref: scene.id.clone(),
        duration_ms: d,
        tracks,
        looping: intent.looping,
    };
    doc.check()?;
    Ok(doc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::Rect;
    use crate::pathsynth::{sample_path, SplitPiece};
    use crate::scene::{Raster, TransformMatrix};

    fn scene() -> SceneDocument {
        let obj = |id: &str, z| SceneObject {
            id: id.into(),
            name: id.into(),
            bounds: Rect::new(10.0, 10.0, 20.0, 30.0),
            anchor: Point::new(20.0, 25.0),
            z_order: z,
            transform: TransformMatrix::identity(),
            tags: vec![],
        };
        SceneDocument::new(100, 80, vec![obj("ball", 1), obj("wall", 5)], Raster::filled_rgba(100, 80, [0; 4]), "a.png").unwrap()
    }

    fn intent(mode: Mode, preset: Preset) -> AnimationIntent {
        AnimationIntent {
            subject: "ball".into(),
            entity: Some("wall".into()),
            mode,
            preset,
            direction: Some(Direction::Left),
            duration_ms: 1000,
            looping: false,
        }
    }

    #[test]
    fn keyframe_times_are_sixty_per_second() {
        let t = keyframe_times(1000);
        assert_eq!(t.len(), 61);
        assert_eq!((t[0], t[1], t[60]), (0, 17, 1000));
        assert!(t.windows(2).all(|w| w[0] < w[1]));
        assert_eq!(keyframe_times(100).len(), 7);
    }

    #[test]
    fn path_follow_keyframes_on_path() {
        let path = polyline_path(&[Point::new(0.0, 0.0), Point::new(50.0, 10.0), Point::new(90.0, 60.0)]);
        let doc = assemble(&intent(Mode::PathFollow, Preset::CustomPath), &scene(), &Geometry::Path(path.clone())).unwrap();
        assert_eq!(doc.tracks.len(), 1);
        for k in &doc.tracks[0].keyframes {
            let KeyValue::Point(p) = k.value else { panic!() };
            let q = sample_path(&path, f64::from(k.time_ms) / 1000.0).unwrap();
            assert!(p.distance(q) < 1e-3);
        }
    }

    #[test]
    fn orbit_toggles_at_crossings() {
        let path = polyline_path(&[Point::new(0.0, 0.0), Point::new(40.0, 0.0)]);
        let piece = |a, b, layer| SplitPiece {
            path: path.clone(),
            layer,
            t_range: (a, b),
        };
        let split = SplitPath {
            pieces: vec![piece(0.0, 0.3, Layer::Front), piece(0.3, 0.6, Layer::Back), piece(0.6, 1.0, Layer::Front)],
        };
        let geometry = Geometry::Orbit {
            path,
            split,
            occluder_id: "wall".into(),
        };
        let doc = assemble(&intent(Mode::Orbit, Preset::Orbit), &scene(), &geometry).unwrap();
        let z = &doc.tracks[1];
        assert_eq!(z.property, Property::ZOrder);
        let times: Vec<_> = z.keyframes.iter().map(|k| k.time_ms).collect();
        assert_eq!(times, [0, 300, 600]);
        assert_eq!(z.step_value_at(450), Some(4));
        assert_eq!(z.step_value_at(700), Some(6));
        assert_eq!(doc.tracks[2].step_value_at(450), Some(0));
    }

    #[test]
    fn directional_start_for_identity() {
        let s = scene();
        let p = directional_path(&s.objects[0], Direction::Left, 100, 80).unwrap();
        assert_eq!(p.start(), Point::new(-20.0, 25.0));
        let p = directional_path(&s.objects[0], Direction::Bottom, 100, 80).unwrap();
        assert_eq!(p.start(), Point::new(20.0, 110.0));
    }

    #[test]
    fn rotated_entry_leaves_the_canvas() {
        let mut s = scene();
        s.objects[0].transform = TransformMatrix::rotation_z_about(std::f64::consts::FRAC_PI_4, s.objects[0].anchor);
        let p = directional_path(&s.objects[0], Direction::Left, 100, 80).unwrap();
        let st = p.start();
        assert!(st.x < 0.0 || st.y < 0.0);
        // on the anchor's rotated left ray
        let dir = (st - s.objects[0].anchor).normalized().unwrap();
        let expected = Point::new(-1.0, 0.0).rotate_about(Point::ZERO, std::f64::consts::FRAC_PI_4);
        assert!((dir - expected).length() < 1e-12);
    }

    #[test]
    fn mismatches_and_in_place_errors() {
        let s = scene();
        assert!(matches!(
            assemble(&intent(Mode::Orbit, Preset::Orbit), &s, &Geometry::InPlace),
            Err(AssemblyError::GeometryMismatch { .. })
        ));
        assert_eq!(
            assemble(&intent(Mode::InPlace, Preset::CustomPath), &s, &Geometry::InPlace),
            Err(AssemblyError::NotInPlace(Preset::CustomPath))
        );
        for p in Preset::ALL {
            let r = assemble(&intent(Mode::InPlace, p), &s, &Geometry::InPlace);
            assert_eq!(r.is_ok(), !matches!(p, Preset::Gallop | Preset::CustomPath | Preset::Orbit | Preset::FlyIn | Preset::Slide | Preset::Swoosh), "{p}");
        }
    }
}
