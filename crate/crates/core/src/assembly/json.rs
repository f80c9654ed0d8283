//! Canonical animation JSON: sorted keys, no insignificant whitespace,
//! real numbers fixed at three decimals, times and step values as integers.

use super::{AnimationDocument, AssemblyError, EasingCurve, KeyValue, Keyframe, Property, Track, EASE_IN_OUT};
use crate::geom::Point;
use crate::pathsynth::{BezierPath, CubicSegment};
use serde_json::Value;
use std::collections::BTreeMap;
use std::fmt::Write;

enum J {
    Obj(BTreeMap<&'static str, J>),
    Arr(Vec<J>),
    Str(String),
    Int(i64),
    Num(f64),
    Bool(bool),
}

pub(crate) fn fixed3(v: f64) -> String {
    let s = format!("{v:.3}");
    if s == "-0.000" {
        "0.000".into()
    } else {
        s
    }
}

fn write(j: &J, out: &mut String) {
    match j {
        J::Obj(m) => {
            out.push('{');
            for (i, (k, v)) in m.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                write!(out, "\"{k}\":").unwrap();
                write(v, out);
            }
            out.push('}');
        }
        J::Arr(items) => {
            out.push('[');
            for (i, v) in items.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                write(v, out);
            }
            out.push(']');
        }
        J::Str(s) => out.push_str(&serde_json::to_string(s).expect("strings serialize")),
        J::Int(n) => write!(out, "{n}").unwrap(),
        J::Num(x) => out.push_str(&fixed3(*x)),
        J::Bool(b) => write!(out, "{b}").unwrap(),
    }
}

fn point(p: Point) -> J {
    J::Arr(vec![J::Num(p.x), J::Num(p.y)])
}

fn easing(e: &EasingCurve) -> J {
    let mut m = BTreeMap::from([("kind", J::Str(e.kind().into()))]);
    match *e {
        EasingCurve::EaseInOut => {
            m.insert("params", J::Arr(EASE_IN_OUT.iter().map(|&v| J::Num(v)).collect()));
        }
        EasingCurve::Custom(p) => {
            m.insert("params", J::Arr(p.iter().map(|&v| J::Num(v)).collect()));
        }
        EasingCurve::Gallop { hop_count, hop_height } => {
            m.insert("hop_count", J::Int(i64::from(hop_count)));
            m.insert("hop_height", J::Num(hop_height));
        }
        EasingCurve::Linear | EasingCurve::Bounce => {}
    }
    J::Obj(m)
}

fn motion_path(p: &BezierPath) -> J {
    let segments = p
        .segments
        .iter()
        .map(|s| J::Arr(vec![point(s.p0), point(s.c1), point(s.c2), point(s.p3)]))
        .collect();
    J::Obj(BTreeMap::from([("closed", J::Bool(p.closed)), ("segments", J::Arr(segments))]))
}

fn track(t: &Track) -> J {
    let keyframes = t
        .keyframes
        .iter()
        .map(|k| {
            let v = match k.value {
                KeyValue::Point(p) => point(p),
                KeyValue::Number(x) => J::Num(x),
                KeyValue::Step(n) => J::Int(n),
            };
            J::Arr(vec![J::Int(i64::from(k.time_ms)), v])
        })
        .collect();
    let mut m = BTreeMap::from([
        ("easing", easing(&t.easing)),
        ("keyframes", J::Arr(keyframes)),
        ("object_id", J::Str(t.object_id.clone())),
        ("property", J::Str(t.property.name().into())),
    ]);
    if let Some(p) = &t.motion_path {
        m.insert("motion_path", motion_path(p));
    }
    J::Obj(m)
}

/// Canonical JSON text of `doc`, newline-terminated.
pub fn export_animation_json(doc: &AnimationDocument) -> String {
    let root = J::Obj(BTreeMap::from([
        ("duration_ms", J::Int(i64::from(doc.duration_ms))),
        ("loop", J::Bool(doc.looping)),
        ("scene_ref", J::Str(doc.scene_ref.clone())),
        ("tracks", J::Arr(doc.tracks.iter().map(track).collect())),
    ]));
    let mut out = String::new();
    write(&root, &mut out);
    out.push('\n');
    out
}

fn err(path: impl Into<String>, message: impl Into<String>) -> AssemblyError {
    AssemblyError::Json {
        path: path.into(),
        message: message.into(),
    }
}

fn field<'a>(v: &'a Value, key: &str, path: &str) -> Result<&'a Value, AssemblyError> {
    v.get(key).ok_or_else(|| err(format!("{path}.{key}"), "missing field"))
}

fn num(v: &Value, path: &str) -> Result<f64, AssemblyError> {
    v.as_f64().ok_or_else(|| err(path, "expected a number"))
}

fn int(v: &Value, path: &str) -> Result<i64, AssemblyError> {
    v.as_i64().ok_or_else(|| err(path, "expected an integer"))
}

fn array<'a>(v: &'a Value, path: &str) -> Result<&'a Vec<Value>, AssemblyError> {
    v.as_array().ok_or_else(|| err(path, "expected an array"))
}

fn parse_point(v: &Value, path: &str) -> Result<Point, AssemblyError> {
    match array(v, path)?.as_slice() {
        [x, y] => Ok(Point::new(num(x, path)?, num(y, path)?)),
        _ => Err(err(path, "expected [x, y]")),
    }
}

fn parse_params(v: &Value, path: &str) -> Result<[f64; 4], AssemblyError> {
    let items = array(v, path)?;
    if items.len() != 4 {
        return Err(err(path, "expected 4 numbers"));
    }
    let mut out = [0.0; 4];
    for (o, item) in out.iter_mut().zip(items) {
        *o = num(item, path)?;
    }
    Ok(out)
}

fn parse_easing(v: &Value, path: &str) -> Result<EasingCurve, AssemblyError> {
    let kind = field(v, "kind", path)?.as_str().unwrap_or_default();
    Ok(match kind {
        "linear" => EasingCurve::Linear,
        "ease_in_out" => EasingCurve::EaseInOut,
        "bounce" => EasingCurve::Bounce,
        "gallop" => {
            let hops = int(field(v, "hop_count", path)?, &format!("{path}.hop_count"))?;
            EasingCurve::Gallop {
                hop_count: u32::try_from(hops).map_err(|_| err(format!("{path}.hop_count"), "out of range"))?,
                hop_height: num(field(v, "hop_height", path)?, &format!("{path}.hop_height"))?,
            }
        }
        "custom" => EasingCurve::Custom(parse_params(field(v, "params", path)?, &format!("{path}.params"))?),
        other => return Err(err(format!("{path}.kind"), format!("unknown easing `{other}`"))),
    })
}

fn parse_motion_path(v: &Value, path: &str) -> Result<BezierPath, AssemblyError> {
    let closed = field(v, "closed", path)?.as_bool().ok_or_else(|| err(format!("{path}.closed"), "expected a boolean"))?;
    let mut segments = Vec::new();
    for (i, s) in array(field(v, "segments", path)?, path)?.iter().enumerate() {
        let sp = format!("{path}.segments[{i}]");
        let pts = array(s, &sp)?;
        if pts.len() != 4 {
            return Err(err(sp, "expected 4 control points"));
        }
        let p: Vec<Point> = pts.iter().map(|q| parse_point(q, &sp)).collect::<Result<_, _>>()?;
        segments.push(CubicSegment::new(p[0], p[1], p[2], p[3]));
    }
    BezierPath::new(segments, closed).map_err(|e| err(path, e.to_string()))
}

fn parse_track(v: &Value, path: &str) -> Result<Track, AssemblyError> {
    let property_name = field(v, "property", path)?.as_str().unwrap_or_default();
    let property = Property::ALL
        .into_iter()
        .find(|p| p.name() == property_name)
        .ok_or_else(|| err(format!("{path}.property"), format!("unknown property `{property_name}`")))?;
    let object_id = field(v, "object_id", path)?
        .as_str()
        .ok_or_else(|| err(format!("{path}.object_id"), "expected a string"))?
        .to_string();
    let mut keyframes = Vec::new();
    for (i, k) in array(field(v, "keyframes", path)?, path)?.iter().enumerate() {
        let kp = format!("{path}.keyframes[{i}]");
        let [t, value] = array(k, &kp)?.as_slice() else {
            return Err(err(kp, "expected [time_ms, value]"));
        };
        let time_ms = u32::try_from(int(t, &kp)?).map_err(|_| err(&kp, "time out of range"))?;
        let value = match property {
            Property::Position => KeyValue::Point(parse_point(value, &kp)?),
            p if p.is_step() => KeyValue::Step(int(value, &kp)?),
            _ => KeyValue::Number(num(value, &kp)?),
        };
        keyframes.push(Keyframe { time_ms, value });
    }
    let motion_path = match v.get("motion_path") {
        None | Some(Value::Null) => None,
        Some(m) => Some(parse_motion_path(m, &format!("{path}.motion_path"))?),
    };
    Ok(Track {
        object_id,
        property,
        keyframes,
        easing: parse_easing(field(v, "easing", path)?, &format!("{path}.easing"))?,
        motion_path,
    })
}

/// Read animation JSON back into a checked document.
pub fn parse_animation_json(text: &str) -> Result<AnimationDocument, AssemblyError> {
    let v: Value = serde_json::from_str(text).map_err(|e| err("$", e.to_string()))?;
    let duration = int(field(&v, "duration_ms", "$")?, "$.duration_ms")?;
    let tracks = array(field(&v, "tracks", "$")?, "$.tracks")?
        .iter()
        .enumerate()
        .map(|(i, t)| parse_track(t, &format!("$.tracks[{i}]")))
        .collect::<Result<_, _>>()?;
    let doc = AnimationDocument {
        scene_ref: field(&v, "scene_ref", "$")?
            .as_str()
            .ok_or_else(|| err("$.scene_ref", "expected a string"))?
            .to_string(),
        duration_ms: u32::try_from(duration).map_err(|_| err("$.duration_ms", "out of range"))?,
        tracks,
        looping: field(&v, "loop", "$")?.as_bool().ok_or_else(|| err("$.loop", "expected a boolean"))?,
    };
    doc.check()?;
    Ok(doc)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn doc() -> AnimationDocument {
        let path = BezierPath::new(vec![CubicSegment::line(Point::new(0.0, -0.0001), Point::new(10.12345, 5.0))], false).unwrap();
        AnimationDocument {
            scene_ref: "s\"1".into(),
            duration_ms: 500,
            looping: true,
            tracks: vec![
                super::super::position_track(
                    "a",
                    &path,
                    EasingCurve::Gallop {
                        hop_count: 3,
                        hop_height: 2.5,
                    },
                    500,
                ),
                Track {
                    object_id: "a".into(),
                    property: Property::ZOrder,
                    keyframes: vec![Keyframe {
                        time_ms: 0,
                        value: KeyValue::Step(-2),
                    }],
                    easing: EasingCurve::Linear,
                    motion_path: None,
                },
            ],
        }
    }

    #[test]
    fn canonical_form_is_a_fixed_point() {
        let text = export_animation_json(&doc());
        assert!(text.starts_with(r#"{"duration_ms":500,"loop":true,"scene_ref":"s\"1","tracks":[{"easing":{"hop_count":3,"hop_height":2.500,"kind":"gallop"}"#));
        assert!(text.contains(r#""keyframes":[[0,[0.000,0.000]],"#));
        assert!(text.contains(r#"[[0,-2]]"#));
        let back = parse_animation_json(&text).unwrap();
        assert_eq!(export_animation_json(&back), text);
    }

    #[test]
    fn parse_errors_carry_paths() {
        let text = export_animation_json(&doc()).replace("\"z_order\"", "\"depth\"");
        match parse_animation_json(&text) {
            Err(AssemblyError::Json { path, .. }) => assert_eq!(path, "$.tracks[1].property"),
            other => panic!("{other:?}"),
        }
    }
}
