use super::{AnimationIntent, Direction, IntentError, Mode, Preset, DEFAULT_DURATION_MS};
use serde_json::{Map, Value};

const FIELDS: [&str; 7] = ["subject", "entity", "mode", "preset", "direction", "duration_ms", "loop"];

fn schema(path: &str, message: impl Into<String>) -> IntentError {
    IntentError::Schema {
        path: path.to_string(),
        message: message.into(),
    }
}

fn required_str<'a>(obj: &'a Map<String, Value>, key: &str) -> Result<&'a str, IntentError> {
    match obj.get(key) {
        None | Some(Value::Null) => Err(schema(key, "missing required field")),
        Some(v) => optional_str(Some(v), key).map(|s| s.expect("non-null")),
    }
}

fn optional_str<'a>(v: Option<&'a Value>, key: &str) -> Result<Option<&'a str>, IntentError> {
    match v {
        None | Some(Value::Null) => Ok(None),
        Some(Value::String(s)) if s.trim().is_empty() => Err(schema(key, "must not be empty")),
        Some(Value::String(s)) => Ok(Some(s)),
        Some(other) => Err(schema(key, format!("expected a string, found {other}"))),
    }
}

/// Parse intent JSON, rejecting unknown fields, unknown presets and broken invariants.
///
/// `duration_ms` defaults to 2000 and `loop` to `true` exactly for orbit mode.
pub fn validate_intent(raw: &str) -> Result<AnimationIntent, IntentError> {
    let value: Value = serde_json::from_str(raw.trim()).map_err(|e| IntentError::Json(e.to_string()))?;
    let obj = value.as_object().ok_or_else(|| schema("$", "expected a JSON object"))?;
    if let Some(unknown) = obj.keys().find(|k| !FIELDS.contains(&k.as_str())) {
        return Err(schema(unknown, "unknown field"));
    }

    let subject = required_str(obj, "subject")?.to_string();
    let entity = optional_str(obj.get("entity"), "entity")?.map(str::to_string);
    let mode_name = required_str(obj, "mode")?;
    let mode = Mode::ALL.into_iter().find(|m| m.name() == mode_name).ok_or_else(|| {
        let names: Vec<_> = Mode::ALL.iter().map(|m| m.name()).collect();
        schema("mode", format!("unknown mode `{mode_name}`; expected one of {}", names.join(", ")))
    })?;
    let preset_name = required_str(obj, "preset")?;
    let preset = Preset::from_name(preset_name).ok_or_else(|| IntentError::UnknownPreset {
        name: preset_name.to_string(),
    })?;
    let direction = match optional_str(obj.get("direction"), "direction")? {
        None => None,
        Some(d) => Some(Direction::ALL.into_iter().find(|x| x.name() == d).ok_or_else(|| {
            schema("direction", format!("unknown direction `{d}`; expected left, right, top or bottom"))
        })?),
    };
    let duration_ms = match obj.get("duration_ms") {
        None | Some(Value::Null) => DEFAULT_DURATION_MS,
        Some(v) => {
            let n = v
                .as_u64()
                .ok_or_else(|| schema("duration_ms", format!("expected a positive integer, found {v}")))?;
            u32::try_from(n).map_err(|_| IntentError::Invariant(format!("duration_ms {n} out of range")))?
        }
    };
    let looping = match obj.get("loop") {
        None | Some(Value::Null) => mode == Mode::Orbit,
        Some(Value::Bool(b)) => *b,
        Some(v) => return Err(schema("loop", format!("expected a boolean, found {v}"))),
    };

    let intent = AnimationIntent {
        subject,
        entity,
        mode,
        preset,
        direction,
        duration_ms,
        looping,
    };
    intent.check()?;
    Ok(intent)
}
