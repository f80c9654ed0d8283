//! Prompt understanding: natural language in, a validated [`AnimationIntent`] out.
//!
//! The default backend is a deterministic rule parser. A remote language
//! model can be configured through `GENANIM_LLM_URL` / `GENANIM_LLM_KEY`; its
//! output goes through the same [`validate_intent`] gate, and any failure falls
//! back to the rules with a warning in the [`IntentParseTrace`].

mod preset;
mod remote;
mod rules;
mod validate;

pub use preset::Preset;
pub use remote::{query_remote_backend, system_prompt, RemoteBackendConfig, SCHEMA_VERSION};
pub use rules::{parse_rules, DEFAULT_DURATION_MS, MAX_PROMPT_CHARS};
pub use validate::validate_intent;

use crate::scene::SceneDocument;
use serde::Serialize;
use std::fmt;
use thiserror::Error;

/// Shortest and longest accepted animation, in milliseconds.
pub const DURATION_RANGE_MS: std::ops::RangeInclusive<u32> = 100..=600_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    PathFollow,
    Orbit,
    Directional,
    InPlace,
}

impl Mode {
    pub const ALL: [Mode; 4] = [Mode::PathFollow, Mode::Orbit, Mode::Directional, Mode::InPlace];

    pub fn name(self) -> &'static str {
        match self {
            Mode::PathFollow => "path_follow",
            Mode::Orbit => "orbit",
            Mode::Directional => "directional",
            Mode::InPlace => "in_place",
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Canvas side an object enters from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    Left,
    Right,
    Top,
    Bottom,
}

impl Direction {
    pub const ALL: [Direction; 4] = [Direction::Left, Direction::Right, Direction::Top, Direction::Bottom];

    pub fn name(self) -> &'static str {
        match self {
            Direction::Left => "left",
            Direction::Right => "right",
            Direction::Top => "top",
            Direction::Bottom => "bottom",
        }
    }
}

/// What the prompt asks for.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AnimationIntent {
    /// Query naming the object to animate.
    pub subject: String,
    /// Query naming the reference object (the path, or the body orbited).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub entity: Option<String>,
    pub mode: Mode,
    pub preset: Preset,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub direction: Option<Direction>,
    pub duration_ms: u32,
    #[serde(rename = "loop")]
    pub looping: bool,
}

impl AnimationIntent {
    /// Check the cross-field invariants.
    pub fn check(&self) -> Result<(), IntentError> {
        if self.subject.trim().is_empty() {
            return Err(IntentError::Invariant("subject must not be empty".into()));
        }
        if matches!(self.mode, Mode::PathFollow | Mode::Orbit) && self.entity.is_none() {
            return Err(IntentError::Invariant(format!("{} requires entity", self.mode)));
        }
        if self.mode == Mode::Directional && self.direction.is_none() {
            return Err(IntentError::Invariant("directional requires direction".into()));
        }
        if !DURATION_RANGE_MS.contains(&self.duration_ms) {
            return Err(IntentError::Invariant(format!(
                "duration_ms {} outside [{}, {}]",
                self.duration_ms,
                DURATION_RANGE_MS.start(),
                DURATION_RANGE_MS.end()
            )));
        }
        Ok(())
    }

    /// Compact JSON in the intent schema; `validate_intent` reads it back unchanged.
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("intent serializes")
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Backend {
    Rules,
    Remote,
}

/// How an intent was obtained.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IntentParseTrace {
    pub matched_rules: Vec<String>,
    pub warnings: Vec<String>,
    pub backend: Backend,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum IntentError {
    #[error("empty prompt")]
    EmptyPrompt,
    #[error("prompt is {0} characters; the limit is {MAX_PROMPT_CHARS}")]
    PromptTooLong(usize),
    #[error("no recognizable action verb in prompt")]
    NoActionVerb,
    #[error("`{verb}` needs a reference object (e.g. `{verb} ... {hint} <name>`)")]
    MissingEntity { verb: String, hint: &'static str },
    #[error("could not find `{query}` in the scene; nearest names: {}", nearest.join(", "))]
    UnknownSubject { query: String, nearest: Vec<String> },
    #[error("invalid duration: {0}")]
    Duration(String),
    #[error("malformed JSON: {0}")]
    Json(String),
    #[error("schema violation at `{path}`: {message}")]
    Schema { path: String, message: String },
    #[error("unknown preset `{name}`; valid presets: {}", Preset::catalog())]
    UnknownPreset { name: String },
    #[error("{0}")]
    Invariant(String),
    #[error("remote backend: {0}")]
    Remote(String),
}

/// Parse with the backend selected by the environment.
pub fn parse_prompt(prompt: &str, scene: &SceneDocument) -> Result<(AnimationIntent, IntentParseTrace), IntentError> {
    parse_prompt_with(prompt, scene, RemoteBackendConfig::from_env().as_ref())
}

/// Parse with an explicit remote backend, falling back to the rules on any remote failure.
pub fn parse_prompt_with(
    prompt: &str,
    scene: &SceneDocument,
    remote: Option<&RemoteBackendConfig>,
) -> Result<(AnimationIntent, IntentParseTrace), IntentError> {
    rules::check_prompt(prompt)?;
    let mut warnings = Vec::new();
    if let Some(config) = remote {
        let names: Vec<String> = scene.objects.iter().map(|o| o.name.clone()).collect();
        match query_remote_backend(prompt, &names, config) {
            Ok(text) => match validate_intent(&text) {
                Ok(intent) => {
                    let trace = IntentParseTrace {
                        matched_rules: Vec::new(),
                        warnings,
                        backend: Backend::Remote,
                    };
                    return Ok((intent, trace));
                }
                Err(e) => warnings.push(format!("backend output failed schema: {e}")),
            },
            Err(e) => warnings.push(format!("{e}; using rule backend")),
        }
    }
    let (intent, mut trace) = parse_rules(prompt, scene)?;
    warnings.append(&mut trace.warnings);
    trace.warnings = warnings;
    Ok((intent, trace))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn moon() -> AnimationIntent {
        AnimationIntent {
            subject: "Moon".into(),
            entity: Some("Earth".into()),
            mode: Mode::Orbit,
            preset: Preset::Orbit,
            direction: None,
            duration_ms: 4000,
            looping: true,
        }
    }

    #[test]
    fn json_omits_absent_fields() {
        assert_eq!(
            moon().to_json(),
            r#"{"subject":"Moon","entity":"Earth","mode":"orbit","preset":"orbit","duration_ms":4000,"loop":true}"#
        );
    }

    #[test]
    fn invariants() {
        let mut i = moon();
        i.entity = None;
        assert_eq!(i.check().unwrap_err().to_string(), "orbit requires entity");
        let mut i = moon();
        i.duration_ms = 99;
        assert!(i.check().is_err());
    }
}
