use super::{IntentError, Preset};
use crate::remote::{env_var, post_json, REMOTE_TIMEOUT};
use std::time::Duration;

/// Version of the intent schema sent to remote backends.
pub const SCHEMA_VERSION: u32 = 1;

/// Where to reach a remote language-model backend.
#[derive(Clone, Debug, PartialEq)]
pub struct RemoteBackendConfig {
    pub url: String,
    pub key: Option<String>,
    pub timeout: Duration,
}

impl RemoteBackendConfig {
    pub const ENV_URL: &'static str = "GENANIM_LLM_URL";
    pub const ENV_KEY: &'static str = "GENANIM_LLM_KEY";

    pub fn new(url: impl Into<String>, key: Option<String>) -> Self {
        RemoteBackendConfig {
            url: url.into(),
            key,
            timeout: REMOTE_TIMEOUT,
        }
    }

    /// `None` unless `GENANIM_LLM_URL` is set.
    pub fn from_env() -> Option<Self> {
        env_var(Self::ENV_URL).map(|url| Self::new(url, env_var(Self::ENV_KEY)))
    }
}

/// Send one prompt to the backend and return its raw reply.
///
/// Wire format: a single POST of `{"prompt", "scene_names", "schema_version"}`;
/// the reply body must be a bare intent JSON object. The caller validates it.
pub fn query_remote_backend(prompt: &str, scene_names: &[String], config: &RemoteBackendConfig) -> Result<String, IntentError> {
    let body = serde_json::json!({
        "prompt": prompt,
        "scene_names": scene_names,
        "schema_version": SCHEMA_VERSION,
    });
    post_json(&config.url, config.key.as_deref(), &body.to_string(), config.timeout).map_err(IntentError::Remote)
}

/// Few-shot system prompt for a language-model backend serving the wire format above.
///
/// The example pairs are this crate's own; a backend is free to use it verbatim.
pub fn system_prompt(scene_names: &[String]) -> String {
    let mut s = String::new();
    s.push_str("You convert animation requests into JSON. Reply with one JSON object and nothing else.\n\n");
    s.push_str("Fields: subject (object to animate), entity (reference object, required for path_follow and orbit), ");
    s.push_str("mode (path_follow | orbit | directional | in_place), preset, direction (left | right | top | bottom, required for directional), ");
    s.push_str("duration_ms (integer, 100 to 600000, default 2000), loop (boolean, true only for orbits unless asked).\n\n");
    s.push_str(&format!("Presets: {}.\n", Preset::catalog()));
    s.push_str("Use gallop for characters following a path, custom_path for other path motion.\n\n");
    s.push_str(&format!("Objects in this document: {}.\n\n", scene_names.join(", ")));
    let examples = [
        (
            "Move Mario along the hilly path",
            r#"{"subject":"Mario","entity":"hilly path","mode":"path_follow","preset":"gallop","duration_ms":2000,"loop":false}"#,
        ),
        (
            "Make the Moon orbit around Earth",
            r#"{"subject":"Moon","entity":"Earth","mode":"orbit","preset":"orbit","duration_ms":2000,"loop":true}"#,
        ),
        (
            "Fly in The Vision text from the left",
            r#"{"subject":"The Vision","mode":"directional","preset":"fly_in","direction":"left","duration_ms":2000,"loop":false}"#,
        ),
        (
            "Fade in the logo for 3 seconds",
            r#"{"subject":"logo","mode":"in_place","preset":"fade_in","duration_ms":3000,"loop":false}"#,
        ),
    ];
    for (prompt, json) in examples {
        s.push_str(&format!("Request: {prompt}\nJSON: {json}\n\n"));
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::intent::validate_intent;

    #[test]
    fn system_prompt_examples_validate() {
        let text = system_prompt(&["Mario".into()]);
        let jsons: Vec<_> = text.lines().filter_map(|l| l.strip_prefix("JSON: ")).collect();
        assert_eq!(jsons.len(), 4);
        for j in jsons {
            validate_intent(j).unwrap();
        }
    }
}
