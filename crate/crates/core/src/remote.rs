//! Minimal JSON-over-HTTP client shared by the remote intent and segmenter backends.

use std::time::Duration;

/// Timeout applied to every remote backend call.
pub const REMOTE_TIMEOUT: Duration = Duration::from_secs(10);

/// POST `body` as JSON and return the response text. Any transport failure,
/// timeout or non-success status becomes a human-readable message.
pub(crate) fn post_json(url: &str, bearer: Option<&str>, body: &str, timeout: Duration) -> Result<String, String> {
    let agent: ureq::Agent = ureq::Agent::config_builder()
        .timeout_global(Some(timeout))
        .build()
        .into();
    let mut request = agent.post(url).header("Content-Type", "application/json");
    if let Some(key) = bearer {
        request = request.header("Authorization", format!("Bearer {key}"));
    }
    let mut response = request.send(body).map_err(|e| format!("{url}: {e}"))?;
    response
        .body_mut()
        .with_config()
        .limit(256 * 1024 * 1024)
        .read_to_string()
        .map_err(|e| format!("{url}: reading response: {e}"))
}

/// Value of an environment variable, treating empty strings as unset.
pub(crate) fn env_var(name: &str) -> Option<String> {
    std::env::var(name).ok().filter(|v| !v.trim().is_empty())
}
