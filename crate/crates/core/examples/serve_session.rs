//! Drive the HTTP session protocol end to end against an in-process server.
//!
//! ```text
//! cargo run --example serve_session
//! ```

use genanim::cli::{Server, Tuning};
use genanim::synthetic;
use serde_json::Value;

fn post(base: &str, path: &str, body: &str) -> Result<(u16, String), Box<dyn std::error::Error>> {
    let mut resp = ureq::post(&format!("{base}{path}"))
        .config()
        .http_status_as_error(false)
        .build()
        .header("Content-Type", "application/json")
        .send(body)?;
    Ok((resp.status().as_u16(), resp.body_mut().read_to_string()?))
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let server = Server::bind("127.0.0.1", 0, Tuning::default())?;
    let base = format!("http://{}", server.addr());
    println!("serving on {base}");

    let scene = synthetic::two_paths().with_embedded_artwork()?;
    let (status, body) = post(&base, "/session", &scene.to_json_string())?;
    let id = serde_json::from_str::<Value>(&body)?["id"].as_str().unwrap_or_default().to_string();
    println!("POST /session -> {status}, id {id}");

    let (status, body) = post(&base, &format!("/session/{id}/prompt"), r#"{"text":"Move the ball along the path"}"#)?;
    let v: Value = serde_json::from_str(&body)?;
    println!("POST prompt -> {status}, state {}, {} candidates", v["state"], v["candidates"].as_array().map_or(0, Vec::len));

    let (status, body) = post(&base, &format!("/session/{id}/click"), r#"{"x":300,"y":340}"#)?;
    let v: Value = serde_json::from_str(&body)?;
    println!("POST click -> {status}, resolved {} ({})", v["resolved"], v["object_id"]);

    let (status, body) = post(&base, &format!("/session/{id}/synthesize"), "")?;
    println!("POST synthesize -> {status}, {} bytes of animation JSON", body.len());

    server.shutdown();
    Ok(())
}
