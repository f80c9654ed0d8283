//! JSON-over-HTTP session protocol.
//!
//! | request | valid in | reply |
//! |---|---|---|
//! | `POST /session` (scene JSON) | any | 201 `{id, state}` |
//! | `POST /session/{id}/prompt` `{text}` | any | `{intent, candidates, resolved, state, warnings}` |
//! | `POST /session/{id}/click` `{x, y}` | a prompt with an entity | `{resolved, bounds, mask_png_b64, state}` |
//! | `POST /session/{id}/synthesize` | `prompted`, `synthesized` | animation JSON |
//! | `GET /session/{id}/preview.svg` | `synthesized` | SVG |
//! | `GET /session/{id}` | any | `{id, state, created_at_ms}` |
//!
//! Unknown sessions get 404, requests out of order 409, malformed bodies 400
//! and pipeline failures 422 with `{error, stage}`. Requests to one session
//! run one at a time; later ones wait for the earlier to finish.

use super::{ServeArgs, Tuning};
use crate::assembly::{export_animation_json, export_svg, AnimationDocument};
use crate::geom::Point;
use crate::grounding::{disambiguate, CandidateSet};
use crate::intent::AnimationIntent;
use crate::pipeline::{ground, interpret, synthesize, PipelineConfig, Stage, StageError};
use crate::scene::SceneDocument;
use base64::Engine;
use serde_json::{json, Value};
use std::collections::HashMap;
use std::hash::{BuildHasher, RandomState};
use std::io::Read;
use std::net::SocketAddr;
use std::sync::atomic::{AtomicBool, AtomicU64, Ordering};
use std::sync::{Arc, Mutex};
use std::thread::JoinHandle;
use std::time::{Duration, Instant, SystemTime, UNIX_EPOCH};
use tiny_http::{Header, Method, Request, Response};

/// Sessions untouched for this long are dropped.
pub const SESSION_IDLE_TIMEOUT: Duration = Duration::from_secs(30 * 60);

const WORKERS: usize = 4;
const MAX_BODY_BYTES: u64 = 64 << 20;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum State {
    Created,
    Prompted,
    AwaitingClick,
    Synthesized,
}

impl State {
    fn name(self) -> &'static str {
        match self {
            State::Created => "created",
            State::Prompted => "prompted",
            State::AwaitingClick => "awaiting_click",
            State::Synthesized => "synthesized",
        }
    }
}

struct Session {
    scene: SceneDocument,
    config: PipelineConfig,
    state: State,
    intent: Option<AnimationIntent>,
    /// Candidates as grounded, before any click.
    proposed: Option<CandidateSet>,
    /// Candidates after the latest click.
    pending: Option<CandidateSet>,
    result: Option<AnimationDocument>,
    created_at: SystemTime,
    last_used: Instant,
}

struct Shared {
    sessions: Mutex<HashMap<String, Arc<Mutex<Session>>>>,
    tuning: Tuning,
    counter: AtomicU64,
    hasher: RandomState,
}

struct Reply {
    status: u16,
    content_type: &'static str,
    body: Vec<u8>,
}

impl Reply {
    fn json(status: u16, v: Value) -> Self {
        Reply {
            status,
            content_type: "application/json",
            body: v.to_string().into_bytes(),
        }
    }

    fn error(status: u16, message: impl Into<String>) -> Self {
        Reply::json(status, json!({ "error": message.into() }))
    }

    fn stage(e: StageError) -> Self {
        Reply::json(422, json!({ "error": e.to_string(), "stage": e.stage.to_string() }))
    }
}

impl Shared {
    fn new_id(&self) -> String {
        let n = self.counter.fetch_add(1, Ordering::Relaxed);
        format!("{:016x}{n:04x}", self.hasher.hash_one((n, SystemTime::now())))
    }

    fn expire(&self) {
        let mut sessions = self.sessions.lock().expect("session table poisoned");
        sessions.retain(|_, s| match s.try_lock() {
            Ok(s) => s.last_used.elapsed() < SESSION_IDLE_TIMEOUT,
            // busy sessions are in use
            Err(_) => true,
        });
    }

    fn session(&self, id: &str) -> Option<Arc<Mutex<Session>>> {
        self.sessions.lock().expect("session table poisoned").get(id).cloned()
    }

    fn create(&self, body: &[u8]) -> Reply {
        let Ok(text) = std::str::from_utf8(body) else {
            return Reply::error(400, "body is not UTF-8");
        };
        let base = std::env::current_dir().unwrap_or_default();
        let scene = match SceneDocument::from_json_str(text, &base) {
            Ok(s) => s,
            Err(e) => return Reply::error(400, format!("[scene] {e}")),
        };
        let config = match self.tuning.resolve(&scene) {
            Ok(c) => c,
            Err(e) => return Reply::stage(e),
        };
        let id = self.new_id();
        let now = Instant::now();
        let session = Session {
            scene,
            config,
            state: State::Created,
            intent: None,
            proposed: None,
            pending: None,
            result: None,
            created_at: SystemTime::now(),
            last_used: now,
        };
        self.sessions
            .lock()
            .expect("session table poisoned")
            .insert(id.clone(), Arc::new(Mutex::new(session)));
        Reply::json(201, json!({ "id": id, "state": State::Created.name() }))
    }
}

fn mask_b64(c: &crate::grounding::Candidate) -> String {
    let png = c.mask.encode_png().expect("masks encode");
    base64::engine::general_purpose::STANDARD.encode(png)
}

fn candidates_json(set: &CandidateSet) -> Value {
    set.candidates
        .iter()
        .map(|c| {
            json!({
                "bounds": c.bounds,
                "mask_png_b64": mask_b64(c),
                "score": c.score,
                "object_id": c.object_id,
            })
        })
        .collect()
}

fn parse_body(body: &[u8]) -> Result<Value, Reply> {
    serde_json::from_slice(body).map_err(|e| Reply::error(400, format!("invalid JSON body: {e}")))
}

fn prompt(s: &mut Session, body: &[u8]) -> Reply {
    let v = match parse_body(body) {
        Ok(v) => v,
        Err(r) => return r,
    };
    let Some(text) = v.get("text").and_then(Value::as_str) else {
        return Reply::error(400, "expected {\"text\": string}");
    };
    let (intent, trace) = match interpret(text, &s.scene, &s.config) {
        Ok(r) => r,
        Err(e) => return Reply::stage(e),
    };
    let candidates = match ground(&s.scene, &intent, &s.config) {
        Ok(c) => c,
        Err(e) => return Reply::stage(e),
    };
    s.state = match &candidates {
        Some(c) if c.needs_click() => State::AwaitingClick,
        _ => State::Prompted,
    };
    let mut warnings = trace.warnings.clone();
    if let Some(c) = &candidates {
        warnings.extend(c.warnings.iter().cloned());
    }
    let reply = json!({
        "intent": serde_json::to_value(&intent).expect("intent serializes"),
        "matched_rules": trace.matched_rules,
        "backend": trace.backend,
        "candidates": candidates.as_ref().map(candidates_json).unwrap_or_else(|| json!([])),
        "resolved": candidates.as_ref().and_then(|c| c.resolved),
        "state": s.state.name(),
        "warnings": warnings,
    });
    s.intent = Some(intent);
    s.pending = candidates.clone();
    s.proposed = candidates;
    s.result = None;
    Reply::json(200, reply)
}

fn click(s: &mut Session, body: &[u8]) -> Reply {
    let Some(proposed) = &s.proposed else {
        return Reply::error(409, format!("nothing to choose between in state `{}`", s.state.name()));
    };
    let v = match parse_body(body) {
        Ok(v) => v,
        Err(r) => return r,
    };
    let (Some(x), Some(y)) = (v.get("x").and_then(Value::as_f64), v.get("y").and_then(Value::as_f64)) else {
        return Reply::error(400, "expected {\"x\": number, \"y\": number}");
    };
    let set = match disambiguate(proposed, Point::new(x, y)) {
        Ok(set) => set,
        Err(e) => return Reply::stage(StageError::new(Stage::Grounding, e)),
    };
    let c = set.resolved_candidate().expect("a click always resolves");
    let reply = json!({
        "resolved": set.resolved,
        "bounds": c.bounds,
        "mask_png_b64": mask_b64(c),
        "object_id": c.object_id,
        "state": State::Prompted.name(),
    });
    s.pending = Some(set);
    s.state = State::Prompted;
    s.result = None;
    Reply::json(200, reply)
}

fn run_synthesis(s: &mut Session) -> Reply {
    match s.state {
        State::Prompted | State::Synthesized => {}
        other => return Reply::error(409, format!("cannot synthesize in state `{}`", other.name())),
    }
    if s.result.is_none() {
        let intent = s.intent.as_ref().expect("prompted sessions carry an intent");
        match synthesize(&s.scene, intent, s.pending.as_ref(), &s.config) {
            Ok((_, doc)) => s.result = Some(doc),
            Err(e) => return Reply::stage(e),
        }
    }
    s.state = State::Synthesized;
    Reply {
        status: 200,
        content_type: "application/json",
        body: export_animation_json(s.result.as_ref().expect("just set")).into_bytes(),
    }
}

fn preview(s: &Session) -> Reply {
    match &s.result {
        Some(doc) if s.state == State::Synthesized => Reply {
            status: 200,
            content_type: "image/svg+xml",
            body: export_svg(doc, &s.scene).into_bytes(),
        },
        _ => Reply::error(409, format!("no animation yet in state `{}`", s.state.name())),
    }
}

fn route(shared: &Shared, method: &Method, url: &str, body: &[u8]) -> Reply {
    shared.expire();
    let path = url.split('?').next().unwrap_or_default();
    let parts: Vec<&str> = path.trim_matches('/').split('/').collect();
    match (method, parts.as_slice()) {
        (Method::Options, _) => Reply {
            status: 204,
            content_type: "text/plain",
            body: Vec::new(),
        },
        (Method::Post, ["session"]) => shared.create(body),
        (_, ["session", id, rest @ ..]) => {
            let Some(session) = shared.session(id) else {
                return Reply::error(404, format!("unknown session `{id}`"));
            };
            let mut s = session.lock().unwrap_or_else(|p| p.into_inner());
            s.last_used = Instant::now();
            match (method, rest) {
                (Method::Get, []) => {
                    let created = s.created_at.duration_since(UNIX_EPOCH).unwrap_or_default().as_millis() as u64;
                    Reply::json(200, json!({ "id": id, "state": s.state.name(), "created_at_ms": created }))
                }
                (Method::Post, ["prompt"]) => prompt(&mut s, body),
                (Method::Post, ["click"]) => click(&mut s, body),
                (Method::Post, ["synthesize"]) => run_synthesis(&mut s),
                (Method::Get, ["preview.svg"]) => preview(&s),
                _ => Reply::error(405, "unsupported method or path"),
            }
        }
        _ => Reply::error(404, "not found"),
    }
}

fn handle(shared: &Shared, mut request: Request) {
    let mut body = Vec::new();
    let reply = match request.as_reader().take(MAX_BODY_BYTES).read_to_end(&mut body) {
        Ok(_) => route(shared, request.method(), request.url(), &body),
        Err(e) => Reply::error(400, format!("could not read body: {e}")),
    };
    let header = |k: &str, v: &str| Header::from_bytes(k.as_bytes(), v.as_bytes()).expect("static header is valid");
    let response = Response::from_data(reply.body)
        .with_status_code(reply.status)
        .with_header(header("Content-Type", reply.content_type))
        .with_header(header("Access-Control-Allow-Origin", "*"))
        .with_header(header("Access-Control-Allow-Methods", "GET, POST, OPTIONS"))
        .with_header(header("Access-Control-Allow-Headers", "Content-Type"));
    // the client may have gone away; nothing to do about it
    let _ = request.respond(response);
}

/// A running session server.
pub struct Server {
    http: Arc<tiny_http::Server>,
    addr: SocketAddr,
    stopping: Arc<AtomicBool>,
    workers: Vec<JoinHandle<()>>,
}

impl Server {
    /// Bind `host:port` (port 0 picks a free one) and start serving.
    pub fn bind(host: &str, port: u16, tuning: Tuning) -> Result<Self, StageError> {
        let http = tiny_http::Server::http((host, port))
            .map_err(|e| StageError::new(Stage::Serve, format!("cannot listen on {host}:{port}: {e}")))?;
        let addr = http
            .server_addr()
            .to_ip()
            .ok_or_else(|| StageError::new(Stage::Serve, "listener has no IP address"))?;
        let http = Arc::new(http);
        let stopping = Arc::new(AtomicBool::new(false));
        let shared = Arc::new(Shared {
            sessions: Mutex::new(HashMap::new()),
            tuning,
            counter: AtomicU64::new(0),
            hasher: RandomState::new(),
        });
        let workers = (0..WORKERS)
            .map(|_| {
                let (http, stopping, shared) = (http.clone(), stopping.clone(), shared.clone());
                std::thread::spawn(move || loop {
                    match http.recv() {
                        Ok(request) => handle(&shared, request),
                        Err(_) if stopping.load(Ordering::SeqCst) => break,
                        Err(_) => continue,
                    }
                })
            })
            .collect();
        Ok(Server {
            http,
            addr,
            stopping,
            workers,
        })
    }

    pub fn addr(&self) -> SocketAddr {
        self.addr
    }

    /// Block until the worker threads exit, which they do only after [`Server::shutdown`].
    pub fn wait(self) {
        for w in self.workers {
            let _ = w.join();
        }
    }

    /// Stop accepting requests and join the workers.
    pub fn shutdown(self) {
        self.stopping.store(true, Ordering::SeqCst);
        for _ in 0..self.workers.len() {
            self.http.unblock();
        }
        self.wait();
    }
}

/// Execute `genanim serve`; runs until the process is killed.
pub fn serve(args: &ServeArgs) -> Result<(), StageError> {
    let server = Server::bind(&args.host, args.port, args.tuning.clone())?;
    eprintln!("genanim serving on http://{}", server.addr());
    server.wait();
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn shared() -> Shared {
        Shared {
            sessions: Mutex::new(HashMap::new()),
            tuning: Tuning::default(),
            counter: AtomicU64::new(0),
            hasher: RandomState::new(),
        }
    }

    fn body(r: &Reply) -> Value {
        serde_json::from_slice(&r.body).unwrap()
    }

    #[test]
    fn state_machine_rejects_out_of_order_calls() {
        let sh = shared();
        let scene = crate::synthetic::earth_moon().with_embedded_artwork().unwrap();
        let r = route(&sh, &Method::Post, "/session", scene.to_json_string().as_bytes());
        assert_eq!(r.status, 201);
        let id = body(&r)["id"].as_str().unwrap().to_string();
        assert_eq!(route(&sh, &Method::Post, &format!("/session/{id}/synthesize"), b"").status, 409);
        assert_eq!(route(&sh, &Method::Get, &format!("/session/{id}/preview.svg"), b"").status, 409);
        assert_eq!(route(&sh, &Method::Post, &format!("/session/{id}/click"), br#"{"x":1,"y":1}"#).status, 409);
        assert_eq!(route(&sh, &Method::Post, &format!("/session/{id}/prompt"), b"{").status, 400);
        let r = route(&sh, &Method::Post, &format!("/session/{id}/prompt"), br#"{"text":"Make the Moon orbit around Earth"}"#);
        assert_eq!(r.status, 200);
        assert_eq!(body(&r)["state"], "prompted");
        assert_eq!(route(&sh, &Method::Post, &format!("/session/{id}/synthesize"), b"").status, 200);
        assert_eq!(route(&sh, &Method::Get, &format!("/session/{id}/preview.svg"), b"").status, 200);
        assert_eq!(route(&sh, &Method::Get, "/session/nope/preview.svg", b"").status, 404);
    }

    #[test]
    fn pipeline_errors_are_unprocessable() {
        let sh = shared();
        let scene = crate::synthetic::earth_moon().with_embedded_artwork().unwrap();
        let id = body(&route(&sh, &Method::Post, "/session", scene.to_json_string().as_bytes()))["id"]
            .as_str()
            .unwrap()
            .to_string();
        let r = route(&sh, &Method::Post, &format!("/session/{id}/prompt"), br#"{"text":"Make the walrus dance"}"#);
        assert_eq!(r.status, 422);
        assert_eq!(body(&r)["stage"], "intent");
    }
}
