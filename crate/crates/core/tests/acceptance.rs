//! Acceptance criteria, one PASS/FAIL line each. Runs without the libtest
//! harness so the lines always print; exits non-zero if any criterion fails.

mod common;

use common::*;
use genanim::assembly::{directional_path, export_animation_json, parse_animation_json, Geometry, KeyValue, Property};
use genanim::cli::{Server, Tuning};
use genanim::grounding::SegmenterConfig;
use genanim::intent::{parse_rules, validate_intent, IntentError, Mode, Preset, RemoteBackendConfig};
use genanim::pathsynth::{project_motion, synthesize_mask_path, thin_mask, Layer};
use genanim::pipeline::{run_pipeline, Outcome, PipelineConfig, RunResult};
use genanim::scene::TransformMatrix;
use genanim::{synthetic, Point};
use proptest::test_runner::{Config, TestRng, TestRunner};
use std::process::Command;
use std::time::{Duration, Instant};

// Pinned tolerances.
const PERF_BUDGET: Duration = Duration::from_secs(1);
const PRESET_FLOOR: usize = 20;
const FIT_TOLERANCE_PX: f64 = 2.0;
const PARTITION_TOLERANCE: f64 = 1e-6;
const ROTATION_TOLERANCE: f64 = 1e-9;
const GOLDEN1_SAMPLES: usize = 4000;
const UNREACHABLE: &str = "http://127.0.0.1:9/";

const CATALOG: [&str; 22] = [
    "appear", "fade_in", "fade_out", "fly_in", "grow", "shrink", "rotate", "bounce", "dance", "gallop", "pulse", "swoosh", "wave", "orbit",
    "custom_path", "spin", "drop", "rise", "slide", "pop", "shake", "float",
];

type Outcome2 = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn done(scene: &genanim::scene::SceneDocument, prompt: &str, config: &PipelineConfig) -> Result<RunResult, String> {
    match run_pipeline(scene, prompt, None, config).map_err(|e| e.to_string())? {
        Outcome::Done(r) => Ok(*r),
        Outcome::NeedsClick { candidates, .. } => Err(format!("unexpected ambiguity between {} candidates", candidates.len())),
    }
}

fn unreachable_backends() -> PipelineConfig {
    PipelineConfig {
        llm: Some(RemoteBackendConfig::new(UNREACHABLE, None)),
        segmenter: Some(SegmenterConfig::new(UNREACHABLE)),
        ..PipelineConfig::default()
    }
}

fn performance() -> Outcome2 {
    let mask = synthetic::large_hills_mask();
    let start = Instant::now();
    let (path, _) = synthesize_mask_path(&mask, 10, FIT_TOLERANCE_PX).map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    ensure(elapsed < PERF_BUDGET, || format!("took {elapsed:?}, budget {PERF_BUDGET:?}"))?;
    Ok(format!("1024x1024 mask vectorized in {:.1} ms ({} segments)", elapsed.as_secs_f64() * 1e3, path.segments.len()))
}

fn preset_catalog() -> Outcome2 {
    let mut names: Vec<&str> = Preset::ALL.iter().map(|p| p.name()).collect();
    names.sort_unstable();
    let mut expected = CATALOG.to_vec();
    expected.sort_unstable();
    ensure(names == expected, || format!("catalog is {names:?}"))?;
    for name in CATALOG {
        let raw = format!(r#"{{"subject":"Mario","mode":"in_place","preset":"{name}"}}"#);
        let intent = validate_intent(&raw).map_err(|e| format!("{name}: {e}"))?;
        ensure(intent.preset.name() == name, || format!("{name} parsed as {}", intent.preset))?;
    }
    for bogus in ["teleport", "Fade_In", "fadein", "fly-in", "gallop "] {
        let raw = format!(r#"{{"subject":"Mario","mode":"in_place","preset":"{bogus}"}}"#);
        match validate_intent(&raw) {
            Err(e @ IntentError::UnknownPreset { .. }) => {
                let msg = e.to_string();
                ensure(CATALOG.iter().all(|n| msg.contains(n)), || format!("message does not list the catalog: {msg}"))?;
            }
            other => return Err(format!("`{bogus}` gave {other:?}")),
        }
    }
    ensure(CATALOG.len() >= PRESET_FLOOR, || "catalog too small".into())?;
    Ok(format!("{} presets accepted, unknown names rejected with the catalog listed", CATALOG.len()))
}

fn golden_mario(config: &PipelineConfig) -> Outcome2 {
    let scene = synthetic::mario_hills();
    let (intent, _) = parse_rules(MARIO_PROMPT, &scene).map_err(|e| e.to_string())?;
    ensure(
        intent.subject == "Mario" && intent.entity.as_deref() == Some("hilly path") && intent.preset == Preset::Gallop,
        || format!("extracted {}", intent.to_json()),
    )?;
    let r = done(&scene, MARIO_PROMPT, config)?;
    let Geometry::Path(path) = &r.geometry else {
        return Err("expected a mask-derived path".into());
    };
    let mask = &r.candidates.as_ref().and_then(|c| c.resolved_candidate()).ok_or("no resolved mask")?.mask;
    let skeleton: Vec<(usize, usize)> = thin_mask(mask).map_err(|e| e.to_string())?.foreground().collect();
    let half_width: Vec<f64> = skeleton.iter().map(|&(x, y)| distance_to_background(mask, x, y)).collect();
    let dense = DenseArc::new(path, 400);
    let mut worst_slack = f64::INFINITY;
    for i in 0..=GOLDEN1_SAMPLES {
        let p = dense.point_at(i as f64 / GOLDEN1_SAMPLES as f64);
        let (k, d) = skeleton
            .iter()
            .enumerate()
            .map(|(k, &(x, y))| (k, p.distance(Point::pixel_center(x, y))))
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .expect("skeleton is not empty");
        let allowed = half_width[k] + FIT_TOLERANCE_PX;
        ensure(d <= allowed, || format!("sample {p:?} is {d:.3} px from the skeleton, allowed {allowed:.3}"))?;
        worst_slack = worst_slack.min(allowed - d);
    }
    Ok(format!(
        "parse matches; {} samples within half-width + {FIT_TOLERANCE_PX} px of the skeleton (min slack {worst_slack:.2} px)",
        GOLDEN1_SAMPLES + 1
    ))
}

fn toggles(values: &[i64]) -> usize {
    values.windows(2).filter(|w| w[0] != w[1]).count()
}

fn golden_orbit(config: &PipelineConfig) -> Outcome2 {
    let scene = synthetic::earth_moon();
    let (intent, _) = parse_rules(ORBIT_PROMPT, &scene).map_err(|e| e.to_string())?;
    ensure(
        intent.subject == "Moon" && intent.entity.as_deref() == Some("Earth") && intent.mode == Mode::Orbit && intent.looping,
        || format!("extracted {}", intent.to_json()),
    )?;
    let r = done(&scene, ORBIT_PROMPT, config)?;
    let Geometry::Orbit { split, .. } = &r.geometry else {
        return Err("expected orbit geometry".into());
    };
    let crossings = split.crossings();
    ensure(crossings.len() == 2, || format!("{} crossings", crossings.len()))?;
    ensure((split.pieces[0].t_range.0 - 0.0).abs() <= PARTITION_TOLERANCE, || "does not start at 0".into())?;
    ensure((split.pieces.last().unwrap().t_range.1 - 1.0).abs() <= PARTITION_TOLERANCE, || "does not end at 1".into())?;
    for w in split.pieces.windows(2) {
        ensure((w[0].t_range.1 - w[1].t_range.0).abs() <= PARTITION_TOLERANCE, || format!("gap between {:?} and {:?}", w[0].t_range, w[1].t_range))?;
    }
    ensure(split.pieces.iter().any(|p| p.layer == Layer::Back), || "never behind".into())?;
    let step_values = |prop: Property| -> Vec<i64> {
        r.document
            .tracks
            .iter()
            .find(|t| t.property == prop)
            .map(|t| t.keyframes.iter().filter_map(|k| if let KeyValue::Step(v) = k.value { Some(v) } else { None }).collect())
            .unwrap_or_default()
    };
    let (z, vis) = (step_values(Property::ZOrder), step_values(Property::Visibility));
    ensure(toggles(&z) == 2 && toggles(&vis) == 2, || format!("z {z:?}, visibility {vis:?}"))?;
    ensure(r.document.looping, || "orbit does not loop".into())?;
    Ok(format!("crossings at u = {:.4}, {:.4}; z-order {z:?} per revolution", crossings[0], crossings[1]))
}

fn golden_fly_in(config: &PipelineConfig) -> Outcome2 {
    let scene = synthetic::vision();
    let (intent, _) = parse_rules(FLY_IN_PROMPT, &scene).map_err(|e| e.to_string())?;
    ensure(
        intent.subject == "The Vision" && intent.preset == Preset::FlyIn && intent.direction.map(|d| d.name()) == Some("left"),
        || format!("extracted {}", intent.to_json()),
    )?;
    let object = scene.object("vision").ok_or("no vision object")?;
    let mut flat = object.clone();
    flat.transform = TransformMatrix::identity();
    let direction = intent.direction.unwrap();
    let local = directional_path(&flat, direction, scene.canvas_width, scene.canvas_height).map_err(|e| e.to_string())?;
    let projected = project_motion(&local, &object.transform, 0.0).map_err(|e| e.to_string())?;
    let (sin, cos) = std::f64::consts::FRAC_PI_4.sin_cos();
    let mut worst = 0.0f64;
    for (p, q) in local.control_points().zip(projected.control_points()) {
        let d = p - object.anchor;
        let expected = object.anchor + Point::new(d.x * cos - d.y * sin, d.x * sin + d.y * cos);
        worst = worst.max((q.x - expected.x).abs()).max((q.y - expected.y).abs());
    }
    ensure(worst <= ROTATION_TOLERANCE, || format!("max coordinate error {worst:e}"))?;

    // the assembled path runs along the same 45° line and ends on the anchor
    let r = done(&scene, FLY_IN_PROMPT, config)?;
    let path = r.document.tracks[0].motion_path.as_ref().ok_or("no motion path")?;
    let axis = Point::new(cos, sin);
    for p in path.control_points() {
        let off = (p - object.anchor).cross(axis).abs();
        ensure(off <= ROTATION_TOLERANCE * (1.0 + (p - object.anchor).length()), || format!("{p:?} is {off:e} off the rotated axis"))?;
    }
    ensure(path.end().distance(object.anchor) <= ROTATION_TOLERANCE, || "does not end on the anchor".into())?;
    Ok(format!("projection equals 45° rotation about the anchor (max error {worst:.1e})"))
}

fn runner(cases: u32) -> TestRunner {
    let config = Config {
        cases,
        failure_persistence: None,
        ..Config::default()
    };
    TestRunner::new_with_rng(config.clone(), TestRng::deterministic_rng(config.rng_algorithm))
}

fn property_suites() -> Outcome2 {
    runner(50).run(&blob_strategy(), |m| check_thinning(&m)).map_err(|e| format!("thinning: {e}"))?;
    runner(100)
        .run(&(polyline_strategy(), 0.5f64..4.0), |(p, tol)| check_fit(&p, tol))
        .map_err(|e| format!("fit bound: {e}"))?;
    runner(100).run(&collinear_strategy(), check_collinear_fixed).map_err(|e| format!("smoothing: {e}"))?;
    runner(100).run(&ellipse_strategy(), check_ellipse).map_err(|e| format!("ellipse: {e}"))?;
    Ok("thinning x50, fit bound x100, collinear smoothing x100, ellipse radial error x100".into())
}

fn json_stability() -> Outcome2 {
    let binary = env!("CARGO_BIN_EXE_genanim");
    for (fixture, prompt) in GOLDEN {
        let first = cli_json(fixture, prompt, None)?;
        let second = cli_json(fixture, prompt, None)?;
        ensure(first == second, || format!("{fixture}: in-process runs differ"))?;
        let doc = parse_animation_json(&first).map_err(|e| e.to_string())?;
        ensure(export_animation_json(&doc) == first, || format!("{fixture}: re-export differs"))?;
        for _ in 0..2 {
            let out = Command::new(binary)
                .args(["run", fixtures().join(fixture).to_str().unwrap(), prompt])
                .env_remove(RemoteBackendConfig::ENV_URL)
                .env_remove(SegmenterConfig::ENV_URL)
                .output()
                .map_err(|e| e.to_string())?;
            ensure(out.stdout == first.as_bytes(), || format!("{fixture}: separate process differs"))?;
        }
    }
    Ok("identical bytes across in-process runs, separate processes and parse/export".into())
}

fn serve_equivalence() -> Outcome2 {
    let server = Server::bind("127.0.0.1", 0, Tuning::default()).map_err(|e| e.to_string())?;
    let base = format!("http://{}", server.addr());
    let result = (|| {
        for (fixture, prompt) in GOLDEN {
            let served = serve_json(&base, fixture, prompt, None)?;
            ensure(served == cli_json(fixture, prompt, None)?, || format!("{fixture}: serve and CLI differ"))?;
        }
        let click = Some(Point::new(300.0, 340.0));
        let prompt = "Move the ball along the path";
        let served = serve_json(&base, "two_paths.scene.json", prompt, click)?;
        ensure(served == cli_json("two_paths.scene.json", prompt, click)?, || "click round trip differs".into())
    })();
    server.shutdown();
    result.map(|()| "3 golden scenarios and a click round trip byte-identical".into())
}

fn fallback() -> Outcome2 {
    let config = unreachable_backends();
    golden_mario(&config).map_err(|e| format!("mario: {e}"))?;
    golden_orbit(&config).map_err(|e| format!("orbit: {e}"))?;
    golden_fly_in(&config).map_err(|e| format!("fly-in: {e}"))?;
    let binary = env!("CARGO_BIN_EXE_genanim");
    for (fixture, prompt) in GOLDEN {
        let path = fixtures().join(fixture);
        let unset = Command::new(binary)
            .args(["run", path.to_str().unwrap(), prompt])
            .env_remove(RemoteBackendConfig::ENV_URL)
            .env_remove(RemoteBackendConfig::ENV_KEY)
            .env_remove(SegmenterConfig::ENV_URL)
            .output()
            .map_err(|e| e.to_string())?;
        let down = Command::new(binary)
            .args(["run", path.to_str().unwrap(), prompt])
            .env(RemoteBackendConfig::ENV_URL, UNREACHABLE)
            .env(SegmenterConfig::ENV_URL, UNREACHABLE)
            .output()
            .map_err(|e| e.to_string())?;
        ensure(unset.status.success() && down.status.success(), || format!("{fixture}: non-zero exit"))?;
        ensure(unset.stdout == down.stdout, || format!("{fixture}: fallback output differs"))?;
        ensure(String::from_utf8_lossy(&down.stderr).contains("warning:"), || format!("{fixture}: fallback was silent"))?;
    }
    Ok("all golden scenarios pass with backends unset and unreachable".into())
}

fn main() {
    let defaults = PipelineConfig::default();
    let criteria: [(&str, Box<dyn Fn() -> Outcome2>); 8] = [
        ("performance budget", Box::new(performance)),
        ("preset catalog", Box::new(preset_catalog)),
        ("golden 1: contour following", Box::new(|| golden_mario(&defaults))),
        ("golden 2: orbit occlusion", Box::new(|| golden_orbit(&defaults))),
        ("golden 3: perspective fly-in", Box::new(|| golden_fly_in(&defaults))),
        ("property suites", Box::new(|| property_suites().and_then(|a| json_stability().map(|b| format!("{a}; {b}"))))),
        ("serve/CLI equivalence", Box::new(serve_equivalence)),
        ("fallback contracts", Box::new(fallback)),
    ];
    let mut failed = 0;
    for (name, check) in &criteria {
        match check() {
            Ok(detail) => println!("PASS {name}: {detail}"),
            Err(why) => {
                failed += 1;
                println!("FAIL {name}: {why}");
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
