//! Command-line driver: `genanim run` for one-shot synthesis and `genanim serve`
//! for the HTTP session protocol.
//!
//! Settings resolve as flag, then environment variable, then the scene's
//! `defaults` block, then the built-in default.

mod serve;

pub use serve::{serve, Server, SESSION_IDLE_TIMEOUT};

use crate::geom::Point;
use crate::grounding::{load_mask, CandidateSet, SegmenterConfig, DEFAULT_TOLERANCE};
use crate::intent::RemoteBackendConfig;
use crate::pipeline::{run_pipeline, Outcome, PipelineConfig, Stage, StageError, DEFAULT_ORBIT_RY_RATIO};
use crate::scene::{load_scene, SceneDocument};
use clap::{Args, Parser, Subcommand};
use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;
use std::str::FromStr;

pub const EXIT_OK: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_AMBIGUOUS: i32 = 2;

pub const DEFAULT_PORT: u16 = 7340;

pub const ENV_TOLERANCE: &str = "GENANIM_TOLERANCE";
pub const ENV_FIT_ERROR: &str = "GENANIM_FIT_ERROR";
pub const ENV_DURATION: &str = "GENANIM_DURATION_MS";

#[derive(Debug, Parser)]
#[command(name = "genanim", version, about = "Turn a prompt and a scene into a keyframed animation")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run the whole pipeline once and write the animation.
    Run(RunArgs),
    /// Serve the session protocol over HTTP on localhost.
    Serve(ServeArgs),
}

#[derive(Debug, Clone, Args)]
pub struct RunArgs {
    /// Scene document (`*.scene.json`).
    pub scene: PathBuf,
    pub prompt: String,
    /// Animation JSON output; stdout when omitted.
    #[arg(short, long)]
    pub output: Option<PathBuf>,
    /// Also write an animated SVG preview.
    #[arg(long)]
    pub svg: Option<PathBuf>,
    /// Canvas point choosing among ambiguous entity candidates.
    #[arg(long, value_name = "X,Y")]
    pub click: Option<ClickPoint>,
    /// Use this mask PNG for the entity instead of segmenting.
    #[arg(long)]
    pub mask: Option<PathBuf>,
    #[command(flatten)]
    pub tuning: Tuning,
}

#[derive(Debug, Clone, Args)]
pub struct ServeArgs {
    #[arg(long, default_value_t = DEFAULT_PORT)]
    pub port: u16,
    #[arg(long, default_value = "127.0.0.1")]
    pub host: String,
    #[command(flatten)]
    pub tuning: Tuning,
}

/// Flags shared by `run` and `serve`.
#[derive(Debug, Clone, Args)]
pub struct Tuning {
    /// Flood-fill colour tolerance per channel.
    #[arg(long)]
    pub tolerance: Option<u8>,
    /// Maximum Bézier fit error in pixels.
    #[arg(long, value_name = "PX")]
    pub fit_error: Option<f64>,
    /// Force the animation duration.
    #[arg(long, value_name = "MS")]
    pub duration: Option<u32>,
    /// Skeleton branches shorter than this many pixels are pruned.
    #[arg(long)]
    pub spur_length: Option<usize>,
    #[arg(long)]
    pub smoothing_iterations: Option<usize>,
    /// Orbit horizontal radius; by default the subject's distance from the entity.
    #[arg(long, value_name = "PX")]
    pub orbit_rx: Option<f64>,
    #[arg(long, default_value_t = DEFAULT_ORBIT_RY_RATIO)]
    pub orbit_ry_ratio: f64,
}

impl Default for Tuning {
    fn default() -> Self {
        Tuning {
            tolerance: None,
            fit_error: None,
            duration: None,
            spur_length: None,
            smoothing_iterations: None,
            orbit_rx: None,
            orbit_ry_ratio: DEFAULT_ORBIT_RY_RATIO,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClickPoint(pub Point);

impl FromStr for ClickPoint {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (x, y) = s.split_once(',').ok_or("expected X,Y")?;
        let parse = |v: &str| v.trim().parse::<f64>().map_err(|e| format!("`{v}`: {e}"));
        let p = Point::new(parse(x)?, parse(y)?);
        if !(p.x.is_finite() && p.y.is_finite()) {
            return Err("coordinates must be finite".into());
        }
        Ok(ClickPoint(p))
    }
}

fn env_parse<T: FromStr>(name: &str) -> Result<Option<T>, StageError> {
    match crate::remote::env_var(name) {
        None => Ok(None),
        Some(v) => v
            .trim()
            .parse()
            .map(Some)
            .map_err(|_| StageError::new(Stage::Scene, format!("{name}=`{v}` is not a valid value"))),
    }
}

impl Tuning {
    /// Merge flags, environment and scene defaults into a pipeline config.
    pub fn resolve(&self, scene: &SceneDocument) -> Result<PipelineConfig, StageError> {
        let d = &scene.defaults;
        let mut config = PipelineConfig {
            tolerance: self
                .tolerance
                .or(env_parse(ENV_TOLERANCE)?)
                .or(d.tolerance)
                .unwrap_or(DEFAULT_TOLERANCE),
            duration_override: self.duration,
            default_duration_ms: env_parse(ENV_DURATION)?.or(d.duration_ms),
            orbit_rx: self.orbit_rx,
            orbit_ry_ratio: self.orbit_ry_ratio,
            llm: RemoteBackendConfig::from_env(),
            segmenter: SegmenterConfig::from_env(),
            ..PipelineConfig::default()
        };
        if let Some(e) = self.fit_error.or(env_parse(ENV_FIT_ERROR)?).or(d.fit_error) {
            config.synthesis.max_error = e;
        }
        if let Some(s) = self.spur_length {
            config.synthesis.spur_length = s;
        }
        if let Some(n) = self.smoothing_iterations {
            config.synthesis.smoothing_iterations = n;
        }
        if !(config.synthesis.max_error > 0.0 && config.synthesis.max_error.is_finite()) {
            return Err(StageError::new(Stage::Pathsynth, "fit error must be positive"));
        }
        if !(config.orbit_ry_ratio > 0.0 && config.orbit_ry_ratio.is_finite()) {
            return Err(StageError::new(Stage::Pathsynth, "orbit ry ratio must be positive"));
        }
        Ok(config)
    }
}

/// Human-readable list of candidates for the ambiguity exit.
pub fn describe_candidates(set: &CandidateSet, scene: &SceneDocument) -> String {
    let mut out = String::new();
    for (i, c) in set.candidates.iter().enumerate() {
        let b = c.bounds;
        let name = c
            .object_id
            .as_deref()
            .and_then(|id| scene.object(id))
            .map(|o| o.name.as_str())
            .unwrap_or("unnamed region");
        out.push_str(&format!(
            "  #{i} bounds [{}, {}, {}, {}] score {:.2} ({name})\n",
            b.x, b.y, b.width, b.height, c.score
        ));
    }
    out
}

fn write_file(path: &PathBuf, text: &str) -> Result<(), StageError> {
    std::fs::write(path, text).map_err(|e| StageError::new(Stage::Output, format!("{}: {e}", path.display())))
}

/// Execute `genanim run`, reporting to the given streams; returns the exit code.
pub fn run_once(args: &RunArgs, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32 {
    let result = (|| -> Result<i32, StageError> {
        let scene = load_scene(&args.scene).map_err(|e| StageError::new(Stage::Scene, e))?;
        let mut config = args.tuning.resolve(&scene)?;
        if let Some(path) = &args.mask {
            config.entity_mask = Some(load_mask(path, &scene).map_err(|e| StageError::new(Stage::Grounding, e))?);
        }
        match run_pipeline(&scene, &args.prompt, args.click.map(|c| c.0), &config)? {
            Outcome::NeedsClick { intent, candidates, .. } => {
                let _ = write!(
                    stderr,
                    "[grounding] `{}` matches {} regions; rerun with --click X,Y inside one of them:\n{}",
                    intent.entity.as_deref().unwrap_or_default(),
                    candidates.len(),
                    describe_candidates(&candidates, &scene)
                );
                Ok(EXIT_AMBIGUOUS)
            }
            Outcome::Done(result) => {
                for w in result.warnings() {
                    let _ = writeln!(stderr, "warning: {w}");
                }
                let json = result.json();
                match &args.output {
                    Some(path) => write_file(path, &json)?,
                    None => stdout
                        .write_all(json.as_bytes())
                        .map_err(|e| StageError::new(Stage::Output, e))?,
                }
                if let Some(path) = &args.svg {
                    write_file(path, &result.svg(&scene))?;
                }
                Ok(EXIT_OK)
            }
        }
    })();
    result.unwrap_or_else(|e| {
        let _ = writeln!(stderr, "{e}");
        EXIT_ERROR
    })
}

/// Parse arguments (including the program name) and run; returns the exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_ERROR } else { EXIT_OK };
        }
    };
    match cli.command {
        Command::Run(args) => run_once(&args, &mut std::io::stdout().lock(), &mut std::io::stderr().lock()),
        Command::Serve(args) => match serve(&args) {
            Ok(()) => EXIT_OK,
            Err(e) => {
                eprintln!("{e}");
                EXIT_ERROR
            }
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn click_parsing() {
        assert_eq!("3.5, 4".parse::<ClickPoint>().unwrap(), ClickPoint(Point::new(3.5, 4.0)));
        assert!("3".parse::<ClickPoint>().is_err());
        assert!("a,b".parse::<ClickPoint>().is_err());
        assert!("inf,0".parse::<ClickPoint>().is_err());
    }

    #[test]
    fn flags_beat_scene_defaults() {
        let mut scene = crate::synthetic::mario_hills();
        scene.defaults.tolerance = Some(10);
        scene.defaults.fit_error = Some(3.0);
        let c = Tuning::default().resolve(&scene).unwrap();
        assert_eq!(c.tolerance, 10);
        assert_eq!(c.synthesis.max_error, 3.0);
        let t = Tuning {
            tolerance: Some(40),
            fit_error: Some(1.0),
            ..Tuning::default()
        };
        let c = t.resolve(&scene).unwrap();
        assert_eq!((c.tolerance, c.synthesis.max_error), (40, 1.0));
    }

    #[test]
    fn missing_scene_exits_with_error() {
        let args = RunArgs {
            scene: "/nonexistent/x.scene.json".into(),
            prompt: "Move Mario along the hills".into(),
            output: None,
            svg: None,
            click: None,
            mask: None,
            tuning: Tuning::default(),
        };
        let (mut out, mut err) = (Vec::new(), Vec::new());
        assert_eq!(run_once(&args, &mut out, &mut err), EXIT_ERROR);
        assert!(String::from_utf8(err).unwrap().starts_with("[scene] "));
    }
}
