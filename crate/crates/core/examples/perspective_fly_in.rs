//! Fly a rotated text block in from the left along its own tilted plane.
//!
//! ```text
//! cargo run --example perspective_fly_in [-- OUT_DIR]
//! ```

use genanim::pipeline::{run_pipeline, Outcome, PipelineConfig};
use genanim::synthetic;
use std::path::PathBuf;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let out = std::env::args().nth(1).map(PathBuf::from).unwrap_or_else(std::env::temp_dir);
    let scene = synthetic::vision();
    let Outcome::Done(result) = run_pipeline(&scene, "Fly in The Vision text from the left.", None, &PipelineConfig::default())? else {
        return Err("directional motion needs no grounding".into());
    };
    let path = result.document.tracks[0].motion_path.as_ref().expect("position tracks carry their path");
    let (a, b) = (path.start(), path.end());
    let heading = (b.y - a.y).atan2(b.x - a.x).to_degrees();
    println!("from ({:.1}, {:.1}) to ({:.1}, {:.1}), heading {heading:.2} degrees", a.x, a.y, b.x, b.y);
    std::fs::write(out.join("vision.json"), result.json())?;
    std::fs::write(out.join("vision.svg"), result.svg(&scene))?;
    println!("wrote vision.json and vision.svg to {}", out.display());
    Ok(())
}
