//! Move a character along a hilly band: the band's centerline becomes the motion path.
//!
//! ```text
//! cargo run --example contour_following [-- OUT_DIR]
//! ```

use genanim::pipeline::{run_pipeline, Outcome, PipelineConfig};
use genanim::synthetic;
use std::path::PathBuf;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let out = std::env::args().nth(1).map(PathBuf::from).unwrap_or_else(std::env::temp_dir);
    let scene = synthetic::mario_hills();
    let Outcome::Done(result) = run_pipeline(&scene, "Move Mario along the hilly path.", None, &PipelineConfig::default())? else {
        return Err("the hills should ground without a click".into());
    };
    println!("intent: {}", result.intent.to_json());
    println!("rules:  {}", result.trace.matched_rules.join(", "));
    let track = &result.document.tracks[0];
    println!("easing: {:?}, {} keyframes", track.easing, track.keyframes.len());
    std::fs::write(out.join("mario.json"), result.json())?;
    std::fs::write(out.join("mario.svg"), result.svg(&scene))?;
    println!("wrote mario.json and mario.svg to {}", out.display());
    Ok(())
}
