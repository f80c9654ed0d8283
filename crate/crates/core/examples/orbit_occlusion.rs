//! Orbit the Moon around Earth, passing behind it where the orbit crosses Earth's mask.
//!
//! ```text
//! cargo run --example orbit_occlusion [-- OUT_DIR]
//! ```

use genanim::assembly::{Geometry, KeyValue, Property};
use genanim::pipeline::{run_pipeline, Outcome, PipelineConfig};
use genanim::synthetic;
use std::path::PathBuf;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let out = std::env::args().nth(1).map(PathBuf::from).unwrap_or_else(std::env::temp_dir);
    let scene = synthetic::earth_moon();
    let Outcome::Done(result) = run_pipeline(&scene, "Make the Moon orbit around Earth.", None, &PipelineConfig::default())? else {
        return Err("Earth should ground without a click".into());
    };
    if let Geometry::Orbit { split, .. } = &result.geometry {
        for piece in &split.pieces {
            println!("{:?} over u in [{:.4}, {:.4}]", piece.layer, piece.t_range.0, piece.t_range.1);
        }
    }
    let z = result.document.tracks.iter().find(|t| t.property == Property::ZOrder).expect("orbits carry z-order");
    for k in &z.keyframes {
        if let KeyValue::Step(v) = k.value {
            println!("t = {:>4} ms  z_order = {v}", k.time_ms);
        }
    }
    std::fs::write(out.join("orbit.json"), result.json())?;
    std::fs::write(out.join("orbit.svg"), result.svg(&scene))?;
    println!("wrote orbit.json and orbit.svg to {}", out.display());
    Ok(())
}
