//! Regenerate the scene fixtures under `fixtures/` from their procedural definitions.
//!
//! ```text
//! cargo run --example generate_fixtures [-- OUT_DIR]
//! ```

use genanim::scene::save_scene;
use genanim::synthetic;
use std::path::PathBuf;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures"));
    std::fs::create_dir_all(&dir)?;
    for scene in [synthetic::mario_hills(), synthetic::earth_moon(), synthetic::vision(), synthetic::two_paths()] {
        let path = dir.join(format!("{}.scene.json", scene.id));
        save_scene(&scene, &path)?;
        println!("wrote {}", path.display());
    }
    let mask = dir.join("hills_mask.png");
    std::fs::write(&mask, synthetic::hills_mask().encode_png()?)?;
    println!("wrote {}", mask.display());
    Ok(())
}
