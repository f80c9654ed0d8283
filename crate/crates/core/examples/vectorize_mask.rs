//! Run the mask-to-path chain on a mask PNG and dump each intermediate.
//!
//! ```text
//! cargo run --release --example vectorize_mask [-- MASK.png OUT_DIR]
//! ```

use genanim::pathsynth::{debug, synthesize_mask_path_with, SynthesisParams};
use genanim::scene::Mask;
use genanim::synthetic;
use std::path::PathBuf;
use std::time::Instant;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let mask = match args.next() {
        Some(path) => Mask::decode_png(&std::fs::read(path)?)?,
        None => synthetic::large_hills_mask(),
    };
    let out = args.next().map(PathBuf::from).unwrap_or_else(std::env::temp_dir);
    let start = Instant::now();
    let result = synthesize_mask_path_with(&mask, &SynthesisParams::default())?;
    let elapsed = start.elapsed();
    println!(
        "{}x{} mask, {} px: skeleton {} px, centerline {} vertices, {} cubic segments, max half-width {:.1}, {:.1} ms",
        mask.width(),
        mask.height(),
        mask.count(),
        result.skeleton.count(),
        result.centerline.len(),
        result.path.segments.len(),
        result.widths.max(),
        elapsed.as_secs_f64() * 1e3
    );
    std::fs::write(out.join("skeleton.png"), debug::skeleton_png(&result.skeleton)?)?;
    std::fs::write(out.join("centerline.svg"), debug::centerline_svg(&result.smoothed, mask.width(), mask.height()))?;
    std::fs::write(out.join("path.svg"), debug::fitted_path_svg(&result.path, mask.width(), mask.height()))?;
    println!("wrote skeleton.png, centerline.svg and path.svg to {}", out.display());
    Ok(())
}
