//! Two bands match "path"; a click picks one, as the interactive preview would.
//!
//! ```text
//! cargo run --example grounding_click
//! ```

use genanim::grounding::{disambiguate, propose_candidates};
use genanim::synthetic;
use genanim::Point;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let scene = synthetic::two_paths();
    let set = propose_candidates(&scene, "path")?;
    println!("{} candidates, needs click: {}", set.len(), set.needs_click());
    for c in &set.candidates {
        println!("  {:?} score {:.2} bounds {:?} ({} px)", c.object_id, c.score, c.bounds, c.mask.count());
    }
    let click = Point::new(300.0, 140.0);
    let chosen = disambiguate(&set, click)?;
    let c = chosen.resolved_candidate().expect("a click resolves");
    println!("click at ({}, {}) chose {:?}", click.x, click.y, c.object_id);
    Ok(())
}
