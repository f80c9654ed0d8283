//! Prompt-driven motion path synthesis.
//!
//! A natural-language prompt and a scene document go through four stages:
//!
//! 1. [`intent`]: parse the prompt into a validated [`intent::AnimationIntent`].
//! 2. [`grounding`]: bind the referenced entity to a pixel [`scene::Mask`].
//! 3. [`pathsynth`]: turn masks into smooth cubic Bézier motion paths, build
//!    orbits split at occluders, and project motion into transformed planes.
//! 4. [`assembly`]: bake keyframed tracks and export JSON or SVG.
//!
//! [`pipeline`] chains the stages; [`cli`] drives them from the command line
//! and over a small HTTP session protocol.

pub mod assembly;
pub mod cli;
pub mod geom;
pub mod grounding;
pub mod intent;
pub mod pathsynth;
pub mod pipeline;
mod remote;
pub mod scene;
pub mod synthetic;

pub use geom::{Point, Rect};
