//! Procedurally drawn scenes used by the fixtures, examples and tests.
//!
//! Every scene is a pure function of its constants, so the PNG fixtures on
//! disk can always be regenerated bit-for-bit (`cargo run --example generate_fixtures`).

use crate::geom::{Point, Rect};
use crate::scene::{Mask, Raster, SceneDocument, SceneObject, TransformMatrix};
use std::f64::consts::{FRAC_PI_4, PI};

fn object(id: &str, name: &str, bounds: Rect, anchor: Point, z_order: i64) -> SceneObject {
    SceneObject {
        id: id.into(),
        name: name.into(),
        bounds,
        anchor,
        z_order,
        transform: TransformMatrix::identity(),
        tags: Vec::new(),
    }
}

fn paint(raster: &mut Raster, rgba: [u8; 4], mut inside: impl FnMut(Point) -> bool) {
    for y in 0..raster.height() {
        for x in 0..raster.width() {
            if inside(Point::pixel_center(x, y)) {
                raster.set_pixel(x, y, &rgba);
            }
        }
    }
}

fn disk(center: Point, r: f64) -> impl Fn(Point) -> bool {
    move |p| p.distance(center) <= r
}

pub const SKY: [u8; 4] = [135, 206, 235, 255];
pub const HILL_BROWN: [u8; 4] = [139, 90, 43, 255];
pub const MARIO_RED: [u8; 4] = [220, 30, 30, 255];

/// Centre line of the hilly band.
pub fn hills_center_y(x: f64) -> f64 {
    450.0 + 80.0 * (2.0 * PI * x / 512.0).sin()
}

/// Vertical half-thickness of the hilly band.
pub fn hills_half_width(x: f64) -> f64 {
    17.0 + 5.0 * (2.0 * PI * x / 300.0).sin()
}

/// Whether a point lies on the hilly band (x in [90, 990)).
pub fn on_hills(p: Point) -> bool {
    (90.0..990.0).contains(&p.x) && (p.y - hills_center_y(p.x)).abs() <= hills_half_width(p.x)
}

/// 1024×768: a red "Mario" block left of a sinusoidal brown band named "hills".
pub fn mario_hills() -> SceneDocument {
    let (w, h) = (1024, 768);
    let mut art = Raster::filled_rgba(w, h, SKY);
    paint(&mut art, HILL_BROWN, on_hills);
    let mario_box = Rect::new(40.0, 420.0, 40.0, 56.0);
    paint(&mut art, MARIO_RED, |p| mario_box.contains(p) && p.x < 80.0 && p.y < 476.0);
    let mut mario = object("mario", "Mario", mario_box, Point::new(60.0, 448.0), 2);
    mario.tags = vec!["character".into()];
    let hills = object("hills", "hills", Rect::new(90.0, 350.0, 900.0, 200.0), Point::new(512.5, 450.5), 1);
    SceneDocument::new(w, h, vec![mario, hills], art, "mario_hills.png")
        .expect("fixture is valid")
        .with_id("mario_hills")
}

/// The band as a mask, independent of the artwork.
pub fn hills_mask() -> Mask {
    Mask::from_fn(1024, 768, |x, y| on_hills(Point::pixel_center(x, y)))
}

pub const EARTH_CENTER: Point = Point::new(400.0, 300.0);
pub const EARTH_RADIUS: f64 = 90.0;
pub const MOON_CENTER: Point = Point::new(600.0, 340.0);
pub const MOON_RADIUS: f64 = 20.0;

/// 800×600: Earth disk and a small Moon to its right.
///
/// Earth's anchor sits 40 px below the disk centre, so the flattened orbit
/// around it dips into the disk only along its upper arc.
pub fn earth_moon() -> SceneDocument {
    let (w, h) = (800, 600);
    let mut art = Raster::filled_rgba(w, h, [10, 10, 30, 255]);
    paint(&mut art, [30, 90, 200, 255], disk(EARTH_CENTER, EARTH_RADIUS));
    paint(&mut art, [200, 200, 200, 255], disk(MOON_CENTER, MOON_RADIUS));
    let earth = object("earth", "Earth", Rect::new(310.0, 210.0, 180.0, 180.0), Point::new(400.0, 340.0), 1);
    let moon = object("moon", "Moon", Rect::new(580.0, 320.0, 40.0, 40.0), MOON_CENTER, 2);
    SceneDocument::new(w, h, vec![earth, moon], art, "earth_moon.png")
        .expect("fixture is valid")
        .with_id("earth_moon")
}

pub const VISION_ANCHOR: Point = Point::new(512.0, 384.0);

/// 1024×768: a 300×80 text block named "The Vision", drawn and transformed at 45°.
pub fn vision() -> SceneDocument {
    let (w, h) = (1024, 768);
    let mut art = Raster::filled_rgba(w, h, [245, 245, 245, 255]);
    paint(&mut art, [40, 40, 40, 255], |p| {
        let local = p.rotate_about(VISION_ANCHOR, -FRAC_PI_4) - VISION_ANCHOR;
        local.x.abs() <= 150.0 && local.y.abs() <= 40.0
    });
    let mut text = object("vision", "The Vision", Rect::new(377.0, 249.0, 270.0, 270.0), VISION_ANCHOR, 1);
    text.transform = TransformMatrix::rotation_z_about(FRAC_PI_4, VISION_ANCHOR);
    SceneDocument::new(w, h, vec![text], art, "vision.png")
        .expect("fixture is valid")
        .with_id("vision")
}

/// 640×480: a ball and two identical bands, "upper path" and "lower path".
pub fn two_paths() -> SceneDocument {
    let (w, h) = (640, 480);
    let mut art = Raster::filled_rgba(w, h, [250, 250, 250, 255]);
    let band = |cy: f64| move |p: Point| (80.0..600.0).contains(&p.x) && (p.y - cy - 20.0 * (p.x / 60.0).sin()).abs() <= 12.0;
    paint(&mut art, [90, 90, 90, 255], band(140.0));
    paint(&mut art, [90, 90, 90, 255], band(340.0));
    paint(&mut art, [220, 60, 40, 255], disk(Point::new(40.0, 240.0), 15.0));
    let mut ball = object("ball", "ball", Rect::new(25.0, 225.0, 30.0, 30.0), Point::new(40.0, 240.0), 3);
    ball.tags = vec!["character".into()];
    let anchor = |cy: f64| Point::new(300.5, (cy + 20.0 * (300.5f64 / 60.0).sin()).floor() + 0.5);
    let upper = object("upper", "upper path", Rect::new(80.0, 100.0, 520.0, 80.0), anchor(140.0), 1);
    let lower = object("lower", "lower path", Rect::new(80.0, 300.0, 520.0, 80.0), anchor(340.0), 2);
    SceneDocument::new(w, h, vec![ball, upper, lower], art, "two_paths.png")
        .expect("fixture is valid")
        .with_id("two_paths")
}

/// 1024×1024 hilly band for timing mask-to-path synthesis.
pub fn large_hills_mask() -> Mask {
    Mask::from_fn(1024, 1024, |x, y| {
        let p = Point::pixel_center(x, y);
        let cy = 512.0 + 200.0 * (2.0 * PI * p.x / 700.0).sin();
        let hw = 30.0 + 10.0 * (2.0 * PI * p.x / 400.0).sin();
        (20.0..1004.0).contains(&p.x) && (p.y - cy).abs() <= hw
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn anchors_sit_on_their_objects() {
        let s = mario_hills();
        assert_eq!(s.artwork.pixel(512, 450), &HILL_BROWN);
        assert_eq!(s.artwork.pixel(60, 448), &MARIO_RED);
        let s = two_paths();
        for o in &s.objects {
            let (x, y) = o.anchor.to_pixel().unwrap();
            assert_ne!(s.artwork.pixel(x, y), &[250, 250, 250, 255], "{}", o.id);
        }
        let s = vision();
        assert_eq!(s.artwork.pixel(512, 384), &[40, 40, 40, 255]);
    }
}
