//! Standalone animated SVG preview.
//!
//! Animated objects are cut out of the artwork (their flood-filled region
//! within their bounds) and drawn as sprites positioned relative to their
//! anchors, so motion moves the anchor along the track's path. The hole left
//! in the background is filled with the most common colour around it.
//!
//! SVG cannot animate paint order. An object with a visibility track is drawn
//! twice, behind and in front of a copy of the occluder, and the two copies
//! get complementary discrete visibility animations.

use super::json::fixed3;
use super::{gallop_offset, AnimationDocument, EasingCurve, KeyValue, Property, Track};
use crate::grounding::{segment_by_point, DEFAULT_TOLERANCE};
use crate::pathsynth::debug::path_d;
use crate::scene::{Mask, Raster, SceneDocument, SceneObject};
use base64::Engine;
use std::collections::BTreeMap;
use std::fmt::Write;

struct Sprite {
    png: Vec<u8>,
    /// Top-left corner relative to the anchor.
    dx: f64,
    dy: f64,
    width: usize,
    height: usize,
}

/// Pixels of `obj` inside its bounds: its flood-filled region when the anchor is on the canvas, else the whole box.
fn object_region(scene: &SceneDocument, obj: &SceneObject) -> Option<(Mask, [usize; 4])> {
    let (cw, ch) = (scene.canvas_width as f64, scene.canvas_height as f64);
    let b = obj.bounds;
    let x0 = b.x.floor().clamp(0.0, cw) as usize;
    let y0 = b.y.floor().clamp(0.0, ch) as usize;
    let x1 = (b.x + b.width).ceil().clamp(0.0, cw) as usize;
    let y1 = (b.y + b.height).ceil().clamp(0.0, ch) as usize;
    if x0 >= x1 || y0 >= y1 {
        return None;
    }
    let fill = segment_by_point(&scene.artwork, obj.anchor, DEFAULT_TOLERANCE).ok();
    let in_box = |x: usize, y: usize| (x0..x1).contains(&x) && (y0..y1).contains(&y);
    let region = Mask::from_fn(scene.canvas_width, scene.canvas_height, |x, y| {
        in_box(x, y) && fill.as_ref().is_none_or(|m| m.get(x, y))
    });
    Some((region, [x0, y0, x1, y1]))
}

fn sprite(scene: &SceneDocument, obj: &SceneObject) -> Option<Sprite> {
    let (region, [x0, y0, x1, y1]) = object_region(scene, obj)?;
    let (w, h) = (x1 - x0, y1 - y0);
    let mut data = Vec::with_capacity(w * h * 4);
    for y in y0..y1 {
        for x in x0..x1 {
            if region.get(x, y) {
                data.extend_from_slice(scene.artwork.pixel(x, y));
            } else {
                data.extend_from_slice(&[0, 0, 0, 0]);
            }
        }
    }
    let png = Raster::new(w, h, 4, data).ok()?.encode_png().ok()?;
    Some(Sprite {
        png,
        dx: x0 as f64 - obj.anchor.x,
        dy: y0 as f64 - obj.anchor.y,
        width: w,
        height: h,
    })
}

/// Replace `obj`'s pixels with the most common colour bordering them.
fn erase(background: &mut Raster, scene: &SceneDocument, obj: &SceneObject) {
    let Some((region, _)) = object_region(scene, obj) else { return };
    let mut counts: BTreeMap<Vec<u8>, usize> = BTreeMap::new();
    for (x, y) in region.foreground() {
        for (dx, dy) in [(-1i64, -1i64), (0, -1), (1, -1), (-1, 0), (1, 0), (-1, 1), (0, 1), (1, 1)] {
            let (nx, ny) = (x as i64 + dx, y as i64 + dy);
            let inside = nx >= 0 && ny >= 0 && (nx as usize) < region.width() && (ny as usize) < region.height();
            if inside && !region.get(nx as usize, ny as usize) {
                *counts.entry(scene.artwork.pixel(nx as usize, ny as usize).to_vec()).or_default() += 1;
            }
        }
    }
    let fill = counts
        .into_iter()
        .max_by(|a, b| a.1.cmp(&b.1).then(b.0.cmp(&a.0)))
        .map_or(vec![0, 0, 0, 0], |(c, _)| c);
    for (x, y) in region.foreground() {
        background.set_pixel(x, y, &fill);
    }
}

fn data_uri(png: &[u8]) -> String {
    format!("data:image/png;base64,{}", base64::engine::general_purpose::STANDARD.encode(png))
}

fn frac(v: f64) -> String {
    let s = format!("{v:.6}");
    if s == "-0.000000" {
        "0.000000".into()
    } else {
        s
    }
}

struct Timing<'a> {
    doc: &'a AnimationDocument,
}

impl Timing<'_> {
    fn attrs(&self) -> String {
        let end = if self.doc.looping { r#"repeatCount="indefinite""# } else { r#"fill="freeze""# };
        format!(r#"begin="0s" dur="{}ms" {end}"#, self.doc.duration_ms)
    }

    fn key_times(&self, track: &Track) -> String {
        let d = f64::from(self.doc.duration_ms);
        track.keyframes.iter().map(|k| frac(f64::from(k.time_ms) / d)).collect::<Vec<_>>().join(";")
    }
}

fn interpolation(track: &Track) -> String {
    let spline = match track.easing {
        EasingCurve::EaseInOut => Some(super::EASE_IN_OUT),
        EasingCurve::Custom(p) => Some(p),
        _ => None,
    };
    match spline {
        Some(p) if track.keyframes.len() > 1 => {
            let one = p.map(fixed3).join(" ");
            let all = vec![one; track.keyframes.len() - 1].join(";");
            format!(r#"calcMode="spline" keySplines="{all}""#)
        }
        _ => r#"calcMode="linear""#.into(),
    }
}

fn scalar_values(track: &Track) -> Vec<f64> {
    track
        .keyframes
        .iter()
        .map(|k| match k.value {
            KeyValue::Number(v) => v,
            KeyValue::Step(v) => v as f64,
            KeyValue::Point(_) => 0.0,
        })
        .collect()
}

/// Wrap `inner` in a group animating one scalar property about the local origin (the anchor).
fn scalar_group(track: &Track, t: &Timing, inner: &str) -> String {
    let values = scalar_values(track);
    let list = values.iter().map(|&v| fixed3(v)).collect::<Vec<_>>().join(";");
    let (open, anim) = match track.property {
        Property::Opacity => (
            format!(r#"<g opacity="{}">"#, fixed3(values[0])),
            format!(r#"<animate attributeName="opacity" values="{list}""#),
        ),
        Property::Scale => (
            "<g>".to_string(),
            format!(r#"<animateTransform attributeName="transform" type="scale" values="{list}""#),
        ),
        Property::Rotation => (
            "<g>".to_string(),
            format!(r#"<animateTransform attributeName="transform" type="rotate" values="{list}""#),
        ),
        _ => return inner.to_string(),
    };
    format!(
        "{open}{anim} keyTimes=\"{}\" {} {}/>{inner}</g>",
        t.key_times(track),
        interpolation(track),
        t.attrs()
    )
}

fn moving_group(track: &Track, path_id: Option<&str>, t: &Timing, inner: &str) -> String {
    let d = f64::from(t.doc.duration_ms);
    let mut s = String::from("<g>");
    match path_id {
        Some(id) => {
            let points: Vec<String> = track
                .keyframes
                .iter()
                .map(|k| frac(track.easing.apply(f64::from(k.time_ms) / d)))
                .collect();
            write!(
                s,
                "<animateMotion calcMode=\"linear\" keyPoints=\"{}\" keyTimes=\"{}\" {}><mpath xlink:href=\"#{id}\"/></animateMotion>",
                points.join(";"),
                t.key_times(track),
                t.attrs()
            )
            .unwrap();
        }
        None => {
            let values: Vec<String> = track
                .keyframes
                .iter()
                .map(|k| match k.value {
                    KeyValue::Point(p) => format!("{},{}", fixed3(p.x), fixed3(p.y)),
                    _ => "0,0".into(),
                })
                .collect();
            write!(
                s,
                "<animateMotion calcMode=\"linear\" values=\"{}\" keyTimes=\"{}\" {}/>",
                values.join(";"),
                t.key_times(track),
                t.attrs()
            )
            .unwrap();
        }
    }
    if let EasingCurve::Gallop { hop_count, hop_height } = track.easing {
        let offsets: Vec<String> = track
            .keyframes
            .iter()
            .map(|k| format!("0,{}", fixed3(gallop_offset(f64::from(k.time_ms) / d, hop_count, hop_height))))
            .collect();
        write!(
            s,
            "<g><animateTransform attributeName=\"transform\" type=\"translate\" calcMode=\"linear\" values=\"{}\" keyTimes=\"{}\" {}/>{inner}</g>",
            offsets.join(";"),
            t.key_times(track),
            t.attrs()
        )
        .unwrap();
    } else {
        s.push_str(inner);
    }
    s.push_str("</g>");
    s
}

fn visibility_group(track: &Track, front: bool, t: &Timing, inner: &str) -> String {
    let word = |v: i64| if (v == 1) == front { "visible" } else { "hidden" };
    let values: Vec<&str> = track
        .keyframes
        .iter()
        .map(|k| match k.value {
            KeyValue::Step(v) => word(v),
            _ => "visible",
        })
        .collect();
    format!(
        "<g visibility=\"{}\"><animate attributeName=\"visibility\" calcMode=\"discrete\" values=\"{}\" keyTimes=\"{}\" {}/>{inner}</g>",
        values[0],
        values.join(";"),
        t.key_times(track),
        t.attrs()
    )
}

/// Define `obj`'s sprite once; returns its element id.
fn add_sprite(defs: &mut String, scene: &SceneDocument, obj: &SceneObject, ids: &mut BTreeMap<String, String>) -> Option<String> {
    if let Some(id) = ids.get(&obj.id) {
        return Some(id.clone());
    }
    let sp = sprite(scene, obj)?;
    let id = format!("sprite-{}", ids.len());
    writeln!(
        defs,
        "    <image id=\"{id}\" x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" xlink:href=\"{}\"/>",
        fixed3(sp.dx),
        fixed3(sp.dy),
        sp.width,
        sp.height,
        data_uri(&sp.png)
    )
    .unwrap();
    ids.insert(obj.id.clone(), id.clone());
    Some(id)
}

/// Animated SVG preview of `doc` over `scene`'s artwork.
pub fn export_svg(doc: &AnimationDocument, scene: &SceneDocument) -> String {
    let t = Timing { doc };
    let (w, h) = (scene.canvas_width, scene.canvas_height);

    // animated objects in paint order
    let mut ids: Vec<&str> = Vec::new();
    for track in &doc.tracks {
        if !ids.contains(&track.object_id.as_str()) {
            ids.push(&track.object_id);
        }
    }
    let mut animated: Vec<&SceneObject> = ids.iter().filter_map(|id| scene.object(id)).collect();
    animated.sort_by(|a, b| a.z_order.cmp(&b.z_order).then_with(|| a.id.cmp(&b.id)));

    let mut background = (*scene.artwork).clone();
    for obj in &animated {
        erase(&mut background, scene, obj);
    }

    let mut defs = String::new();
    let mut sprite_ids: BTreeMap<String, String> = BTreeMap::new();

    let mut body = String::new();
    let mut motion_count = 0;
    for obj in &animated {
        let Some(sprite_id) = add_sprite(&mut defs, scene, obj, &mut sprite_ids) else { continue };
        let tracks: Vec<&Track> = doc.tracks.iter().filter(|tr| tr.object_id == obj.id).collect();
        let mut inner = format!("<use xlink:href=\"#{sprite_id}\"/>");
        for tr in tracks.iter().filter(|tr| matches!(tr.property, Property::Opacity | Property::Scale | Property::Rotation)) {
            inner = scalar_group(tr, &t, &inner);
        }
        let content = match tracks.iter().find(|tr| tr.property == Property::Position) {
            Some(tr) => {
                let path_id = tr.motion_path.as_ref().map(|p| {
                    let id = format!("motion-{motion_count}");
                    motion_count += 1;
                    writeln!(defs, "    <path id=\"{id}\" d=\"{}\" fill=\"none\" stroke=\"none\"/>", path_d(p)).unwrap();
                    id
                });
                moving_group(tr, path_id.as_deref(), &t, &inner)
            }
            None => format!(
                "<g transform=\"translate({} {})\">{inner}</g>",
                fixed3(obj.anchor.x),
                fixed3(obj.anchor.y)
            ),
        };
        let visibility = tracks.iter().find(|tr| tr.property == Property::Visibility);
        let z = tracks.iter().find(|tr| tr.property == Property::ZOrder);
        match visibility {
            Some(vis) => {
                writeln!(body, "  <g class=\"layer-back\">{}</g>", visibility_group(vis, false, &t, &content)).unwrap();
                // the occluder sits one z step from the subject's first layer
                let occluder = match (z.and_then(|z| z.step_value_at(0)), vis.step_value_at(0)) {
                    (Some(z0), Some(v0)) => {
                        let oz = if v0 == 1 { z0 - 1 } else { z0 + 1 };
                        scene.objects.iter().find(|o| o.z_order == oz)
                    }
                    _ => None,
                };
                if let Some(occ) = occluder {
                    if let Some(occ_sprite) = add_sprite(&mut defs, scene, occ, &mut sprite_ids) {
                        writeln!(
                            body,
                            "  <g class=\"occluder\" transform=\"translate({} {})\"><use xlink:href=\"#{occ_sprite}\"/></g>",
                            fixed3(occ.anchor.x),
                            fixed3(occ.anchor.y)
                        )
                        .unwrap();
                    }
                }
                writeln!(body, "  <g class=\"layer-front\">{}</g>", visibility_group(vis, true, &t, &content)).unwrap();
            }
            None => writeln!(body, "  {content}").unwrap(),
        }
    }

    let bg_png = background.encode_png().expect("artwork re-encodes");
    let mut svg = String::new();
    writeln!(svg, "<?xml version=\"1.0\" encoding=\"UTF-8\"?>").unwrap();
    writeln!(
        svg,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" xmlns:xlink=\"http://www.w3.org/1999/xlink\" version=\"1.1\" width=\"{w}\" height=\"{h}\" viewBox=\"0 0 {w} {h}\">"
    )
    .unwrap();
    writeln!(svg, "  <defs>\n{defs}  </defs>").unwrap();
    writeln!(
        svg,
        "  <image x=\"0\" y=\"0\" width=\"{w}\" height=\"{h}\" xlink:href=\"{}\"/>",
        data_uri(&bg_png)
    )
    .unwrap();
    svg.push_str(&body);
    svg.push_str("</svg>\n");
    svg
}
