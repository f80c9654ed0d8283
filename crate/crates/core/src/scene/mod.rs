//! Scene documents: canvas, artwork raster and named objects.
//!
//! Coordinates are canvas pixels with the origin at the top-left corner and y
//! pointing down. Raster pixel `(x, y)` covers `[x, x+1) × [y, y+1)` and its
//! center is the document point `(x + 0.5, y + 0.5)`; every other module
//! addresses pixels through that rule.

mod names;
mod raster;
mod transform;

pub use names::{find_objects_by_name, name_score, NameMatch, FUZZY_THRESHOLD};
pub(crate) use names::{token_similarity, tokenize};
pub use raster::{Mask, Raster, RasterError};
pub use transform::{TransformMatrix, MIN_DETERMINANT};

use crate::geom::{Point, Rect};
use base64::Engine;
use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use std::path::{Path, PathBuf};
use std::sync::Arc;
use thiserror::Error;

const DATA_URI_PREFIX: &str = "data:image/png;base64,";

#[derive(Debug, Error)]
pub enum SceneError {
    #[error("scene file not found: {0}")]
    NotFound(PathBuf),
    #[error("reading {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("schema violation at `{path}`: {message}")]
    Schema { path: String, message: String },
    #[error("artwork {reference}: {source}")]
    Artwork {
        reference: String,
        #[source]
        source: RasterError,
    },
    #[error("artwork is {found_w}x{found_h} but canvas is {canvas_w}x{canvas_h}")]
    ArtworkSize {
        found_w: usize,
        found_h: usize,
        canvas_w: usize,
        canvas_h: usize,
    },
    #[error("duplicate object id `{0}`")]
    DuplicateId(String),
    #[error("objects `{first}` and `{second}` share z_order {z_order}")]
    DuplicateZOrder {
        first: String,
        second: String,
        z_order: i64,
    },
    #[error("invalid object `{id}`: {message}")]
    InvalidObject { id: String, message: String },
    #[error("empty name query")]
    EmptyQuery,
}

impl SceneError {
    fn schema(path: impl Into<String>, message: impl Into<String>) -> Self {
        SceneError::Schema {
            path: path.into(),
            message: message.into(),
        }
    }
}

/// A named, placed element of the scene.
#[derive(Clone, Debug, PartialEq)]
pub struct SceneObject {
    pub id: String,
    /// Display name; the target of entity matching.
    pub name: String,
    pub bounds: Rect,
    /// Reference point for motion, inside `bounds`.
    pub anchor: Point,
    /// Larger is nearer the viewer.
    pub z_order: i64,
    pub transform: TransformMatrix,
    /// Free-form classification, e.g. `"character"`.
    pub tags: Vec<String>,
}

impl SceneObject {
    pub fn has_tag(&self, tag: &str) -> bool {
        self.tags.iter().any(|t| t.eq_ignore_ascii_case(tag))
    }
}

/// Per-scene pipeline defaults; flags and environment override these.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SceneDefaults {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<u8>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fit_error: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub duration_ms: Option<u32>,
}

/// The validated world a prompt refers to. Immutable once loaded.
#[derive(Clone, Debug, PartialEq)]
pub struct SceneDocument {
    /// Stable identifier, carried into animation documents as `scene_ref`.
    pub id: String,
    pub canvas_width: usize,
    pub canvas_height: usize,
    pub objects: Vec<SceneObject>,
    pub artwork: Arc<Raster>,
    /// Artwork reference as written in the file: a relative PNG path or a PNG data URI.
    pub artwork_ref: String,
    pub defaults: SceneDefaults,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CanvasJson {
    width: usize,
    height: usize,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ObjectJson {
    id: String,
    name: String,
    bounds: [f64; 4],
    anchor: [f64; 2],
    z_order: i64,
    #[serde(default = "identity_column_major")]
    transform: [f64; 16],
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    tags: Vec<String>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SceneJson {
    #[serde(default = "default_scene_id")]
    id: String,
    canvas: CanvasJson,
    artwork: String,
    objects: Vec<ObjectJson>,
    #[serde(default, skip_serializing_if = "is_default_defaults")]
    defaults: SceneDefaults,
}

/// Scene id used when the file does not name one.
pub const DEFAULT_SCENE_ID: &str = "scene";

fn default_scene_id() -> String {
    DEFAULT_SCENE_ID.to_string()
}

fn identity_column_major() -> [f64; 16] {
    TransformMatrix::identity().to_column_major()
}

fn is_default_defaults(d: &SceneDefaults) -> bool {
    *d == SceneDefaults::default()
}

impl SceneDocument {
    /// Assemble and validate a document from parts.
    pub fn new(
        canvas_width: usize,
        canvas_height: usize,
        objects: Vec<SceneObject>,
        artwork: Raster,
        artwork_ref: impl Into<String>,
    ) -> Result<Self, SceneError> {
        let doc = SceneDocument {
            id: DEFAULT_SCENE_ID.to_string(),
            canvas_width,
            canvas_height,
            objects,
            artwork: Arc::new(artwork),
            artwork_ref: artwork_ref.into(),
            defaults: SceneDefaults::default(),
        };
        doc.validate()?;
        Ok(doc)
    }

    pub fn with_id(mut self, id: impl Into<String>) -> Self {
        self.id = id.into();
        self
    }

    pub fn object(&self, id: &str) -> Option<&SceneObject> {
        self.objects.iter().find(|o| o.id == id)
    }

    pub fn validate(&self) -> Result<(), SceneError> {
        if self.id.trim().is_empty() {
            return Err(SceneError::schema("id", "must not be empty"));
        }
        if self.canvas_width == 0 || self.canvas_height == 0 {
            return Err(SceneError::schema("canvas", "width and height must be at least 1"));
        }
        if self.artwork.width() != self.canvas_width || self.artwork.height() != self.canvas_height {
            return Err(SceneError::ArtworkSize {
                found_w: self.artwork.width(),
                found_h: self.artwork.height(),
                canvas_w: self.canvas_width,
                canvas_h: self.canvas_height,
            });
        }
        let mut ids: HashMap<&str, ()> = HashMap::new();
        let mut z_orders: HashMap<i64, &str> = HashMap::new();
        for o in &self.objects {
            if ids.insert(&o.id, ()).is_some() {
                return Err(SceneError::DuplicateId(o.id.clone()));
            }
            if let Some(first) = z_orders.insert(o.z_order, &o.id) {
                return Err(SceneError::DuplicateZOrder {
                    first: first.to_string(),
                    second: o.id.clone(),
                    z_order: o.z_order,
                });
            }
            let invalid = |message: &str| SceneError::InvalidObject {
                id: o.id.clone(),
                message: message.to_string(),
            };
            if !(o.bounds.width > 0.0 && o.bounds.height > 0.0) {
                return Err(invalid("bounds must have positive width and height"));
            }
            if !o.bounds.contains(o.anchor) {
                return Err(invalid("anchor lies outside bounds"));
            }
            if !o.transform.is_invertible() {
                return Err(invalid("transform is not invertible"));
            }
        }
        Ok(())
    }

    /// Parse a scene from JSON text. Relative artwork paths resolve against `base_dir`.
    pub fn from_json_str(text: &str, base_dir: &Path) -> Result<Self, SceneError> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let raw: SceneJson = serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            SceneError::schema(path, e.into_inner().to_string())
        })?;

        let artwork_bytes = read_artwork(&raw.artwork, base_dir)?;
        let artwork = Raster::decode_png_rgba(&artwork_bytes).map_err(|source| SceneError::Artwork {
            reference: raw.artwork.clone(),
            source,
        })?;

        let objects = raw
            .objects
            .into_iter()
            .map(|o| SceneObject {
                id: o.id,
                name: o.name,
                bounds: o.bounds.into(),
                anchor: o.anchor.into(),
                z_order: o.z_order,
                transform: TransformMatrix::from_column_major(&o.transform),
                tags: o.tags,
            })
            .collect();

        let doc = SceneDocument {
            id: raw.id,
            canvas_width: raw.canvas.width,
            canvas_height: raw.canvas.height,
            objects,
            artwork: Arc::new(artwork),
            artwork_ref: raw.artwork,
            defaults: raw.defaults,
        };
        doc.validate()?;
        Ok(doc)
    }

    /// Scene JSON text. Artwork is referenced, not embedded, unless `artwork_ref` is a data URI.
    pub fn to_json_string(&self) -> String {
        let raw = SceneJson {
            id: self.id.clone(),
            canvas: CanvasJson {
                width: self.canvas_width,
                height: self.canvas_height,
            },
            artwork: self.artwork_ref.clone(),
            objects: self
                .objects
                .iter()
                .map(|o| ObjectJson {
                    id: o.id.clone(),
                    name: o.name.clone(),
                    bounds: o.bounds.into(),
                    anchor: o.anchor.into(),
                    z_order: o.z_order,
                    transform: o.transform.to_column_major(),
                    tags: o.tags.clone(),
                })
                .collect(),
            defaults: self.defaults.clone(),
        };
        serde_json::to_string_pretty(&raw).expect("scene json serializes")
    }

    /// Same document with the artwork embedded as a PNG data URI.
    pub fn with_embedded_artwork(&self) -> Result<Self, SceneError> {
        let png = self.artwork.encode_png().map_err(|source| SceneError::Artwork {
            reference: self.artwork_ref.clone(),
            source,
        })?;
        let mut doc = self.clone();
        doc.artwork_ref = format!(
            "{DATA_URI_PREFIX}{}",
            base64::engine::general_purpose::STANDARD.encode(png)
        );
        Ok(doc)
    }
}

fn read_artwork(reference: &str, base_dir: &Path) -> Result<Vec<u8>, SceneError> {
    if let Some(b64) = reference.strip_prefix(DATA_URI_PREFIX) {
        return base64::engine::general_purpose::STANDARD
            .decode(b64.trim())
            .map_err(|e| SceneError::Artwork {
                reference: "data uri".into(),
                source: RasterError::Decode(e.to_string()),
            });
    }
    let path = base_dir.join(reference);
    std::fs::read(&path).map_err(|e| SceneError::Artwork {
        reference: reference.to_string(),
        source: RasterError::Decode(format!("{}: {e}", path.display())),
    })
}

/// Load and validate a scene file.
pub fn load_scene(path: impl AsRef<Path>) -> Result<SceneDocument, SceneError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| {
        if source.kind() == std::io::ErrorKind::NotFound {
            SceneError::NotFound(path.to_path_buf())
        } else {
            SceneError::Io {
                path: path.to_path_buf(),
                source,
            }
        }
    })?;
    let base = path.parent().unwrap_or_else(|| Path::new("."));
    SceneDocument::from_json_str(&text, base)
}

/// Write the scene JSON to `path` and, for file references, the artwork PNG next to it.
pub fn save_scene(doc: &SceneDocument, path: impl AsRef<Path>) -> Result<(), SceneError> {
    let path = path.as_ref();
    let io_err = |p: &Path| {
        let p = p.to_path_buf();
        move |source| SceneError::Io { path: p, source }
    };
    if !doc.artwork_ref.starts_with(DATA_URI_PREFIX) {
        let base = path.parent().unwrap_or_else(|| Path::new("."));
        let png_path = base.join(&doc.artwork_ref);
        let png = doc.artwork.encode_png().map_err(|source| SceneError::Artwork {
            reference: doc.artwork_ref.clone(),
            source,
        })?;
        std::fs::write(&png_path, png).map_err(io_err(&png_path))?;
    }
    std::fs::write(path, doc.to_json_string()).map_err(io_err(path))
}
