use serde::{Serialize, Serializer};
use std::fmt;

/// Named animation template. The catalog is closed; spellings are stable.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Preset {
    Appear,
    FadeIn,
    FadeOut,
    FlyIn,
    Grow,
    Shrink,
    Rotate,
    Bounce,
    Dance,
    Gallop,
    Pulse,
    Swoosh,
    Wave,
    Orbit,
    CustomPath,
    Spin,
    Drop,
    Rise,
    Slide,
    Pop,
    Shake,
    Float,
}

impl Preset {
    /// Every preset, in catalog order.
    pub const ALL: [Preset; 22] = [
        Preset::Appear,
        Preset::FadeIn,
        Preset::FadeOut,
        Preset::FlyIn,
        Preset::Grow,
        Preset::Shrink,
        Preset::Rotate,
        Preset::Bounce,
        Preset::Dance,
        Preset::Gallop,
        Preset::Pulse,
        Preset::Swoosh,
        Preset::Wave,
        Preset::Orbit,
        Preset::CustomPath,
        Preset::Spin,
        Preset::Drop,
        Preset::Rise,
        Preset::Slide,
        Preset::Pop,
        Preset::Shake,
        Preset::Float,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Preset::Appear => "appear",
            Preset::FadeIn => "fade_in",
            Preset::FadeOut => "fade_out",
            Preset::FlyIn => "fly_in",
            Preset::Grow => "grow",
            Preset::Shrink => "shrink",
            Preset::Rotate => "rotate",
            Preset::Bounce => "bounce",
            Preset::Dance => "dance",
            Preset::Gallop => "gallop",
            Preset::Pulse => "pulse",
            Preset::Swoosh => "swoosh",
            Preset::Wave => "wave",
            Preset::Orbit => "orbit",
            Preset::CustomPath => "custom_path",
            Preset::Spin => "spin",
            Preset::Drop => "drop",
            Preset::Rise => "rise",
            Preset::Slide => "slide",
            Preset::Pop => "pop",
            Preset::Shake => "shake",
            Preset::Float => "float",
        }
    }

    pub fn from_name(name: &str) -> Option<Preset> {
        Preset::ALL.into_iter().find(|p| p.name() == name)
    }

    /// Comma-separated catalog, for error messages and the system prompt.
    pub fn catalog() -> String {
        Preset::ALL.map(Preset::name).join(", ")
    }
}

impl fmt::Display for Preset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl Serialize for Preset {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(self.name())
    }
}
