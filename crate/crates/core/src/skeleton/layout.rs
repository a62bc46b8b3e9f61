use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::SkeletonError;

/// A tracked body region. Each has its own point layout and classifier.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Modality {
    Face,
    Head,
    Hand,
    Body,
}

impl Modality {
    pub const ALL: [Modality; 4] = [Modality::Face, Modality::Head, Modality::Hand, Modality::Body];

    pub fn as_str(self) -> &'static str {
        match self {
            Modality::Face => "face",
            Modality::Head => "head",
            Modality::Hand => "hand",
            Modality::Body => "body",
        }
    }

    /// Number of points in the default layout.
    pub fn default_point_count(self) -> usize {
        match self {
            Modality::Face => 60,
            Modality::Head => 12,
            Modality::Hand => 8,
            Modality::Body => 12,
        }
    }
}

impl fmt::Display for Modality {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Modality {
    type Err = SkeletonError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "face" => Ok(Modality::Face),
            "head" => Ok(Modality::Head),
            "hand" => Ok(Modality::Hand),
            "body" => Ok(Modality::Body),
            other => Err(SkeletonError::Config(format!("unknown modality {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PointId {
    pub modality: Modality,
    pub name: String,
    pub index: usize,
}

/// Arm joints shared by the hand and body layouts, left side first.
pub const ARM_JOINTS: [&str; 8] = ["l_shoulder", "l_elbow", "l_wrist", "l_palm", "r_shoulder", "r_elbow", "r_wrist", "r_palm"];

/// Trunk joints of the body layout; the arm joints follow them.
pub const TRUNK_JOINTS: [&str; 4] = ["spine_mid", "hip_center", "hip_left", "hip_right"];

/// Ordered set of tracked points for one modality.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModalityLayout {
    modality: Modality,
    points: Vec<PointId>,
    by_name: HashMap<String, usize>,
}

impl ModalityLayout {
    /// Builds a layout from point names in order.
    ///
    /// Names must be unique, non-empty and made of ASCII letters, digits
    /// and underscores, because they are embedded in CSV headers and
    /// descriptor names.
    pub fn new<S: AsRef<str>>(modality: Modality, names: &[S]) -> Result<Self, SkeletonError> {
        if names.is_empty() {
            return Err(SkeletonError::Config("layout must contain at least one point".into()));
        }
        let mut points = Vec::with_capacity(names.len());
        let mut by_name = HashMap::with_capacity(names.len());
        for (index, name) in names.iter().enumerate() {
            let name = name.as_ref();
            if name.is_empty() || !name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_') {
                return Err(SkeletonError::Config(format!("invalid point name {name:?}")));
            }
            if by_name.insert(name.to_string(), index).is_some() {
                return Err(SkeletonError::Config(format!("duplicate point name {name:?}")));
            }
            points.push(PointId { modality, name: name.to_string(), index });
        }
        Ok(ModalityLayout { modality, points, by_name })
    }

    /// The canonical layout for a modality: 60 face points, 12 head points,
    /// 8 arm joints for the hand, and trunk plus arm joints for the body.
    pub fn default_for(modality: Modality) -> Self {
        let names: Vec<String> = match modality {
            Modality::Face => (0..60).map(|i| format!("face_{i:02}")).collect(),
            Modality::Head => (0..12).map(|i| format!("head_{i:02}")).collect(),
            Modality::Hand => ARM_JOINTS.iter().map(|s| s.to_string()).collect(),
            Modality::Body => TRUNK_JOINTS.iter().chain(ARM_JOINTS.iter()).map(|s| s.to_string()).collect(),
        };
        let layout = ModalityLayout::new(modality, &names).expect("default layout names are valid");
        debug_assert_eq!(layout.expected_count(), modality.default_point_count());
        layout
    }

    pub fn modality(&self) -> Modality {
        self.modality
    }

    pub fn points(&self) -> &[PointId] {
        &self.points
    }

    pub fn expected_count(&self) -> usize {
        self.points.len()
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.by_name.get(name).copied()
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.points.iter().map(|p| p.name.as_str())
    }
}
