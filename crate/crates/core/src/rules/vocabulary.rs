//! The stock rule descriptors R1–R24, expressed over the default layouts.
//!
//! Joint angles are interior angles at the middle joint. Coordinate
//! comparisons use the right arm; bundles that need the left arm define
//! their own measures. Head and face points use the synthetic
//! `head_NN`/`face_NN` names of the default layouts.

use crate::features::FeatureDescriptor;
use crate::geometry::Axis;

use super::{Comparator, Measure, RuleDescriptor};

#[derive(Debug, Clone, PartialEq)]
pub struct VocabularyEntry {
    pub id: &'static str,
    pub summary: &'static str,
    pub measure: Measure,
    pub comparator: Comparator,
}

impl VocabularyEntry {
    /// An uncalibrated rule built from this entry.
    pub fn rule(&self) -> RuleDescriptor {
        RuleDescriptor { id: self.id.to_string(), measure: self.measure.clone(), comparator: self.comparator, interval: None }
    }
}

fn single(id: &'static str, summary: &'static str, d: FeatureDescriptor) -> VocabularyEntry {
    VocabularyEntry { id, summary, measure: Measure::Single(d), comparator: Comparator::WithinInterval }
}

fn cmp(id: &'static str, summary: &'static str, point_a: &str, point_b: &str, axis: Axis, comparator: Comparator) -> VocabularyEntry {
    VocabularyEntry {
        id,
        summary,
        measure: Measure::Compare([FeatureDescriptor::coordinate(point_a, axis), FeatureDescriptor::coordinate(point_b, axis)]),
        comparator,
    }
}

pub fn vocabulary() -> Vec<VocabularyEntry> {
    use Comparator::{GreaterThan, LessThan};
    use FeatureDescriptor as F;
    vec![
        single("R1", "left elbow angle", F::joint("l_shoulder", "l_elbow", "l_wrist")),
        single("R2", "right elbow angle", F::joint("r_shoulder", "r_elbow", "r_wrist")),
        single("R3", "left shoulder to upper arm angle", F::joint("r_shoulder", "l_shoulder", "l_elbow")),
        single("R4", "right shoulder to upper arm angle", F::joint("l_shoulder", "r_shoulder", "r_elbow")),
        single("R5", "spine inclination", F::angle("hip_center", "spine_mid")),
        single("R6", "head tilt", F::angle("head_00", "head_06")),
        cmp("R7", "wrist above elbow", "r_wrist", "r_elbow", Axis::Y, GreaterThan),
        cmp("R8", "elbow above shoulder", "r_elbow", "r_shoulder", Axis::Y, GreaterThan),
        cmp("R9", "wrist right of elbow", "r_wrist", "r_elbow", Axis::X, GreaterThan),
        cmp("R10", "elbow right of shoulder", "r_elbow", "r_shoulder", Axis::X, GreaterThan),
        cmp("R11", "wrist behind elbow", "r_wrist", "r_elbow", Axis::Z, GreaterThan),
        cmp("R12", "elbow behind shoulder", "r_elbow", "r_shoulder", Axis::Z, GreaterThan),
        cmp("R13", "wrist left of shoulder", "r_wrist", "r_shoulder", Axis::X, LessThan),
        single("R14", "head nod frequency", F::frequency("head_00", Axis::Y)),
        single("R15", "hand wave frequency", F::frequency("r_palm", Axis::X)),
        single("R16", "forward movement frequency", F::frequency("spine_mid", Axis::Z)),
        single("R17", "backward movement frequency", F::frequency("spine_mid", Axis::Z)),
        single("R18", "sideways movement frequency", F::frequency("spine_mid", Axis::X)),
        single("R19", "head shake frequency", F::frequency("head_00", Axis::X)),
        single("R20", "eyebrow to eye distance", F::distance("face_10", "face_20")),
        single("R21", "upper to lower lip distance", F::distance("face_40", "face_46")),
        single("R22", "nose tip to upper lip distance", F::distance("face_30", "face_40")),
        single("R23", "lip corner distance", F::distance("face_44", "face_50")),
        single("R24", "upper to lower eyelid distance", F::distance("face_22", "face_26")),
    ]
}

/// Looks up a stock descriptor by id (`"R7"`).
pub fn lookup(id: &str) -> Option<VocabularyEntry> {
    vocabulary().into_iter().find(|e| e.id == id)
}
