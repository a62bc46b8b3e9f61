//! Geometric descriptors over analysis windows: coordinates, pairwise
//! distances and angles, per-point velocity and displacement, and movement
//! frequency.

mod descriptor;
mod extract;
mod io;
mod ops;

use thiserror::Error;

pub use descriptor::{FeatureDescriptor, FeatureKind, Unit};
pub use extract::{
    base_dimension, canonical_descriptors, compute_descriptor, descriptor_set_with_extras, extract_into, extract_window_features,
    extract_with_extras, DescriptorSet, WindowFeatures,
};
pub use io::{read_feature_csv, write_feature_csv, FeatureRow, BUNDLE_COLUMN, LABEL_COLUMN};
pub use ops::{displacement, joint_angle, movement_frequency, pair_angle, pair_distance, velocity, Angle, Velocity};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FeatureError {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("need at least {needed} frames, got {got}")]
    InsufficientFrames { needed: usize, got: usize },
    #[error("point {0:?} is not in the layout")]
    UnknownPoint(String),
    #[error("malformed descriptor {0:?}")]
    BadDescriptor(String),
    #[error("{descriptors} descriptors but {values} values")]
    Shape { descriptors: usize, values: usize },
    #[error("feature csv line {line}: {message}")]
    Csv { line: usize, message: String },
}
