//! Multimodal emotion recognition from 3D point streams.
//!
//! The pipeline windows skeleton streams ([`skeleton`]), turns windows into
//! geometric descriptors ([`features`]), votes with calibrated threshold
//! rule bundles ([`rules`]) and per-modality RBF support-vector classifiers
//! ([`svm`]), fuses the votes in a result buffer ([`fusion`]) and scores the
//! outcome with confusion-matrix metrics ([`eval`]).

pub mod eval;
pub mod features;
pub mod fusion;
pub mod geometry;
pub mod label;
pub mod rules;
pub mod skeleton;
pub mod svm;
pub mod synth;

pub use geometry::{Axis, Point3};
pub use label::{EmotionLabel, LabelError, NUM_CLASSES};
