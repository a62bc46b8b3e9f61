//! RBF support-vector classifiers: an SMO binary solver, one-vs-one
//! multiclass ensembles with stored standardization, and stratified
//! splitting and cross-validation.

mod kernel;
mod multiclass;
mod smo;
mod split;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::label::EmotionLabel;

pub use kernel::{gram_matrix, rbf_kernel, squared_distance, KernelParams};
pub use multiclass::{
    predict_multiclass, train_multiclass, MulticlassModel, PairReport, Prediction, Standardizer, SvmConfig, MODEL_FORMAT,
};
pub use smo::{predict_binary, train_binary_smo, BinaryModel, BinaryTraining, SmoOptions, DEFAULT_TOLERANCE};
pub use split::{cross_validate, split_indices, split_train_test, stratified_folds, CvReport, Split};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    pub features: Vec<f64>,
    pub label: EmotionLabel,
}

impl Sample {
    pub fn new(features: Vec<f64>, label: EmotionLabel) -> Self {
        Sample { features, label }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SvmError {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("invalid parameter: {0}")]
    InvalidParams(String),
    #[error("expected at least {expected} classes, found {got}")]
    ClassCount { expected: usize, got: usize },
    #[error("sample {0} has a non-finite feature")]
    NonFinite(usize),
    #[error("no samples")]
    Empty,
    #[error("model file: {0}")]
    Format(String),
}

/// Shared dimension of a non-empty, finite dataset.
pub(crate) fn check_samples(samples: &[Sample]) -> Result<usize, SvmError> {
    let first = samples.first().ok_or(SvmError::Empty)?;
    let d = first.features.len();
    if d == 0 {
        return Err(SvmError::InvalidParams("feature vectors are empty".into()));
    }
    for (i, s) in samples.iter().enumerate() {
        if s.features.len() != d {
            return Err(SvmError::DimensionMismatch { expected: d, got: s.features.len() });
        }
        if s.features.iter().any(|v| !v.is_finite()) {
            return Err(SvmError::NonFinite(i));
        }
    }
    Ok(d)
}
