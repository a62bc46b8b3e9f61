//! Confusion matrices, per-class metrics, label mappings and comparison
//! against published reference tables.

mod compare;
mod confusion;
mod mapping;
mod metrics;
pub mod tables;

use thiserror::Error;

use crate::label::LabelError;

pub use compare::{compare_reports, CellDiff, DiffReport, Metric, PUBLISHED_TOLERANCE};
pub use confusion::{accumulate, ConfusionMatrix};
pub use mapping::{apply_label_mapping, Exclusion, ExclusionReason, LabelMapping, MappingEntry, MappingOutcome, DEFAULT_AGREEMENT_CUTOFF};
pub use metrics::{class_shares, overall_accuracy, precision_recall_f, read_reference_csv, write_metrics_csv, ClassMetrics, ReferenceRow};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EvalError {
    #[error(transparent)]
    Label(#[from] LabelError),
    #[error("confusion matrix is empty")]
    Empty,
    #[error("structural mismatch: {0}")]
    Structural(String),
    #[error("line {line}: {message}")]
    Format { line: usize, message: String },
}
