//! Threshold rule bundles: stock descriptors, min/max calibration from
//! exemplar windows, and the rule vote fed into fusion.

mod bundle;
mod calibrate;
mod vocabulary;

use thiserror::Error;

pub use bundle::{
    bundles_to_json, evaluate_bundle, evaluate_rule, load_bundles, required_descriptors, rule_vote, rule_vote_detail, BundleOutcome,
    Comparator, Interval, Measure, RuleBundle, RuleDescriptor, RuleVote,
};
pub use calibrate::{
    calibrate_tagged, calibrate_thresholds, write_calibration_report, CalibrationOptions, CalibrationRecord, DEFAULT_DEGENERATE_FLOOR,
};
pub use vocabulary::{lookup, vocabulary, VocabularyEntry};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RuleError {
    #[error("rule {rule}: descriptor {descriptor} is missing from the feature vector")]
    MissingDescriptor { rule: String, descriptor: String },
    #[error("rule {0} has no calibrated interval")]
    Uncalibrated(String),
    #[error("no exemplars tagged for bundle {0:?}")]
    NoExemplars(String),
    #[error("invalid rule: {0}")]
    Invalid(String),
    #[error("bundle file: {0}")]
    Format(String),
}
