//! Decision-level fusion: modality votes are collected into instance
//! columns of a fixed-capacity result buffer and the majority label of a
//! full buffer is the fused prediction.

mod buffer;
mod engine;
mod replay;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::label::EmotionLabel;

pub use buffer::{decide, source_row, tally_columns, Column, PushOutcome, ResultBuffer, Tally};
pub use engine::{AuditRecord, BufferMode, FusionConfig, FusionEngine, PredictionRecord};
pub use replay::{
    read_replay, segments, sweep_buffer_size, write_prediction_log, write_replay, ReplayEvent, SweepPoint, DEFAULT_SWEEP_SIZES,
};

pub const NUM_SOURCES: usize = 6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum VoteSource {
    Face,
    Head,
    Body,
    Hand,
    Speech,
    Rule,
}

impl VoteSource {
    pub const ALL: [VoteSource; NUM_SOURCES] =
        [VoteSource::Face, VoteSource::Head, VoteSource::Body, VoteSource::Hand, VoteSource::Speech, VoteSource::Rule];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn as_str(self) -> &'static str {
        match self {
            VoteSource::Face => "face",
            VoteSource::Head => "head",
            VoteSource::Body => "body",
            VoteSource::Hand => "hand",
            VoteSource::Speech => "speech",
            VoteSource::Rule => "rule",
        }
    }
}

impl fmt::Display for VoteSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for VoteSource {
    type Err = FusionError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t = s.trim().to_ascii_lowercase();
        VoteSource::ALL.into_iter().find(|v| v.as_str() == t).ok_or_else(|| FusionError::UnknownSource(s.to_string()))
    }
}

/// One modality's output at a tick; `label: None` is an explicit
/// unavailable vote.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Vote {
    pub source: VoteSource,
    pub label: Option<EmotionLabel>,
    pub tick: u64,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FusionError {
    #[error("unknown vote source {0:?}")]
    UnknownSource(String),
    #[error("buffer not full: {sealed} of {capacity} columns sealed")]
    NotReady { sealed: usize, capacity: usize },
    #[error("invalid fusion config: {0}")]
    Config(String),
    #[error("line {line}: {message}")]
    Format { line: usize, message: String },
    #[error("vote stream is empty")]
    Empty,
}
