use serde::{Deserialize, Serialize};

use crate::label::EmotionLabel;

use super::buffer::{decide, PushOutcome, ResultBuffer, Tally};
use super::{FusionError, Vote, VoteSource, NUM_SOURCES};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BufferMode {
    /// Empty the buffer after each prediction.
    #[default]
    Tumbling,
    /// Drop only the oldest column after each prediction.
    Sliding,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FusionConfig {
    pub buffer_instances: usize,
    pub enabled_modalities: Vec<VoteSource>,
    /// Seal the open column once a vote arrives this many ticks after it
    /// opened.
    pub timeout_ticks: Option<u64>,
    pub mode: BufferMode,
}

impl Default for FusionConfig {
    fn default() -> Self {
        FusionConfig { buffer_instances: 10, enabled_modalities: VoteSource::ALL.to_vec(), timeout_ticks: None, mode: BufferMode::Tumbling }
    }
}

impl FusionConfig {
    pub fn with_buffer(mut self, instances: usize) -> Self {
        self.buffer_instances = instances;
        self
    }

    pub fn without(mut self, source: VoteSource) -> Self {
        self.enabled_modalities.retain(|s| *s != source);
        self
    }

    pub fn is_enabled(&self, source: VoteSource) -> bool {
        self.enabled_modalities.contains(&source)
    }

    pub fn validate(&self) -> Result<(), FusionError> {
        if self.buffer_instances == 0 {
            return Err(FusionError::Config("buffer_instances must be at least 1".into()));
        }
        if self.timeout_ticks == Some(0) {
            return Err(FusionError::Config("timeout_ticks must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PredictionRecord {
    /// Zero-based count of predictions emitted before this one.
    pub buffer_index: usize,
    pub prediction: Option<EmotionLabel>,
    pub tally: Tally,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AuditRecord {
    pub tick: u64,
    pub source: VoteSource,
    pub label: Option<EmotionLabel>,
    pub reason: &'static str,
}

/// Drives a result buffer from a vote stream and emits a prediction each
/// time the buffer fills.
#[derive(Debug, Clone)]
pub struct FusionEngine {
    config: FusionConfig,
    enabled: [bool; NUM_SOURCES],
    buffer: ResultBuffer,
    emitted: usize,
    audit: Vec<AuditRecord>,
}

impl FusionEngine {
    pub fn new(config: FusionConfig) -> Result<Self, FusionError> {
        config.validate()?;
        let mut enabled = [false; NUM_SOURCES];
        for s in &config.enabled_modalities {
            enabled[s.index()] = true;
        }
        let buffer = ResultBuffer::new(config.buffer_instances)?;
        Ok(FusionEngine { config, enabled, buffer, emitted: 0, audit: Vec::new() })
    }

    pub fn config(&self) -> &FusionConfig {
        &self.config
    }

    pub fn buffer(&self) -> &ResultBuffer {
        &self.buffer
    }

    pub fn audit(&self) -> &[AuditRecord] {
        &self.audit
    }

    /// Feeds one vote. Returns a prediction if sealing a column filled the
    /// buffer.
    pub fn ingest(&mut self, vote: Vote) -> Option<PredictionRecord> {
        if !self.enabled[vote.source.index()] {
            log::debug!("ignoring vote from disabled source {}", vote.source);
            self.audit.push(AuditRecord { tick: vote.tick, source: vote.source, label: vote.label, reason: "source disabled" });
            return None;
        }
        let mut emitted = None;
        if let (Some(timeout), Some(since)) = (self.config.timeout_ticks, self.buffer.open_since()) {
            if vote.tick >= since.saturating_add(timeout) && self.buffer.close_instance() {
                emitted = self.after_seal();
            }
        }
        let PushOutcome { sealed } = self.buffer.push_vote(vote);
        if sealed {
            emitted = self.after_seal();
        }
        emitted
    }

    /// Seals the open column, possibly completing the buffer.
    pub fn flush(&mut self) -> Option<PredictionRecord> {
        if self.buffer.close_instance() {
            self.after_seal()
        } else {
            None
        }
    }

    fn after_seal(&mut self) -> Option<PredictionRecord> {
        if !self.buffer.is_full() {
            return None;
        }
        let (prediction, tally) = decide(self.buffer.sealed_columns());
        let record = PredictionRecord { buffer_index: self.emitted, prediction, tally };
        self.emitted += 1;
        match self.config.mode {
            BufferMode::Tumbling => {
                // keep the open column: it already holds the vote that caused the seal
                while self.buffer.drop_oldest().is_some() {}
            }
            BufferMode::Sliding => {
                self.buffer.drop_oldest();
            }
        }
        Some(record)
    }

    /// Runs a whole stream and flushes at the end.
    pub fn run<I: IntoIterator<Item = Vote>>(&mut self, votes: I) -> Vec<PredictionRecord> {
        let mut out: Vec<PredictionRecord> = votes.into_iter().filter_map(|v| self.ingest(v)).collect();
        out.extend(self.flush());
        out
    }
}
