//! Action-to-emotion label mappings gated by annotator agreement.
//!
//! Mapping files are CSV with columns `action,emotion,agreement`. An action
//! may span several rows (one per candidate emotion); `Inconclusive` in the
//! emotion column marks an action annotators could not agree on.
//! Agreement accepts `80%` or `0.8`.

use std::collections::BTreeMap;
use std::io::Read;

use crate::label::EmotionLabel;

use super::confusion::csv_err;
use super::EvalError;

/// Lowest agreement retained by default.
pub const DEFAULT_AGREEMENT_CUTOFF: f64 = 0.6;

#[derive(Debug, Clone, PartialEq)]
pub enum MappingEntry {
    Inconclusive,
    /// Candidate emotions with agreement fractions, file order.
    Emotions(Vec<(EmotionLabel, f64)>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct LabelMapping {
    /// Keyed by lowercase action name; values keep the display name.
    entries: BTreeMap<String, (String, MappingEntry)>,
    order: Vec<String>,
    pub agreement_cutoff: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExclusionReason {
    Inconclusive,
    BelowCutoff,
    UnknownAction,
}

impl ExclusionReason {
    pub fn as_str(self) -> &'static str {
        match self {
            ExclusionReason::Inconclusive => "inconclusive",
            ExclusionReason::BelowCutoff => "below_cutoff",
            ExclusionReason::UnknownAction => "unknown_action",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Exclusion {
    pub index: usize,
    pub action: String,
    pub reason: ExclusionReason,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct MappingOutcome {
    /// `(annotation index, action, emotion, agreement)`.
    pub labeled: Vec<(usize, String, EmotionLabel, f64)>,
    pub excluded: Vec<Exclusion>,
}

fn key(action: &str) -> String {
    action.trim().to_lowercase()
}

fn parse_agreement(text: &str) -> Option<f64> {
    let text = text.trim();
    let v = match text.strip_suffix('%') {
        Some(p) => p.trim().parse::<f64>().ok()? / 100.0,
        None => text.parse::<f64>().ok()?,
    };
    (0.0..=1.0).contains(&v).then_some(v)
}

impl LabelMapping {
    pub fn read_csv<R: Read>(input: R) -> Result<Self, EvalError> {
        let mut reader = csv::ReaderBuilder::new().comment(Some(b'#')).trim(csv::Trim::All).flexible(true).from_reader(input);
        let mut mapping = LabelMapping { entries: BTreeMap::new(), order: Vec::new(), agreement_cutoff: DEFAULT_AGREEMENT_CUTOFF };
        for record in reader.records() {
            let record = record.map_err(csv_err)?;
            let line = record.position().map(|p| p.line() as usize).unwrap_or(0);
            let fmt = |message: String| EvalError::Format { line, message };
            let action = record.get(0).unwrap_or("").to_string();
            if action.is_empty() {
                return Err(fmt("empty action name".into()));
            }
            let emotion = record.get(1).unwrap_or("");
            let k = key(&action);
            if !mapping.entries.contains_key(&k) {
                mapping.order.push(k.clone());
            }
            let slot = mapping.entries.entry(k).or_insert_with(|| (action.clone(), MappingEntry::Emotions(Vec::new())));
            if emotion.eq_ignore_ascii_case("inconclusive") {
                if matches!(&slot.1, MappingEntry::Emotions(v) if !v.is_empty()) {
                    return Err(fmt(format!("action {action:?} is both inconclusive and labeled")));
                }
                slot.1 = MappingEntry::Inconclusive;
                continue;
            }
            let label: EmotionLabel = emotion.parse().map_err(|e: crate::label::LabelError| fmt(e.to_string()))?;
            let agreement =
                parse_agreement(record.get(2).unwrap_or("")).ok_or_else(|| fmt(format!("bad agreement for action {action:?}")))?;
            match &mut slot.1 {
                MappingEntry::Emotions(v) => v.push((label, agreement)),
                MappingEntry::Inconclusive => return Err(fmt(format!("action {action:?} is both inconclusive and labeled"))),
            }
        }
        Ok(mapping)
    }

    pub fn with_cutoff(mut self, cutoff: f64) -> Self {
        self.agreement_cutoff = cutoff;
        self
    }

    /// Action names in file order.
    pub fn actions(&self) -> Vec<&str> {
        self.order.iter().map(|k| self.entries[k].0.as_str()).collect()
    }

    pub fn inconclusive_actions(&self) -> Vec<&str> {
        self.order.iter().filter(|k| matches!(self.entries[*k].1, MappingEntry::Inconclusive)).map(|k| self.entries[k].0.as_str()).collect()
    }

    pub fn entry(&self, action: &str) -> Option<&MappingEntry> {
        self.entries.get(&key(action)).map(|(_, e)| e)
    }

    /// The highest-agreement emotion for an action, or why it is excluded.
    /// Equal agreements resolve to the lower emotion code.
    pub fn resolve(&self, action: &str) -> Result<(EmotionLabel, f64), ExclusionReason> {
        match self.entry(action) {
            None => Err(ExclusionReason::UnknownAction),
            Some(MappingEntry::Inconclusive) => Err(ExclusionReason::Inconclusive),
            Some(MappingEntry::Emotions(candidates)) => {
                let best = candidates
                    .iter()
                    .copied()
                    .max_by(|a, b| a.1.total_cmp(&b.1).then(b.0.cmp(&a.0)))
                    .ok_or(ExclusionReason::Inconclusive)?;
                if best.1 >= self.agreement_cutoff {
                    Ok(best)
                } else {
                    Err(ExclusionReason::BelowCutoff)
                }
            }
        }
    }
}

/// Labels each annotated action, collecting excluded ones in a report.
pub fn apply_label_mapping<S: AsRef<str>>(mapping: &LabelMapping, actions: &[S]) -> MappingOutcome {
    let mut out = MappingOutcome::default();
    for (index, action) in actions.iter().enumerate() {
        let action = action.as_ref();
        match mapping.resolve(action) {
            Ok((emotion, agreement)) => out.labeled.push((index, action.to_string(), emotion, agreement)),
            Err(reason) => out.excluded.push(Exclusion { index, action: action.to_string(), reason }),
        }
    }
    out
}
