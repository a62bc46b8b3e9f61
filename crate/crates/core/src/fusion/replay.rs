//! Vote-stream replay files, prediction logs and buffer-size sweeps.
//!
//! Replay CSV columns are `tick,modality,label` with an optional trailing
//! `truth` column used by sweeps. Labels are emotion codes or `-`.

use std::io::{Read, Write};

use crate::label::{EmotionLabel, NUM_CLASSES};

use super::engine::{BufferMode, FusionConfig, FusionEngine, PredictionRecord};
use super::{FusionError, Vote, VoteSource};

pub const DEFAULT_SWEEP_SIZES: [usize; 5] = [5, 10, 15, 20, 25];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ReplayEvent {
    pub vote: Vote,
    pub truth: Option<EmotionLabel>,
}

fn csv_err(e: csv::Error) -> FusionError {
    let line = e.position().map(|p| p.line() as usize).unwrap_or(0);
    FusionError::Format { line, message: e.to_string() }
}

fn io_err(e: std::io::Error) -> FusionError {
    FusionError::Format { line: 0, message: e.to_string() }
}

pub fn read_replay<R: Read>(input: R) -> Result<Vec<ReplayEvent>, FusionError> {
    let mut reader = csv::ReaderBuilder::new().comment(Some(b'#')).trim(csv::Trim::All).from_reader(input);
    let headers = reader.headers().map_err(csv_err)?.clone();
    let names: Vec<&str> = headers.iter().collect();
    let with_truth = match names.as_slice() {
        ["tick", "modality", "label"] => false,
        ["tick", "modality", "label", "truth"] => true,
        _ => {
            return Err(FusionError::Format {
                line: 1,
                message: format!("expected header tick,modality,label[,truth], found {}", names.join(",")),
            })
        }
    };
    let mut events = Vec::new();
    let mut last_tick = 0;
    for record in reader.records() {
        let record = record.map_err(csv_err)?;
        let line = record.position().map(|p| p.line() as usize).unwrap_or(0);
        let fmt = |message: String| FusionError::Format { line, message };
        let tick: u64 = record[0].parse().map_err(|_| fmt(format!("bad tick {:?}", &record[0])))?;
        if tick < last_tick {
            return Err(fmt(format!("tick {tick} goes backwards (previous {last_tick})")));
        }
        last_tick = tick;
        let source: VoteSource = record[1].parse().map_err(|e: FusionError| fmt(e.to_string()))?;
        let label = EmotionLabel::parse_optional(&record[2]).map_err(|e| fmt(e.to_string()))?;
        let truth = if with_truth { EmotionLabel::parse_optional(&record[3]).map_err(|e| fmt(e.to_string()))? } else { None };
        events.push(ReplayEvent { vote: Vote { source, label, tick }, truth });
    }
    Ok(events)
}

pub fn write_replay<W: Write>(out: W, events: &[ReplayEvent], with_truth: bool) -> Result<(), FusionError> {
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec!["tick", "modality", "label"];
    if with_truth {
        header.push("truth");
    }
    w.write_record(&header).map_err(csv_err)?;
    for e in events {
        let mut row = vec![e.vote.tick.to_string(), e.vote.source.to_string(), EmotionLabel::format_optional(e.vote.label)];
        if with_truth {
            row.push(EmotionLabel::format_optional(e.truth));
        }
        w.write_record(&row).map_err(csv_err)?;
    }
    w.flush().map_err(io_err)
}

pub fn write_prediction_log<W: Write>(out: W, predictions: &[PredictionRecord]) -> Result<(), FusionError> {
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec!["buffer_index".to_string(), "prediction".to_string()];
    header.extend((0..NUM_CLASSES).map(|i| format!("tally_{i}")));
    w.write_record(&header).map_err(csv_err)?;
    for p in predictions {
        let mut row = vec![p.buffer_index.to_string(), EmotionLabel::format_optional(p.prediction)];
        row.extend(p.tally.iter().map(u64::to_string));
        w.write_record(&row).map_err(csv_err)?;
    }
    w.flush().map_err(io_err)
}

/// Maximal runs of events sharing the same truth label. Every event must
/// carry a truth label.
pub fn segments(events: &[ReplayEvent]) -> Result<Vec<(EmotionLabel, &[ReplayEvent])>, FusionError> {
    let mut out = Vec::new();
    let mut start = 0;
    for i in 0..events.len() {
        let truth =
            events[i].truth.ok_or_else(|| FusionError::Config(format!("event {i} has no truth label; sweeps need one on every event")))?;
        let ends = i + 1 == events.len() || events[i + 1].truth != Some(truth);
        if ends {
            out.push((truth, &events[start..=i]));
            start = i + 1;
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepPoint {
    pub size: usize,
    pub predictions: usize,
    pub correct: usize,
    /// Segments too short to fill a single buffer; each counts as a miss.
    pub unfilled_segments: usize,
    pub accuracy: f64,
}

/// Fuses each truth segment separately with tumbling buffers of every
/// size and scores the emitted predictions against the segment's truth.
pub fn sweep_buffer_size(events: &[ReplayEvent], sizes: &[usize], base: &FusionConfig) -> Result<Vec<SweepPoint>, FusionError> {
    if events.is_empty() {
        return Err(FusionError::Empty);
    }
    if sizes.is_empty() {
        return Err(FusionError::Config("no buffer sizes to sweep".into()));
    }
    let segs = segments(events)?;
    let mut out = Vec::with_capacity(sizes.len());
    for &size in sizes {
        let config = FusionConfig { buffer_instances: size, mode: BufferMode::Tumbling, ..base.clone() };
        let (mut predictions, mut correct, mut unfilled) = (0, 0, 0);
        for (truth, seg) in &segs {
            let mut engine = FusionEngine::new(config.clone())?;
            let preds = engine.run(seg.iter().map(|e| e.vote));
            if preds.is_empty() {
                unfilled += 1;
            }
            predictions += preds.len();
            correct += preds.iter().filter(|p| p.prediction == Some(*truth)).count();
        }
        let scored = predictions + unfilled;
        out.push(SweepPoint { size, predictions, correct, unfilled_segments: unfilled, accuracy: correct as f64 / scored as f64 });
    }
    Ok(out)
}
