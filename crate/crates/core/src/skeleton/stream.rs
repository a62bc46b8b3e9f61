use std::fmt::Write as _;

use crate::geometry::Point3;

use super::{ModalityLayout, SkeletonError};

/// Frame rate assumed when a stream has too few frames to infer one:
/// a 5 s analysis window spans 100 frames.
pub const DEFAULT_FRAME_RATE_HZ: f64 = 20.0;

#[derive(Debug, Clone, PartialEq)]
pub struct SkeletonFrame {
    pub frame_index: u64,
    /// Seconds from the start of the recording.
    pub timestamp: f64,
    /// One entry per layout point, in layout order.
    pub coords: Vec<Point3>,
}

/// Time-ordered frames of one modality. Immutable once validated.
#[derive(Debug, Clone, PartialEq)]
pub struct SkeletonStream {
    layout: ModalityLayout,
    frames: Vec<SkeletonFrame>,
    frame_rate_hz: f64,
}

impl SkeletonStream {
    pub fn new(layout: ModalityLayout, frames: Vec<SkeletonFrame>, frame_rate_hz: f64) -> Result<Self, SkeletonError> {
        let stream = SkeletonStream { layout, frames, frame_rate_hz };
        stream.validate()?;
        Ok(stream)
    }

    /// Builds a stream and infers its frame rate from the timestamps.
    pub fn with_inferred_rate(layout: ModalityLayout, frames: Vec<SkeletonFrame>) -> Result<Self, SkeletonError> {
        let rate = infer_frame_rate(&frames).unwrap_or(DEFAULT_FRAME_RATE_HZ);
        Self::new(layout, frames, rate)
    }

    /// Checks every stream invariant. Errors carry the zero-based frame
    /// position of the first offending frame.
    pub fn validate(&self) -> Result<(), SkeletonError> {
        if !(self.frame_rate_hz.is_finite() && self.frame_rate_hz > 0.0) {
            return Err(SkeletonError::Validation {
                frame: None,
                message: format!("frame rate must be positive, got {}", self.frame_rate_hz),
            });
        }
        let expected = self.layout.expected_count();
        for (pos, frame) in self.frames.iter().enumerate() {
            let fail = |message: String| SkeletonError::Validation { frame: Some(pos), message };
            if frame.coords.len() != expected {
                return Err(fail(format!("frame has {} points, layout expects {expected}", frame.coords.len())));
            }
            if !(frame.timestamp.is_finite() && frame.timestamp >= 0.0) {
                return Err(fail(format!("timestamp {} is not a finite non-negative value", frame.timestamp)));
            }
            if let Some(i) = frame.coords.iter().position(|p| !p.is_finite()) {
                return Err(fail(format!("non-finite coordinate for point {}", self.layout.points()[i].name)));
            }
            if pos > 0 {
                let prev = &self.frames[pos - 1];
                if frame.frame_index <= prev.frame_index {
                    return Err(fail(format!("frame index {} does not increase (previous {})", frame.frame_index, prev.frame_index)));
                }
                if frame.timestamp <= prev.timestamp {
                    return Err(fail(format!("timestamp {} does not increase (previous {})", frame.timestamp, prev.timestamp)));
                }
            }
        }
        Ok(())
    }

    pub fn layout(&self) -> &ModalityLayout {
        &self.layout
    }

    pub fn frames(&self) -> &[SkeletonFrame] {
        &self.frames
    }

    pub fn frame_rate_hz(&self) -> f64 {
        self.frame_rate_hz
    }

    pub fn len(&self) -> usize {
        self.frames.len()
    }

    pub fn is_empty(&self) -> bool {
        self.frames.is_empty()
    }

    /// Canonical CSV text: `frame,timestamp,<name>_x,<name>_y,<name>_z,...`.
    pub fn to_csv(&self) -> String {
        let mut out = canonical_header(&self.layout);
        out.push('\n');
        for frame in &self.frames {
            write!(out, "{},{}", frame.frame_index, frame.timestamp).unwrap();
            for p in &frame.coords {
                write!(out, ",{},{},{}", p.x, p.y, p.z).unwrap();
            }
            out.push('\n');
        }
        out
    }
}

pub fn canonical_header(layout: &ModalityLayout) -> String {
    let mut header = String::from("frame,timestamp");
    for name in layout.names() {
        write!(header, ",{name}_x,{name}_y,{name}_z").unwrap();
    }
    header
}

/// `1 / median(inter-frame delta)`, or `None` with fewer than two frames.
pub fn infer_frame_rate(frames: &[SkeletonFrame]) -> Option<f64> {
    let mut deltas: Vec<f64> = frames.windows(2).map(|w| w[1].timestamp - w[0].timestamp).collect();
    if deltas.is_empty() {
        return None;
    }
    deltas.sort_by(f64::total_cmp);
    let mid = deltas.len() / 2;
    let median = if deltas.len().is_multiple_of(2) { 0.5 * (deltas[mid - 1] + deltas[mid]) } else { deltas[mid] };
    (median > 0.0).then(|| 1.0 / median)
}

/// Splits one data line into trimmed cells.
pub(crate) fn split_cells(line: &str, delimiter: Option<char>) -> Vec<&str> {
    match delimiter {
        Some(d) => line.split(d).map(str::trim).collect(),
        None => line.split_whitespace().collect(),
    }
}

/// Iterates over non-blank, non-comment lines with 1-based line numbers.
pub(crate) fn data_lines(source: &str) -> impl Iterator<Item = (usize, &str)> {
    source
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim_end_matches('\r')))
        .filter(|(_, l)| !l.trim().is_empty() && !l.trim_start().starts_with('#'))
}

pub(crate) fn parse_f64(cell: &str, line: usize, column: usize) -> Result<f64, SkeletonError> {
    cell.parse::<f64>()
        .map_err(|_| SkeletonError::Parse { line, message: format!("column {} holds non-numeric value {cell:?}", column + 1) })
}

pub(crate) fn parse_frame_index(cell: &str, line: usize, column: usize) -> Result<u64, SkeletonError> {
    if let Ok(v) = cell.parse::<u64>() {
        return Ok(v);
    }
    let v = parse_f64(cell, line, column)?;
    if v >= 0.0 && v.fract() == 0.0 && v <= u64::MAX as f64 {
        Ok(v as u64)
    } else {
        Err(SkeletonError::Parse { line, message: format!("frame index {cell:?} is not a non-negative integer") })
    }
}

/// Parses canonical skeleton CSV text against a layout.
///
/// The header must match [`canonical_header`] exactly. The frame rate is
/// inferred from the median timestamp spacing, falling back to 20 Hz for
/// single-frame files.
pub fn parse_stream(source: &str, layout: &ModalityLayout) -> Result<SkeletonStream, SkeletonError> {
    let mut lines = data_lines(source);
    let (header_line, header) = lines.next().ok_or(SkeletonError::Empty)?;
    let expected_header = canonical_header(layout);
    let header_cells = split_cells(header, Some(','));
    if header_cells.join(",") != expected_header {
        return Err(SkeletonError::Parse { line: header_line, message: format!("header does not match the {} layout", layout.modality()) });
    }
    let width = 2 + 3 * layout.expected_count();
    let mut frames = Vec::new();
    for (line, text) in lines {
        let cells = split_cells(text, Some(','));
        if cells.len() != width {
            return Err(SkeletonError::Parse { line, message: format!("expected {width} columns, found {}", cells.len()) });
        }
        let frame_index = parse_frame_index(cells[0], line, 0)?;
        let timestamp = parse_f64(cells[1], line, 1)?;
        let mut coords = Vec::with_capacity(layout.expected_count());
        for (k, chunk) in cells[2..].chunks(3).enumerate() {
            let c = 2 + 3 * k;
            coords.push(Point3::new(parse_f64(chunk[0], line, c)?, parse_f64(chunk[1], line, c + 1)?, parse_f64(chunk[2], line, c + 2)?));
        }
        if !timestamp.is_finite() || coords.iter().any(|p| !p.is_finite()) {
            return Err(SkeletonError::Validation { frame: Some(frames.len()), message: format!("line {line}: non-finite value") });
        }
        frames.push(SkeletonFrame { frame_index, timestamp, coords });
    }
    if frames.is_empty() {
        return Err(SkeletonError::Empty);
    }
    SkeletonStream::with_inferred_rate(layout.clone(), frames)
}
