//! Column-mapping adapter for external action-recognition corpora.
//!
//! A [`ColumnMapping`] is a small TOML document:
//!
//! ```toml
//! delimiter = "whitespace"   # or a single character such as ","
//! header_rows = 0
//! unit_scale = 0.001         # source units to meters
//! frame_rate_hz = 30.0       # or: timestamp_column = 0 (with optional time_scale)
//!
//! [[points]]
//! name = "l_shoulder"
//! x = 13
//! y = 14
//! z = 15
//! ```

use serde::{Deserialize, Serialize};

use crate::geometry::Point3;

use super::stream::{data_lines, parse_f64, parse_frame_index, split_cells};
use super::{ModalityLayout, SkeletonError, SkeletonFrame, SkeletonStream};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointColumns {
    pub name: String,
    pub x: usize,
    pub y: usize,
    pub z: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ColumnMapping {
    /// A single delimiter character, or `"whitespace"` for runs of blanks.
    #[serde(default = "default_delimiter")]
    pub delimiter: String,
    #[serde(default)]
    pub header_rows: usize,
    #[serde(default = "one")]
    pub unit_scale: f64,
    #[serde(default)]
    pub frame_column: Option<usize>,
    #[serde(default)]
    pub timestamp_column: Option<usize>,
    /// Multiplier turning the timestamp column into seconds.
    #[serde(default = "one")]
    pub time_scale: f64,
    #[serde(default)]
    pub frame_rate_hz: Option<f64>,
    pub points: Vec<PointColumns>,
}

fn default_delimiter() -> String {
    ",".to_string()
}

fn one() -> f64 {
    1.0
}

impl ColumnMapping {
    pub fn from_toml(text: &str) -> Result<Self, SkeletonError> {
        toml::from_str(text).map_err(|e| SkeletonError::Config(format!("column mapping: {e}")))
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("mapping serialises")
    }

    /// The mapping that reads a canonical skeleton CSV unchanged.
    pub fn identity(layout: &ModalityLayout) -> Self {
        ColumnMapping {
            delimiter: default_delimiter(),
            header_rows: 1,
            unit_scale: 1.0,
            frame_column: Some(0),
            timestamp_column: Some(1),
            time_scale: 1.0,
            frame_rate_hz: None,
            points: layout
                .names()
                .enumerate()
                .map(|(i, name)| PointColumns { name: name.to_string(), x: 2 + 3 * i, y: 3 + 3 * i, z: 4 + 3 * i })
                .collect(),
        }
    }

    fn delimiter_char(&self) -> Result<Option<char>, SkeletonError> {
        if self.delimiter.eq_ignore_ascii_case("whitespace") {
            return Ok(None);
        }
        let mut chars = self.delimiter.chars();
        match (chars.next(), chars.next()) {
            (Some(c), None) => Ok(Some(c)),
            _ => Err(SkeletonError::Config(format!("delimiter {:?} must be one character or \"whitespace\"", self.delimiter))),
        }
    }

    /// Resolves mapping entries to layout order.
    fn columns_for(&self, layout: &ModalityLayout) -> Result<Vec<[usize; 3]>, SkeletonError> {
        let mut slots: Vec<Option<[usize; 3]>> = vec![None; layout.expected_count()];
        for p in &self.points {
            let idx = layout
                .index_of(&p.name)
                .ok_or_else(|| SkeletonError::Config(format!("mapped point {:?} is not in the {} layout", p.name, layout.modality())))?;
            if slots[idx].replace([p.x, p.y, p.z]).is_some() {
                return Err(SkeletonError::Config(format!("point {:?} mapped twice", p.name)));
            }
        }
        slots
            .into_iter()
            .zip(layout.names())
            .map(|(slot, name)| slot.ok_or_else(|| SkeletonError::Config(format!("layout point {name:?} has no column mapping"))))
            .collect()
    }

    fn validate(&self) -> Result<(), SkeletonError> {
        if !(self.unit_scale.is_finite() && self.unit_scale > 0.0) {
            return Err(SkeletonError::Config(format!("unit_scale must be positive, got {}", self.unit_scale)));
        }
        if !(self.time_scale.is_finite() && self.time_scale > 0.0) {
            return Err(SkeletonError::Config(format!("time_scale must be positive, got {}", self.time_scale)));
        }
        match (self.timestamp_column, self.frame_rate_hz) {
            (Some(_), Some(_)) => Err(SkeletonError::Config("give either timestamp_column or frame_rate_hz, not both".into())),
            (None, None) => Err(SkeletonError::Config("mapping needs timestamp_column or frame_rate_hz".into())),
            (None, Some(rate)) if !(rate.is_finite() && rate > 0.0) => {
                Err(SkeletonError::Config(format!("frame_rate_hz must be positive, got {rate}")))
            }
            _ => Ok(()),
        }
    }
}

/// Reads an external corpus file through a column mapping, producing a
/// stream in the target layout with coordinates in meters.
pub fn adapt_corpus(source: &str, mapping: &ColumnMapping, layout: &ModalityLayout) -> Result<SkeletonStream, SkeletonError> {
    mapping.validate()?;
    let delimiter = mapping.delimiter_char()?;
    let columns = mapping.columns_for(layout)?;

    let mut frames = Vec::new();
    for (ordinal, (line, text)) in data_lines(source).skip(mapping.header_rows).enumerate() {
        let cells = split_cells(text, delimiter);
        let cell = |col: usize| -> Result<&str, SkeletonError> {
            cells.get(col).copied().ok_or_else(|| SkeletonError::Mapping {
                line,
                message: format!("mapping references column {col} but the row has {} columns", cells.len()),
            })
        };
        let frame_index = match mapping.frame_column {
            Some(c) => parse_frame_index(cell(c)?, line, c)?,
            None => ordinal as u64,
        };
        let timestamp = match (mapping.timestamp_column, mapping.frame_rate_hz) {
            (Some(c), _) => parse_f64(cell(c)?, line, c)? * mapping.time_scale,
            (None, Some(rate)) => ordinal as f64 / rate,
            (None, None) => unreachable!("validated"),
        };
        let mut coords = Vec::with_capacity(columns.len());
        for &[cx, cy, cz] in &columns {
            let p = Point3::new(parse_f64(cell(cx)?, line, cx)?, parse_f64(cell(cy)?, line, cy)?, parse_f64(cell(cz)?, line, cz)?);
            coords.push(if mapping.unit_scale == 1.0 { p } else { p.scale(mapping.unit_scale) });
        }
        if !timestamp.is_finite() || coords.iter().any(|p| !p.is_finite()) {
            return Err(SkeletonError::Validation { frame: Some(frames.len()), message: format!("line {line}: non-finite value") });
        }
        frames.push(SkeletonFrame { frame_index, timestamp, coords });
    }
    if frames.is_empty() {
        return Err(SkeletonError::Empty);
    }
    match mapping.frame_rate_hz {
        Some(rate) => SkeletonStream::new(layout.clone(), frames, rate),
        None => SkeletonStream::with_inferred_rate(layout.clone(), frames),
    }
}
