//! Feature CSV: one row per window, one column per descriptor, with
//! optional trailing `label` and `bundle` columns.

use std::io::{Read, Write};
use std::sync::Arc;

use crate::label::EmotionLabel;

use super::{DescriptorSet, FeatureDescriptor, FeatureError, WindowFeatures};

pub const LABEL_COLUMN: &str = "label";
pub const BUNDLE_COLUMN: &str = "bundle";

#[derive(Debug, Clone, PartialEq)]
pub struct FeatureRow {
    pub features: WindowFeatures,
    pub label: Option<EmotionLabel>,
    pub bundle: Option<String>,
}

impl FeatureRow {
    pub fn new(features: WindowFeatures) -> Self {
        FeatureRow { features, label: None, bundle: None }
    }
}

fn csv_err(e: csv::Error) -> FeatureError {
    let line = e.position().map(|p| p.line() as usize).unwrap_or(0);
    FeatureError::Csv { line, message: e.to_string() }
}

/// Writes rows sharing one descriptor set. The label and bundle columns are
/// present when any row carries them.
pub fn write_feature_csv<W: Write>(out: W, rows: &[FeatureRow]) -> Result<(), FeatureError> {
    let mut w = csv::Writer::from_writer(out);
    let Some(first) = rows.first() else {
        return Ok(());
    };
    let set = first.features.descriptor_set();
    let with_label = rows.iter().any(|r| r.label.is_some());
    let with_bundle = rows.iter().any(|r| r.bundle.is_some());
    let mut header: Vec<String> = set.descriptors().iter().map(|d| d.to_string()).collect();
    if with_label {
        header.push(LABEL_COLUMN.into());
    }
    if with_bundle {
        header.push(BUNDLE_COLUMN.into());
    }
    w.write_record(&header).map_err(csv_err)?;
    for row in rows {
        if row.features.descriptors() != set.descriptors() {
            return Err(FeatureError::Domain("rows do not share one descriptor layout".into()));
        }
        let mut record: Vec<String> = row.features.values().iter().map(|v| v.to_string()).collect();
        if with_label {
            record.push(EmotionLabel::format_optional(row.label));
        }
        if with_bundle {
            record.push(row.bundle.clone().unwrap_or_default());
        }
        w.write_record(&record).map_err(csv_err)?;
    }
    w.flush().map_err(|e| FeatureError::Csv { line: 0, message: e.to_string() })?;
    Ok(())
}

/// Reads a feature CSV. Lines starting with `#` are ignored.
pub fn read_feature_csv<R: Read>(input: R) -> Result<Vec<FeatureRow>, FeatureError> {
    let mut reader = csv::ReaderBuilder::new().comment(Some(b'#')).trim(csv::Trim::All).from_reader(input);
    let headers = reader.headers().map_err(csv_err)?.clone();
    let mut descriptors = Vec::new();
    let mut value_cols = Vec::new();
    let (mut label_col, mut bundle_col) = (None, None);
    for (i, h) in headers.iter().enumerate() {
        match h {
            LABEL_COLUMN => label_col = Some(i),
            BUNDLE_COLUMN => bundle_col = Some(i),
            _ => {
                descriptors.push(h.parse::<FeatureDescriptor>()?);
                value_cols.push(i);
            }
        }
    }
    let set = Arc::new(DescriptorSet::new(descriptors.clone()));
    if set.len() != descriptors.len() {
        return Err(FeatureError::Domain("feature header repeats a descriptor".into()));
    }
    let mut rows = Vec::new();
    for (k, record) in reader.records().enumerate() {
        let record = record.map_err(csv_err)?;
        let line = record.position().map(|p| p.line() as usize).unwrap_or(k + 2);
        let values = value_cols
            .iter()
            .map(|&c| {
                record[c].parse::<f64>().map_err(|_| FeatureError::Csv { line, message: format!("non-numeric value {:?}", &record[c]) })
            })
            .collect::<Result<Vec<_>, _>>()?;
        let label = match label_col {
            Some(c) => EmotionLabel::parse_optional(&record[c]).map_err(|e| FeatureError::Csv { line, message: e.to_string() })?,
            None => None,
        };
        let bundle = bundle_col.map(|c| record[c].to_string()).filter(|s| !s.is_empty());
        let features = WindowFeatures::new(set.clone(), values, k, 0).map_err(|e| match e {
            FeatureError::Domain(m) => FeatureError::Csv { line, message: m },
            other => other,
        })?;
        rows.push(FeatureRow { features, label, bundle });
    }
    Ok(rows)
}
