use std::io::{Read, Write};

use crate::label::EmotionLabel;

use super::confusion::csv_err;
use super::{ConfusionMatrix, EvalError};

#[derive(Debug, Clone, PartialEq)]
pub struct ClassMetrics {
    pub label: EmotionLabel,
    pub precision: f64,
    pub recall: f64,
    pub f_score: f64,
    pub support: u64,
    /// Set when any of the three metrics had a zero denominator and was
    /// reported as 0.
    pub degenerate: bool,
}

fn ratio(num: u64, den: u64) -> (f64, bool) {
    if den == 0 {
        (0.0, true)
    } else {
        (num as f64 / den as f64, false)
    }
}

/// Per-class precision, recall and F-score for every unmasked class.
pub fn precision_recall_f(matrix: &ConfusionMatrix) -> Vec<ClassMetrics> {
    matrix
        .present_classes()
        .into_iter()
        .map(|label| {
            let hit = matrix.get(label, label);
            let (precision, dp) = ratio(hit, matrix.column_sum(label));
            let (recall, dr) = ratio(hit, matrix.row_sum(label));
            let (f_score, df) =
                if precision + recall > 0.0 { (2.0 * precision * recall / (precision + recall), false) } else { (0.0, true) };
            ClassMetrics { label, precision, recall, f_score, support: matrix.row_sum(label), degenerate: dp || dr || df }
        })
        .collect()
}

/// Trace over total.
pub fn overall_accuracy(matrix: &ConfusionMatrix) -> Result<f64, EvalError> {
    let total = matrix.total();
    if total == 0 {
        return Err(EvalError::Empty);
    }
    Ok(matrix.trace() as f64 / total as f64)
}

/// Each present class's correct predictions as a share of all counted
/// predictions.
pub fn class_shares(matrix: &ConfusionMatrix) -> Result<Vec<(EmotionLabel, f64)>, EvalError> {
    let total = matrix.total();
    if total == 0 {
        return Err(EvalError::Empty);
    }
    Ok(matrix.present_classes().into_iter().map(|l| (l, matrix.get(l, l) as f64 / total as f64)).collect())
}

pub fn write_metrics_csv<W: Write>(out: W, metrics: &[ClassMetrics]) -> Result<(), EvalError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["label", "precision", "recall", "f_score", "support", "degenerate"]).map_err(csv_err)?;
    for m in metrics {
        w.write_record([
            m.label.code().to_string(),
            format!("{:.6}", m.precision),
            format!("{:.6}", m.recall),
            format!("{:.6}", m.f_score),
            m.support.to_string(),
            m.degenerate.to_string(),
        ])
        .map_err(csv_err)?;
    }
    w.flush().map_err(|e| EvalError::Format { line: 0, message: e.to_string() })
}

/// One row of a published metrics table. The per-class accuracy column is
/// carried through but never compared.
#[derive(Debug, Clone, PartialEq)]
pub struct ReferenceRow {
    pub label: EmotionLabel,
    pub precision: f64,
    pub recall: f64,
    pub f_score: f64,
    pub accuracy: Option<f64>,
}

/// Reads `label,precision,recall,f_score[,accuracy]`; rows of `-` are
/// absent classes and are skipped.
pub fn read_reference_csv<R: Read>(input: R) -> Result<Vec<ReferenceRow>, EvalError> {
    let mut reader = csv::ReaderBuilder::new().comment(Some(b'#')).trim(csv::Trim::All).flexible(true).from_reader(input);
    let mut rows = Vec::new();
    for record in reader.records() {
        let record = record.map_err(csv_err)?;
        let line = record.position().map(|p| p.line() as usize).unwrap_or(0);
        let fmt = |message: String| EvalError::Format { line, message };
        if record.len() < 4 {
            return Err(fmt(format!("expected at least 4 columns, found {}", record.len())));
        }
        let label: EmotionLabel = record[0].parse().map_err(|e: crate::label::LabelError| fmt(e.to_string()))?;
        if record.iter().skip(1).all(|c| c == "-") {
            continue;
        }
        let num = |i: usize| record[i].parse::<f64>().map_err(|_| fmt(format!("bad value {:?}", &record[i])));
        rows.push(ReferenceRow {
            label,
            precision: num(1)?,
            recall: num(2)?,
            f_score: num(3)?,
            accuracy: if record.len() > 4 && &record[4] != "-" { Some(num(4)?) } else { None },
        });
    }
    Ok(rows)
}
