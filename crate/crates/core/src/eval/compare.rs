use std::fmt::Write as _;
use std::io::Write;

use crate::label::EmotionLabel;

use super::confusion::csv_err;
use super::{ClassMetrics, EvalError, ReferenceRow};

/// Tolerance used for checks against published tables, which print three
/// decimals.
pub const PUBLISHED_TOLERANCE: f64 = 0.002;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Metric {
    Precision,
    Recall,
    FScore,
}

impl Metric {
    pub fn as_str(self) -> &'static str {
        match self {
            Metric::Precision => "precision",
            Metric::Recall => "recall",
            Metric::FScore => "f_score",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CellDiff {
    pub label: EmotionLabel,
    pub metric: Metric,
    pub computed: f64,
    pub reference: f64,
    pub delta: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DiffReport {
    pub tolerance: f64,
    pub cells: Vec<CellDiff>,
}

impl DiffReport {
    pub fn pass(&self) -> bool {
        self.cells.iter().all(|c| c.pass)
    }

    pub fn failures(&self) -> impl Iterator<Item = &CellDiff> {
        self.cells.iter().filter(|c| !c.pass)
    }

    pub fn max_delta(&self) -> f64 {
        self.cells.iter().map(|c| c.delta).fold(0.0, f64::max)
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<(), EvalError> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["label", "metric", "computed", "reference", "delta", "pass"]).map_err(csv_err)?;
        for c in &self.cells {
            w.write_record([
                c.label.code().to_string(),
                c.metric.as_str().to_string(),
                format!("{:.6}", c.computed),
                format!("{}", c.reference),
                format!("{:.6}", c.delta),
                c.pass.to_string(),
            ])
            .map_err(csv_err)?;
        }
        w.flush().map_err(|e| EvalError::Format { line: 0, message: e.to_string() })
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        writeln!(s, "{:<9} {:<9} {:>9} {:>9} {:>9}  status", "class", "metric", "computed", "reference", "delta").unwrap();
        for c in &self.cells {
            writeln!(
                s,
                "{:<9} {:<9} {:>9.4} {:>9.3} {:>9.4}  {}",
                c.label.name(),
                c.metric.as_str(),
                c.computed,
                c.reference,
                c.delta,
                if c.pass { "ok" } else { "FAIL" }
            )
            .unwrap();
        }
        writeln!(
            s,
            "{} cells, max delta {:.4}, tolerance {}: {}",
            self.cells.len(),
            self.max_delta(),
            self.tolerance,
            if self.pass() { "PASS" } else { "FAIL" }
        )
        .unwrap();
        s
    }
}

/// Absolute per-cell deltas between computed metrics and reference values.
/// The two sides must cover the same classes.
pub fn compare_reports(computed: &[ClassMetrics], reference: &[ReferenceRow], tolerance: f64) -> Result<DiffReport, EvalError> {
    let mut ours: Vec<EmotionLabel> = computed.iter().map(|c| c.label).collect();
    let mut theirs: Vec<EmotionLabel> = reference.iter().map(|r| r.label).collect();
    ours.sort();
    theirs.sort();
    if ours != theirs {
        return Err(EvalError::Structural(format!("class sets differ: computed {ours:?}, reference {theirs:?}")));
    }
    let mut cells = Vec::new();
    for c in computed {
        let r = reference.iter().find(|r| r.label == c.label).expect("class sets match");
        for (metric, a, b) in
            [(Metric::Precision, c.precision, r.precision), (Metric::Recall, c.recall, r.recall), (Metric::FScore, c.f_score, r.f_score)]
        {
            let delta = (a - b).abs();
            cells.push(CellDiff { label: c.label, metric, computed: a, reference: b, delta, pass: delta <= tolerance });
        }
    }
    Ok(DiffReport { tolerance, cells })
}
