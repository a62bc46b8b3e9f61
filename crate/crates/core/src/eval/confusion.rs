use std::io::{Read, Write};

use crate::label::{EmotionLabel, NUM_CLASSES};

use super::EvalError;

/// 7×7 counts, rows = true label, columns = predicted label.
///
/// A masked row marks a class absent from the evaluation; it stays all
/// zero and is left out of per-class metrics. Fusion outputs without a
/// decision are counted separately in `no_decision`.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ConfusionMatrix {
    counts: [[u64; NUM_CLASSES]; NUM_CLASSES],
    masked: [bool; NUM_CLASSES],
    no_decision: u64,
}

impl ConfusionMatrix {
    pub fn new() -> Self {
        Self::default()
    }

    /// Builds a matrix from rows; `None` rows are masked.
    pub fn from_rows(rows: [Option<[u64; NUM_CLASSES]>; NUM_CLASSES]) -> Self {
        let mut m = Self::new();
        for (i, row) in rows.iter().enumerate() {
            match row {
                Some(r) => m.counts[i] = *r,
                None => m.masked[i] = true,
            }
        }
        m
    }

    pub fn record(&mut self, truth: EmotionLabel, predicted: Option<EmotionLabel>) {
        match predicted {
            Some(p) => {
                self.counts[truth.index()][p.index()] += 1;
                self.masked[truth.index()] = false;
            }
            None => self.no_decision += 1,
        }
    }

    /// Integer-code form of [`record`](Self::record); rejects codes outside
    /// 0..=6.
    pub fn record_codes(&mut self, truth: i64, predicted: Option<i64>) -> Result<(), EvalError> {
        let t = EmotionLabel::from_code(truth)?;
        let p = predicted.map(EmotionLabel::from_code).transpose()?;
        self.record(t, p);
        Ok(())
    }

    pub fn get(&self, truth: EmotionLabel, predicted: EmotionLabel) -> u64 {
        self.counts[truth.index()][predicted.index()]
    }

    pub fn counts(&self) -> &[[u64; NUM_CLASSES]; NUM_CLASSES] {
        &self.counts
    }

    pub fn no_decision(&self) -> u64 {
        self.no_decision
    }

    pub fn is_masked(&self, label: EmotionLabel) -> bool {
        self.masked[label.index()]
    }

    /// Masks a class. Fails if the row has counts.
    pub fn mask(&mut self, label: EmotionLabel) -> Result<(), EvalError> {
        if self.row_sum(label) > 0 {
            return Err(EvalError::Structural(format!("cannot mask {label}: row has counts")));
        }
        self.masked[label.index()] = true;
        Ok(())
    }

    /// Masks every class with no true instances.
    pub fn mask_absent(mut self) -> Self {
        for l in EmotionLabel::ALL {
            if self.row_sum(l) == 0 {
                self.masked[l.index()] = true;
            }
        }
        self
    }

    pub fn present_classes(&self) -> Vec<EmotionLabel> {
        EmotionLabel::ALL.into_iter().filter(|l| !self.is_masked(*l)).collect()
    }

    pub fn row_sum(&self, label: EmotionLabel) -> u64 {
        self.counts[label.index()].iter().sum()
    }

    pub fn column_sum(&self, label: EmotionLabel) -> u64 {
        self.counts.iter().map(|row| row[label.index()]).sum()
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().flatten().sum()
    }

    pub fn trace(&self) -> u64 {
        (0..NUM_CLASSES).map(|i| self.counts[i][i]).sum()
    }

    /// Cell-wise sum. A class stays masked only if masked in both.
    pub fn merge(&self, other: &ConfusionMatrix) -> ConfusionMatrix {
        let mut out = self.clone();
        for i in 0..NUM_CLASSES {
            for j in 0..NUM_CLASSES {
                out.counts[i][j] += other.counts[i][j];
            }
            out.masked[i] = self.masked[i] && other.masked[i];
        }
        out.no_decision += other.no_decision;
        out
    }

    /// Multiplies every cell by `k`.
    pub fn scaled(&self, k: u64) -> ConfusionMatrix {
        let mut out = self.clone();
        out.counts.iter_mut().flatten().for_each(|c| *c *= k);
        out.no_decision *= k;
        out
    }

    /// Reads `true,0,1,...,6` CSV. A row whose cells are all `-` is masked;
    /// rows may appear in any order and missing rows are masked.
    pub fn read_csv<R: Read>(input: R) -> Result<Self, EvalError> {
        let mut reader = csv::ReaderBuilder::new().comment(Some(b'#')).trim(csv::Trim::All).from_reader(input);
        let headers = reader.headers().map_err(csv_err)?.clone();
        if headers.len() != NUM_CLASSES + 1 {
            return Err(EvalError::Format { line: 1, message: format!("expected {} columns, found {}", NUM_CLASSES + 1, headers.len()) });
        }
        for (j, h) in headers.iter().skip(1).enumerate() {
            let l: EmotionLabel = h.parse().map_err(|_| EvalError::Format { line: 1, message: format!("bad column label {h:?}") })?;
            if l.index() != j {
                return Err(EvalError::Format { line: 1, message: "columns must be ordered 0..6".into() });
            }
        }
        let mut m = ConfusionMatrix { masked: [true; NUM_CLASSES], ..Default::default() };
        let mut seen = [false; NUM_CLASSES];
        for record in reader.records() {
            let record = record.map_err(csv_err)?;
            let line = record.position().map(|p| p.line() as usize).unwrap_or(0);
            let fmt = |message: String| EvalError::Format { line, message };
            let label: EmotionLabel = record[0].parse().map_err(|e: crate::label::LabelError| fmt(e.to_string()))?;
            if std::mem::replace(&mut seen[label.index()], true) {
                return Err(fmt(format!("row {label} repeated")));
            }
            let cells: Vec<&str> = record.iter().skip(1).collect();
            if cells.len() != NUM_CLASSES {
                return Err(fmt(format!("expected {NUM_CLASSES} counts, found {}", cells.len())));
            }
            if cells.iter().all(|c| *c == "-") {
                continue;
            }
            for (j, c) in cells.iter().enumerate() {
                m.counts[label.index()][j] = c.parse().map_err(|_| fmt(format!("bad count {c:?}")))?;
            }
            m.masked[label.index()] = false;
        }
        Ok(m)
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<(), EvalError> {
        let mut w = csv::Writer::from_writer(out);
        let mut header = vec!["true".to_string()];
        header.extend((0..NUM_CLASSES).map(|j| j.to_string()));
        w.write_record(&header).map_err(csv_err)?;
        for l in EmotionLabel::ALL {
            let mut row = vec![l.code().to_string()];
            if self.is_masked(l) {
                row.extend(std::iter::repeat_n("-".to_string(), NUM_CLASSES));
            } else {
                row.extend(self.counts[l.index()].iter().map(|c| c.to_string()));
            }
            w.write_record(&row).map_err(csv_err)?;
        }
        w.flush().map_err(|e| EvalError::Format { line: 0, message: e.to_string() })
    }
}

pub(crate) fn csv_err(e: csv::Error) -> EvalError {
    let line = e.position().map(|p| p.line() as usize).unwrap_or(0);
    EvalError::Format { line, message: e.to_string() }
}

/// Free function form of [`ConfusionMatrix::record`].
pub fn accumulate(matrix: &mut ConfusionMatrix, truth: EmotionLabel, predicted: Option<EmotionLabel>) {
    matrix.record(truth, predicted);
}
