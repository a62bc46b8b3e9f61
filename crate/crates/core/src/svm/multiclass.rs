use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::label::EmotionLabel;

use super::kernel::KernelParams;
use super::smo::{train_binary_smo, BinaryModel, SmoOptions};
use super::{check_samples, Sample, SvmError};

pub const MODEL_FORMAT: &str = "emofuse-svm/1";

/// Training configuration. `gamma: None` resolves to `1/d`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SvmConfig {
    pub c: f64,
    pub gamma: Option<f64>,
    pub tolerance: f64,
    pub max_iterations: Option<usize>,
    pub standardize: bool,
}

impl Default for SvmConfig {
    fn default() -> Self {
        SvmConfig { c: 1.0, gamma: None, tolerance: super::smo::DEFAULT_TOLERANCE, max_iterations: None, standardize: true }
    }
}

impl SvmConfig {
    pub fn params_for(&self, dimension: usize) -> Result<KernelParams, SvmError> {
        let gamma = self.gamma.unwrap_or(1.0 / dimension.max(1) as f64);
        KernelParams::new(self.c, gamma)
    }
}

/// Per-dimension z-score fitted on training data. Constant dimensions keep
/// scale 1.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Standardizer {
    pub mean: Vec<f64>,
    pub scale: Vec<f64>,
}

impl Standardizer {
    pub fn identity(dimension: usize) -> Self {
        Standardizer { mean: vec![0.0; dimension], scale: vec![1.0; dimension] }
    }

    pub fn fit(rows: &[&[f64]]) -> Self {
        let d = rows.first().map_or(0, |r| r.len());
        let n = rows.len() as f64;
        let mut mean = vec![0.0; d];
        for r in rows {
            for (m, v) in mean.iter_mut().zip(r.iter()) {
                *m += v / n;
            }
        }
        let mut scale = vec![0.0; d];
        for r in rows {
            for ((s, v), m) in scale.iter_mut().zip(r.iter()).zip(&mean) {
                *s += (v - m) * (v - m) / n;
            }
        }
        for s in &mut scale {
            *s = if *s > 1e-24 { s.sqrt() } else { 1.0 };
        }
        Standardizer { mean, scale }
    }

    pub fn apply(&self, x: &[f64]) -> Result<Vec<f64>, SvmError> {
        if x.len() != self.mean.len() {
            return Err(SvmError::DimensionMismatch { expected: self.mean.len(), got: x.len() });
        }
        Ok(x.iter().zip(&self.mean).zip(&self.scale).map(|((v, m), s)| (v - m) / s).collect())
    }
}

/// One-vs-one ensemble over every label pair seen in training.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MulticlassModel {
    pub format: String,
    pub labels: Vec<EmotionLabel>,
    pub dimension: usize,
    pub params: KernelParams,
    pub standardizer: Standardizer,
    pub pairs: Vec<BinaryModel>,
}

/// Solver diagnostics per pair, in model order.
#[derive(Debug, Clone, PartialEq)]
pub struct PairReport {
    pub positive: EmotionLabel,
    pub negative: EmotionLabel,
    pub iterations: usize,
    pub converged: bool,
    pub support_vectors: usize,
    pub max_alpha: f64,
    pub min_alpha: f64,
    pub dual_residual: f64,
}

#[derive(Debug, Clone)]
pub struct Prediction {
    pub label: EmotionLabel,
    pub votes: BTreeMap<EmotionLabel, usize>,
    /// Summed |decision value| of the contests each label won.
    pub margins: BTreeMap<EmotionLabel, f64>,
}

pub fn train_multiclass(samples: &[Sample], config: &SvmConfig) -> Result<(MulticlassModel, Vec<PairReport>), SvmError> {
    let dimension = check_samples(samples)?;
    let samples: Vec<Sample> = super::smo::canonical_order(samples).into_iter().map(|i| samples[i].clone()).collect();
    let samples = samples.as_slice();
    let params = config.params_for(dimension)?;
    let mut labels: Vec<EmotionLabel> = samples.iter().map(|s| s.label).collect();
    labels.sort();
    labels.dedup();
    if labels.len() < 2 {
        return Err(SvmError::ClassCount { expected: 2, got: labels.len() });
    }
    let standardizer = if config.standardize {
        Standardizer::fit(&samples.iter().map(|s| s.features.as_slice()).collect::<Vec<_>>())
    } else {
        Standardizer::identity(dimension)
    };
    let scaled: Vec<Sample> = samples
        .iter()
        .map(|s| Ok(Sample { features: standardizer.apply(&s.features)?, label: s.label }))
        .collect::<Result<_, SvmError>>()?;
    let options = SmoOptions { tolerance: config.tolerance, max_iterations: config.max_iterations, trace_objective: false };

    let mut jobs = Vec::new();
    for (a, &la) in labels.iter().enumerate() {
        for &lb in &labels[a + 1..] {
            jobs.push((la, lb));
        }
    }
    let results: Vec<Result<(BinaryModel, PairReport), SvmError>> = std::thread::scope(|scope| {
        let handles: Vec<_> = jobs
            .iter()
            .map(|&(la, lb)| {
                let scaled = &scaled;
                let options = &options;
                scope.spawn(move || {
                    let subset: Vec<Sample> = scaled.iter().filter(|s| s.label == la || s.label == lb).cloned().collect();
                    let t = train_binary_smo(&subset, params, options)?;
                    let report = PairReport {
                        positive: la,
                        negative: lb,
                        iterations: t.iterations,
                        converged: t.converged,
                        support_vectors: t.model.support_vectors.len(),
                        max_alpha: t.alphas.iter().copied().fold(0.0, f64::max),
                        min_alpha: t.alphas.iter().copied().fold(f64::INFINITY, f64::min),
                        dual_residual: t.dual_residual(),
                    };
                    Ok((t.model, report))
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("pair training panicked")).collect()
    });
    let mut pairs = Vec::with_capacity(results.len());
    let mut reports = Vec::with_capacity(results.len());
    for r in results {
        let (m, rep) = r?;
        pairs.push(m);
        reports.push(rep);
    }
    Ok((MulticlassModel { format: MODEL_FORMAT.to_string(), labels, dimension, params, standardizer, pairs }, reports))
}

impl MulticlassModel {
    pub fn predict_detail(&self, x: &[f64]) -> Result<Prediction, SvmError> {
        let z = self.standardizer.apply(x)?;
        let mut votes: BTreeMap<EmotionLabel, usize> = self.labels.iter().map(|&l| (l, 0)).collect();
        let mut margins: BTreeMap<EmotionLabel, f64> = self.labels.iter().map(|&l| (l, 0.0)).collect();
        for pair in &self.pairs {
            let (f, winner) = pair.predict(&z)?;
            *votes.get_mut(&winner).expect("pair labels are model labels") += 1;
            *margins.get_mut(&winner).expect("pair labels are model labels") += f.abs();
        }
        let label = *self
            .labels
            .iter()
            .max_by(|a, b| votes[a].cmp(&votes[b]).then(margins[a].total_cmp(&margins[b])).then(b.cmp(a)))
            .expect("model has labels");
        Ok(Prediction { label, votes, margins })
    }

    pub fn predict(&self, x: &[f64]) -> Result<EmotionLabel, SvmError> {
        Ok(self.predict_detail(x)?.label)
    }

    pub fn accuracy(&self, samples: &[Sample]) -> Result<f64, SvmError> {
        if samples.is_empty() {
            return Err(SvmError::Empty);
        }
        let mut hit = 0usize;
        for s in samples {
            hit += usize::from(self.predict(&s.features)? == s.label);
        }
        Ok(hit as f64 / samples.len() as f64)
    }

    pub fn to_json(&self) -> Result<String, SvmError> {
        serde_json::to_string_pretty(self).map_err(|e| SvmError::Format(e.to_string()))
    }

    pub fn from_json(text: &str) -> Result<Self, SvmError> {
        let m: MulticlassModel = serde_json::from_str(text).map_err(|e| SvmError::Format(e.to_string()))?;
        m.validate()?;
        Ok(m)
    }

    pub fn validate(&self) -> Result<(), SvmError> {
        let bad = |msg: String| Err(SvmError::Format(msg));
        if self.format != MODEL_FORMAT {
            return bad(format!("unsupported model format {:?}, expected {MODEL_FORMAT:?}", self.format));
        }
        self.params.validate()?;
        let k = self.labels.len();
        if k < 2 || self.labels.windows(2).any(|w| w[0] >= w[1]) {
            return bad("labels must be at least two, sorted and distinct".into());
        }
        if self.pairs.len() != k * (k - 1) / 2 {
            return bad(format!("{} classes need {} pair models, found {}", k, k * (k - 1) / 2, self.pairs.len()));
        }
        if self.standardizer.mean.len() != self.dimension || self.standardizer.scale.len() != self.dimension {
            return bad("standardizer dimension does not match model dimension".into());
        }
        for p in &self.pairs {
            if !(self.labels.contains(&p.positive) && self.labels.contains(&p.negative) && p.positive < p.negative) {
                return bad(format!("pair {}/{} is not a sorted pair of model labels", p.positive.code(), p.negative.code()));
            }
            if p.coefficients.len() != p.support_vectors.len() || p.support_vectors.iter().any(|v| v.len() != self.dimension) {
                return bad("support vector shape mismatch".into());
            }
        }
        Ok(())
    }
}

pub fn predict_multiclass(model: &MulticlassModel, x: &[f64]) -> Result<EmotionLabel, SvmError> {
    model.predict(x)
}
