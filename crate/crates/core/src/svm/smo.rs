//! Binary C-SVM trained by sequential minimal optimization with
//! second-order working-set selection on a precomputed Gram matrix.

use serde::{Deserialize, Serialize};

use crate::label::EmotionLabel;

use super::kernel::{gram_matrix, rbf_kernel, KernelParams};
use super::{Sample, SvmError};

/// Stopping tolerance on the maximal KKT violation.
pub const DEFAULT_TOLERANCE: f64 = 1e-3;

const TAU: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct SmoOptions {
    pub tolerance: f64,
    /// Working-pair updates allowed before giving up; `None` means `10 * n`.
    pub max_iterations: Option<usize>,
    /// Record the dual objective after every update.
    pub trace_objective: bool,
}

impl Default for SmoOptions {
    fn default() -> Self {
        SmoOptions { tolerance: DEFAULT_TOLERANCE, max_iterations: None, trace_objective: false }
    }
}

/// A trained two-class decision function. `positive` is the lower label and
/// wins when the decision value is `>= 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BinaryModel {
    pub positive: EmotionLabel,
    pub negative: EmotionLabel,
    pub params: KernelParams,
    pub support_vectors: Vec<Vec<f64>>,
    /// `alpha_i * y_i` per support vector.
    pub coefficients: Vec<f64>,
    pub bias: f64,
}

impl BinaryModel {
    pub fn dimension(&self) -> Option<usize> {
        self.support_vectors.first().map(Vec::len)
    }

    pub fn decision_value(&self, x: &[f64]) -> Result<f64, SvmError> {
        let mut f = self.bias;
        for (sv, coef) in self.support_vectors.iter().zip(&self.coefficients) {
            f += coef * rbf_kernel(sv, x, self.params.gamma)?;
        }
        Ok(f)
    }

    pub fn label_for(&self, decision: f64) -> EmotionLabel {
        if decision >= 0.0 {
            self.positive
        } else {
            self.negative
        }
    }

    pub fn predict(&self, x: &[f64]) -> Result<(f64, EmotionLabel), SvmError> {
        let f = self.decision_value(x)?;
        Ok((f, self.label_for(f)))
    }
}

/// Model plus solver diagnostics. `alphas` and `y` follow the input order.
#[derive(Debug, Clone)]
pub struct BinaryTraining {
    pub model: BinaryModel,
    pub alphas: Vec<f64>,
    pub y: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
    /// Final maximal KKT violation.
    pub gap: f64,
    pub objective_trace: Vec<f64>,
}

impl BinaryTraining {
    pub fn dual_residual(&self) -> f64 {
        self.alphas.iter().zip(&self.y).map(|(a, y)| a * y).sum::<f64>().abs()
    }
}

/// Decision value and label for `x`.
pub fn predict_binary(model: &BinaryModel, x: &[f64]) -> Result<(f64, EmotionLabel), SvmError> {
    model.predict(x)
}

/// Canonical sample order: label, then features lexicographically.
pub(crate) fn canonical_order(samples: &[Sample]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..samples.len()).collect();
    order.sort_by(|&a, &b| {
        let (sa, sb) = (&samples[a], &samples[b]);
        sa.label.cmp(&sb.label).then_with(|| {
            sa.features.iter().zip(&sb.features).map(|(x, y)| x.total_cmp(y)).find(|o| o.is_ne()).unwrap_or(std::cmp::Ordering::Equal)
        })
    });
    order
}

pub fn train_binary_smo(samples: &[Sample], params: KernelParams, options: &SmoOptions) -> Result<BinaryTraining, SvmError> {
    params.validate()?;
    if !(options.tolerance.is_finite() && options.tolerance > 0.0) {
        return Err(SvmError::InvalidParams(format!("tolerance must be positive, got {}", options.tolerance)));
    }
    let dim = super::check_samples(samples)?;
    let mut labels: Vec<EmotionLabel> = samples.iter().map(|s| s.label).collect();
    labels.sort();
    labels.dedup();
    if labels.len() != 2 {
        return Err(SvmError::ClassCount { expected: 2, got: labels.len() });
    }
    let (positive, negative) = (labels[0], labels[1]);

    let order = canonical_order(samples);
    let points: Vec<Vec<f64>> = order.iter().map(|&i| samples[i].features.clone()).collect();
    let y: Vec<f64> = order.iter().map(|&i| if samples[i].label == positive { 1.0 } else { -1.0 }).collect();
    let n = points.len();
    let k = gram_matrix(&points, params.gamma)?;
    let c = params.c;
    let max_iter = options.max_iterations.unwrap_or(10 * n).max(1);

    let mut alpha = vec![0.0; n];
    let mut grad = vec![-1.0; n];
    let q = |i: usize, j: usize| y[i] * y[j] * k[i * n + j];
    let objective = |alpha: &[f64], grad: &[f64]| -0.5 * alpha.iter().zip(grad).map(|(a, g)| a * (g - 1.0)).sum::<f64>();

    let mut trace: Vec<f64> = Vec::new();
    if options.trace_objective {
        trace.push(0.0);
    }
    let mut iterations = 0;
    let mut converged = false;
    let mut gap = f64::INFINITY;
    while iterations < max_iter {
        // i maximises -y G over the "up" set
        let mut gmax = f64::NEG_INFINITY;
        let mut i_sel = None;
        for t in 0..n {
            let up = if y[t] > 0.0 { alpha[t] < c } else { alpha[t] > 0.0 };
            if up && -y[t] * grad[t] > gmax {
                gmax = -y[t] * grad[t];
                i_sel = Some(t);
            }
        }
        let Some(i) = i_sel else {
            converged = true;
            gap = 0.0;
            break;
        };
        let mut gmax2 = f64::NEG_INFINITY;
        let mut j_sel = None;
        let mut best = f64::INFINITY;
        for t in 0..n {
            let low = if y[t] > 0.0 { alpha[t] > 0.0 } else { alpha[t] < c };
            if !low {
                continue;
            }
            let v = y[t] * grad[t];
            gmax2 = gmax2.max(v);
            let diff = gmax + v;
            if diff > 0.0 {
                let mut quad = k[i * n + i] + k[t * n + t] - 2.0 * k[i * n + t];
                if quad <= 0.0 {
                    quad = TAU;
                }
                let obj = -(diff * diff) / quad;
                if obj < best {
                    best = obj;
                    j_sel = Some(t);
                }
            }
        }
        gap = gmax + gmax2;
        let Some(j) = j_sel.filter(|_| gap >= options.tolerance) else {
            converged = true;
            break;
        };

        let (old_i, old_j) = (alpha[i], alpha[j]);
        let mut quad = k[i * n + i] + k[j * n + j] - 2.0 * k[i * n + j];
        if quad <= 0.0 {
            quad = TAU;
        }
        if y[i] != y[j] {
            let delta = (-grad[i] - grad[j]) / quad;
            let diff = alpha[i] - alpha[j];
            alpha[i] += delta;
            alpha[j] += delta;
            if diff > 0.0 {
                if alpha[j] < 0.0 {
                    alpha[j] = 0.0;
                    alpha[i] = diff;
                }
            } else if alpha[i] < 0.0 {
                alpha[i] = 0.0;
                alpha[j] = -diff;
            }
            if diff > 0.0 {
                if alpha[i] > c {
                    alpha[i] = c;
                    alpha[j] = c - diff;
                }
            } else if alpha[j] > c {
                alpha[j] = c;
                alpha[i] = c + diff;
            }
        } else {
            let delta = (grad[i] - grad[j]) / quad;
            let sum = alpha[i] + alpha[j];
            alpha[i] -= delta;
            alpha[j] += delta;
            if sum > c {
                if alpha[i] > c {
                    alpha[i] = c;
                    alpha[j] = sum - c;
                }
            } else if alpha[j] < 0.0 {
                alpha[j] = 0.0;
                alpha[i] = sum;
            }
            if sum > c {
                if alpha[j] > c {
                    alpha[j] = c;
                    alpha[i] = sum - c;
                }
            } else if alpha[i] < 0.0 {
                alpha[i] = 0.0;
                alpha[j] = sum;
            }
        }
        let (di, dj) = (alpha[i] - old_i, alpha[j] - old_j);
        for (t, g) in grad.iter_mut().enumerate() {
            *g += q(t, i) * di + q(t, j) * dj;
        }
        iterations += 1;
        if options.trace_objective {
            let w = objective(&alpha, &grad);
            let prev = *trace.last().unwrap();
            debug_assert!(w >= prev - 1e-9 * (1.0 + prev.abs()), "dual objective decreased: {prev} -> {w}");
            trace.push(w);
        }
    }
    if !converged {
        log::warn!("SMO stopped after {iterations} iterations without converging (gap {gap:.3e})");
    }

    let bias = -rho(&alpha, &grad, &y, c);
    let mut support_vectors = Vec::new();
    let mut coefficients = Vec::new();
    for t in 0..n {
        if alpha[t] > 0.0 {
            support_vectors.push(points[t].clone());
            coefficients.push(alpha[t] * y[t]);
        }
    }
    debug_assert!(support_vectors.iter().all(|v| v.len() == dim));

    let mut alphas = vec![0.0; n];
    let mut y_out = vec![0.0; n];
    for (pos, &orig) in order.iter().enumerate() {
        alphas[orig] = alpha[pos];
        y_out[orig] = y[pos];
    }
    Ok(BinaryTraining {
        model: BinaryModel { positive, negative, params, support_vectors, coefficients, bias },
        alphas,
        y: y_out,
        iterations,
        converged,
        gap,
        objective_trace: trace,
    })
}

/// Offset from free multipliers, or the midpoint of the feasible range
/// when none are free.
fn rho(alpha: &[f64], grad: &[f64], y: &[f64], c: f64) -> f64 {
    let (mut ub, mut lb) = (f64::INFINITY, f64::NEG_INFINITY);
    let (mut sum, mut free) = (0.0, 0usize);
    for t in 0..alpha.len() {
        let yg = y[t] * grad[t];
        if alpha[t] >= c {
            if y[t] < 0.0 {
                ub = ub.min(yg);
            } else {
                lb = lb.max(yg);
            }
        } else if alpha[t] <= 0.0 {
            if y[t] > 0.0 {
                ub = ub.min(yg);
            } else {
                lb = lb.max(yg);
            }
        } else {
            free += 1;
            sum += yg;
        }
    }
    if free > 0 {
        sum / free as f64
    } else {
        (ub + lb) / 2.0
    }
}
