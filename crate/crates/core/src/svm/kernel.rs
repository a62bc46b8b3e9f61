use serde::{Deserialize, Serialize};

use super::SvmError;

/// Soft-margin penalty and RBF width.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KernelParams {
    pub c: f64,
    pub gamma: f64,
}

impl KernelParams {
    pub fn new(c: f64, gamma: f64) -> Result<Self, SvmError> {
        let p = KernelParams { c, gamma };
        p.validate()?;
        Ok(p)
    }

    /// `C = 1`, `gamma = 1/d`.
    pub fn default_for_dimension(dimension: usize) -> Self {
        KernelParams { c: 1.0, gamma: 1.0 / dimension.max(1) as f64 }
    }

    pub fn validate(&self) -> Result<(), SvmError> {
        if !(self.c.is_finite() && self.c > 0.0) {
            return Err(SvmError::InvalidParams(format!("C must be positive and finite, got {}", self.c)));
        }
        if !(self.gamma.is_finite() && self.gamma > 0.0) {
            return Err(SvmError::InvalidParams(format!("gamma must be positive and finite, got {}", self.gamma)));
        }
        Ok(())
    }
}

pub fn squared_distance(x: &[f64], z: &[f64]) -> Result<f64, SvmError> {
    if x.len() != z.len() {
        return Err(SvmError::DimensionMismatch { expected: x.len(), got: z.len() });
    }
    Ok(x.iter().zip(z).map(|(a, b)| (a - b) * (a - b)).sum())
}

/// `exp(-gamma * |x - z|^2)`.
pub fn rbf_kernel(x: &[f64], z: &[f64], gamma: f64) -> Result<f64, SvmError> {
    Ok((-gamma * squared_distance(x, z)?).exp())
}

/// Dense kernel matrix over `points`, row-major.
pub fn gram_matrix(points: &[Vec<f64>], gamma: f64) -> Result<Vec<f64>, SvmError> {
    let n = points.len();
    let mut k = vec![0.0; n * n];
    for i in 0..n {
        k[i * n + i] = 1.0;
        for j in (i + 1)..n {
            let v = rbf_kernel(&points[i], &points[j], gamma)?;
            k[i * n + j] = v;
            k[j * n + i] = v;
        }
    }
    Ok(k)
}
