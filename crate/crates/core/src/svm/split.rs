use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::eval::ConfusionMatrix;
use crate::label::{EmotionLabel, NUM_CLASSES};

use super::multiclass::{train_multiclass, SvmConfig};
use super::{Sample, SvmError};

/// Index partition produced by [`split_indices`]. Both lists are sorted.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Split {
    pub train: Vec<usize>,
    pub test: Vec<usize>,
    /// Labels with a single sample, placed in train.
    pub singletons: Vec<EmotionLabel>,
}

fn by_class(labels: &[EmotionLabel]) -> [Vec<usize>; NUM_CLASSES] {
    let mut groups: [Vec<usize>; NUM_CLASSES] = Default::default();
    for (i, l) in labels.iter().enumerate() {
        groups[l.index()].push(i);
    }
    groups
}

/// Stratified split: each class contributes `round(fraction * n_c)` samples
/// to train, clamped so classes with two or more samples appear on both
/// sides.
pub fn split_indices(labels: &[EmotionLabel], fraction: f64, seed: u64) -> Result<Split, SvmError> {
    if !(fraction > 0.0 && fraction < 1.0) {
        return Err(SvmError::InvalidParams(format!("train fraction must be in (0, 1), got {fraction}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut split = Split { train: Vec::new(), test: Vec::new(), singletons: Vec::new() };
    for (code, mut group) in by_class(labels).into_iter().enumerate() {
        match group.len() {
            0 => continue,
            1 => {
                let label = EmotionLabel::ALL[code];
                log::warn!("class {} has a single sample; keeping it in the training split", label.name());
                split.singletons.push(label);
                split.train.push(group[0]);
                continue;
            }
            _ => {}
        }
        group.shuffle(&mut rng);
        let n = group.len();
        let k = ((fraction * n as f64).round() as usize).clamp(1, n - 1);
        split.train.extend_from_slice(&group[..k]);
        split.test.extend_from_slice(&group[k..]);
    }
    split.train.sort_unstable();
    split.test.sort_unstable();
    Ok(split)
}

pub fn split_train_test(samples: &[Sample], fraction: f64, seed: u64) -> Result<(Vec<Sample>, Vec<Sample>), SvmError> {
    let labels: Vec<EmotionLabel> = samples.iter().map(|s| s.label).collect();
    let split = split_indices(&labels, fraction, seed)?;
    Ok((split.train.iter().map(|&i| samples[i].clone()).collect(), split.test.iter().map(|&i| samples[i].clone()).collect()))
}

/// Fold index per sample. Each class is shuffled and dealt round-robin,
/// continuing the deal across classes so fold sizes differ by at most one.
pub fn stratified_folds(labels: &[EmotionLabel], folds: usize, seed: u64) -> Result<Vec<usize>, SvmError> {
    if folds < 2 {
        return Err(SvmError::InvalidParams(format!("need at least 2 folds, got {folds}")));
    }
    if labels.len() < folds {
        return Err(SvmError::InvalidParams(format!("{} samples cannot fill {folds} folds", labels.len())));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut assignment = vec![0; labels.len()];
    let mut next = 0;
    for mut group in by_class(labels) {
        group.shuffle(&mut rng);
        for i in group {
            assignment[i] = next % folds;
            next += 1;
        }
    }
    Ok(assignment)
}

#[derive(Debug, Clone)]
pub struct CvReport {
    pub fold_accuracies: Vec<f64>,
    pub confusion: ConfusionMatrix,
}

impl CvReport {
    pub fn mean_accuracy(&self) -> f64 {
        self.fold_accuracies.iter().sum::<f64>() / self.fold_accuracies.len() as f64
    }
}

/// Stratified k-fold cross-validation; every sample is tested exactly once.
pub fn cross_validate(samples: &[Sample], config: &SvmConfig, folds: usize, seed: u64) -> Result<CvReport, SvmError> {
    let labels: Vec<EmotionLabel> = samples.iter().map(|s| s.label).collect();
    let assignment = stratified_folds(&labels, folds, seed)?;
    let mut confusion = ConfusionMatrix::new();
    let mut fold_accuracies = Vec::with_capacity(folds);
    for fold in 0..folds {
        let train: Vec<Sample> = samples.iter().zip(&assignment).filter(|(_, &f)| f != fold).map(|(s, _)| s.clone()).collect();
        let test: Vec<&Sample> = samples.iter().zip(&assignment).filter(|(_, &f)| f == fold).map(|(s, _)| s).collect();
        let (model, _) = train_multiclass(&train, config)?;
        let mut hit = 0;
        for s in &test {
            let p = model.predict(&s.features)?;
            confusion.record(s.label, Some(p));
            hit += usize::from(p == s.label);
        }
        fold_accuracies.push(hit as f64 / test.len() as f64);
    }
    Ok(CvReport { fold_accuracies, confusion })
}
