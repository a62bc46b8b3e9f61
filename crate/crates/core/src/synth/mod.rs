//! Seeded synthetic data for tests, fixtures and demos.

pub mod fixtures;
mod pose;

pub use pose::{pose_bundles, pose_corpus, pose_templates, CorpusOptions, CorpusPart, PoseTemplate};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::fusion::{Column, ReplayEvent, Vote, VoteSource};
use crate::label::{EmotionLabel, NUM_CLASSES};
use crate::svm::Sample;

/// Isotropic Gaussian clusters, one per center, labelled by position in
/// `centers` (label code = index).
pub fn gaussian_blobs(centers: &[Vec<f64>], per_class: usize, sigma: f64, seed: u64) -> Vec<Sample> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let noise = Normal::new(0.0, sigma).expect("sigma must be finite and non-negative");
    let mut out = Vec::with_capacity(centers.len() * per_class);
    for (code, center) in centers.iter().enumerate() {
        let label = EmotionLabel::ALL[code];
        for _ in 0..per_class {
            out.push(Sample { features: center.iter().map(|c| c + noise.sample(&mut rng)).collect(), label });
        }
    }
    out
}

/// Three well-separated 2-D blobs.
pub fn three_blobs(per_class: usize, seed: u64) -> Vec<Sample> {
    gaussian_blobs(&[vec![0.0, 0.0], vec![4.0, 0.0], vec![0.0, 4.0]], per_class, 0.5, seed)
}

/// Same samples with labels randomly permuted among them.
pub fn shuffle_labels(samples: &[Sample], seed: u64) -> Vec<Sample> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut labels: Vec<EmotionLabel> = samples.iter().map(|s| s.label).collect();
    labels.shuffle(&mut rng);
    samples.iter().zip(labels).map(|(s, label)| Sample { features: s.features.clone(), label }).collect()
}

/// Four XOR corners: `(0,0)` and `(1,1)` are Anger, the others Happy.
pub fn xor_samples() -> Vec<Sample> {
    vec![
        Sample::new(vec![0.0, 0.0], EmotionLabel::Anger),
        Sample::new(vec![1.0, 1.0], EmotionLabel::Anger),
        Sample::new(vec![0.0, 1.0], EmotionLabel::Happy),
        Sample::new(vec![1.0, 0.0], EmotionLabel::Happy),
    ]
}

/// The ten instance columns of the worked fusion example, in source order
/// face, head, body, hand, speech, rule. Columns 4 to 8 are not printed in
/// the source table; they repeat the opening pattern.
pub fn table3_columns() -> Vec<Column> {
    use EmotionLabel::*;
    let opening = [Some(Happy), Some(Happy), Some(Fear), Some(Fear), None, Some(Fear)];
    let t3 = [Some(Disgust), Some(Disgust), Some(Fear), Some(Disgust), None, Some(Disgust)];
    let t9 = [None, None, Some(Disgust), Some(Fear), Some(Fear), Some(Fear)];
    let t10 = [Some(Fear), Some(Fear), Some(Disgust), Some(Disgust), Some(Fear), None];
    let mut cols = vec![opening, opening, t3];
    cols.extend(std::iter::repeat_n(opening, 5));
    cols.push(t9);
    cols.push(t10);
    cols
}

/// Replay events for sealed columns: one event per source per column, tick
/// = column index. Sources in `omit` emit nothing; unavailable cells are
/// explicit `-` events.
pub fn columns_to_events(columns: &[Column], omit: &[VoteSource], truth: Option<EmotionLabel>) -> Vec<ReplayEvent> {
    let mut out = Vec::new();
    for (t, col) in columns.iter().enumerate() {
        for s in VoteSource::ALL {
            if omit.contains(&s) {
                continue;
            }
            out.push(ReplayEvent { vote: Vote { source: s, label: col[s.index()], tick: t as u64 }, truth });
        }
    }
    out
}

/// Labeled vote stream for buffer-size sweeps. Each segment holds
/// `columns_per_segment` columns for one true emotion. Every cell is
/// unavailable with probability `p_missing`; otherwise, with probability
/// `p_noise`, it is replaced by a label drawn uniformly from all seven.
pub fn noisy_vote_stream(truths: &[EmotionLabel], columns_per_segment: usize, p_noise: f64, p_missing: f64, seed: u64) -> Vec<ReplayEvent> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    let mut tick = 0u64;
    for &truth in truths {
        for _ in 0..columns_per_segment {
            for s in VoteSource::ALL {
                let label = if rng.random_bool(p_missing) {
                    None
                } else if rng.random_bool(p_noise) {
                    Some(EmotionLabel::ALL[rng.random_range(0..NUM_CLASSES)])
                } else {
                    Some(truth)
                };
                out.push(ReplayEvent { vote: Vote { source: s, label, tick }, truth: Some(truth) });
            }
            tick += 1;
        }
    }
    out
}
