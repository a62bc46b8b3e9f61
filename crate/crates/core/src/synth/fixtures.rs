//! Contents of the shipped fixture files, generated from fixed seeds.

use std::f64::consts::PI;

use crate::eval::tables::{builtin_mapping, MAPPING_NAMES};
use crate::features::{write_feature_csv, FeatureDescriptor, FeatureRow, WindowFeatures};
use crate::fusion::{write_replay, ReplayEvent};
use crate::geometry::{Axis, Point3};
use crate::label::EmotionLabel;
use crate::rules::{bundles_to_json, RuleBundle, RuleDescriptor};
use crate::skeleton::{Modality, ModalityLayout, SkeletonFrame, SkeletonStream, DEFAULT_FRAME_RATE_HZ};

use super::{columns_to_events, noisy_vote_stream, pose_bundles, pose_corpus, table3_columns, three_blobs, CorpusOptions};

/// Segment truths of the noisy sweep fixture.
pub const SWEEP_TRUTHS: [EmotionLabel; 10] = {
    use EmotionLabel::*;
    [Anger, Fear, Happy, Sad, Surprise, Disgust, Neutral, Fear, Anger, Happy]
};
pub const SWEEP_COLUMNS_PER_SEGMENT: usize = 50;
pub const SWEEP_NOISE: f64 = 0.3;
pub const SWEEP_MISSING: f64 = 0.9;
pub const SWEEP_SEED: u64 = 99;

/// Labelled vote stream for buffer-size sweeps: 30% label noise, 90%
/// unavailable cells (so single columns are often undecided).
pub fn noisy_sweep_events() -> Vec<ReplayEvent> {
    noisy_vote_stream(&SWEEP_TRUTHS, SWEEP_COLUMNS_PER_SEGMENT, SWEEP_NOISE, SWEEP_MISSING, SWEEP_SEED)
}

pub const ELBOW_EXEMPLARS: [f64; 3] = [92.0, 93.5, 95.0];

pub fn elbow_descriptor() -> FeatureDescriptor {
    FeatureDescriptor::joint("l_shoulder", "l_elbow", "l_wrist")
}

pub fn elbow_bundle() -> RuleBundle {
    RuleBundle::new(EmotionLabel::Anger, "hands_on_waist", vec![RuleDescriptor::interval("R1", elbow_descriptor())], 1.0)
        .expect("valid bundle")
}

/// One 100-frame hand window with the right palm waving sideways at 1 Hz.
pub fn hand_stream() -> SkeletonStream {
    let layout = ModalityLayout::default_for(Modality::Hand);
    let rest = [
        [-0.2, 1.5, 2.5],
        [-0.4, 1.25, 2.45],
        [-0.17, 1.05, 2.5],
        [-0.15, 1.02, 2.5],
        [0.2, 1.5, 2.5],
        [0.35, 1.75, 2.5],
        [0.45, 2.0, 2.5],
        [0.47, 2.07, 2.5],
    ];
    let frames = (0..100)
        .map(|k| {
            let t = k as f64 / DEFAULT_FRAME_RATE_HZ;
            let wave = 0.1 * (2.0 * PI * t).sin();
            let coords = rest
                .iter()
                .enumerate()
                .map(|(i, p)| {
                    let dx = match i {
                        7 => wave,
                        6 => 0.5 * wave,
                        _ => 0.0,
                    };
                    Point3::new(p[0] + dx, p[1], p[2])
                })
                .collect();
            SkeletonFrame { frame_index: k, timestamp: t, coords }
        })
        .collect();
    SkeletonStream::new(layout, frames, DEFAULT_FRAME_RATE_HZ).expect("valid stream")
}

fn replay_csv(events: &[ReplayEvent], with_truth: bool) -> String {
    let mut buf = Vec::new();
    write_replay(&mut buf, events, with_truth).expect("in-memory write");
    String::from_utf8(buf).expect("utf-8")
}

fn feature_csv(rows: &[FeatureRow]) -> String {
    let mut buf = Vec::new();
    write_feature_csv(&mut buf, rows).expect("in-memory write");
    String::from_utf8(buf).expect("utf-8")
}

/// Every shipped fixture as `(relative path, contents)`.
pub fn shipped() -> Vec<(String, String)> {
    let mut files = vec![
        ("noisy_sweep.csv".to_string(), replay_csv(&noisy_sweep_events(), true)),
        ("table3_replay.csv".to_string(), replay_csv(&columns_to_events(&table3_columns(), &[], None), false)),
    ];

    let elbow: Vec<FeatureRow> = ELBOW_EXEMPLARS
        .iter()
        .map(|v| FeatureRow {
            features: WindowFeatures::from_pairs([(elbow_descriptor(), *v)]).expect("one descriptor"),
            label: Some(EmotionLabel::Anger),
            bundle: Some("hands_on_waist".into()),
        })
        .collect();
    files.push(("elbow_exemplars.csv".into(), feature_csv(&elbow)));
    files.push(("elbow_bundle.json".into(), bundles_to_json(&[elbow_bundle()]) + "\n"));

    let blob_axes = [FeatureDescriptor::coordinate("blob", Axis::X), FeatureDescriptor::coordinate("blob", Axis::Y)];
    let blobs: Vec<FeatureRow> = three_blobs(30, 5)
        .into_iter()
        .map(|s| FeatureRow {
            features: WindowFeatures::from_pairs(blob_axes.iter().cloned().zip(s.features)).expect("two descriptors"),
            label: Some(s.label),
            bundle: None,
        })
        .collect();
    files.push(("blobs.csv".into(), feature_csv(&blobs)));
    files.push(("hand_stream.csv".into(), hand_stream().to_csv()));
    files.push(("pose_bundles.json".into(), bundles_to_json(&pose_bundles()) + "\n"));

    for name in MAPPING_NAMES {
        let mapping = builtin_mapping(name).expect("shipped mapping parses");
        let mut text = String::from("action\n");
        for a in mapping.actions() {
            text.push_str(a);
            text.push('\n');
        }
        text.push_str("Juggle\n");
        files.push((format!("actions_{name}.txt"), text));
    }
    files
}

pub fn train_corpus_options() -> CorpusOptions {
    CorpusOptions::default()
}

pub fn test_corpus_options() -> CorpusOptions {
    let train = train_corpus_options();
    CorpusOptions { seed: train.seed + 1, ..train }
}

/// Canonical stream files of the pose corpus:
/// `corpus/{train,test}/<emotion>_{body,hand}.csv`.
pub fn corpus_files(train: &CorpusOptions, test: &CorpusOptions) -> Vec<(String, String)> {
    let mut files = Vec::new();
    for (split, options) in [("train", train), ("test", test)] {
        for part in pose_corpus(options) {
            let stem = part.emotion.name().to_ascii_lowercase();
            files.push((format!("corpus/{split}/{stem}_body.csv"), part.body.to_csv()));
            files.push((format!("corpus/{split}/{stem}_hand.csv"), part.hand.to_csv()));
        }
    }
    files
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::features::{extract_window_features, read_feature_csv};
    use crate::fusion::read_replay;
    use crate::skeleton::{parse_stream, Window};

    #[test]
    fn shipped_files_parse_back() {
        let files = shipped();
        let get = |n: &str| files.iter().find(|(k, _)| k == n).map(|(_, v)| v.as_str()).unwrap();
        assert_eq!(read_replay(get("noisy_sweep.csv").as_bytes()).unwrap(), noisy_sweep_events());
        assert_eq!(read_replay(get("table3_replay.csv").as_bytes()).unwrap().len(), 60);
        assert_eq!(read_feature_csv(get("elbow_exemplars.csv").as_bytes()).unwrap().len(), 3);
        assert_eq!(read_feature_csv(get("blobs.csv").as_bytes()).unwrap().len(), 90);
        let layout = ModalityLayout::default_for(Modality::Hand);
        let hand = parse_stream(get("hand_stream.csv"), &layout).unwrap();
        assert_eq!(hand.frames(), hand_stream().frames());
        assert!((hand.frame_rate_hz() - 20.0).abs() < 1e-9);
        let f = extract_window_features(&Window::new(hand.frames(), hand.frame_rate_hz()), &layout).unwrap();
        assert_eq!(f.len(), 96);
    }
}
