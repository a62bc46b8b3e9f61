//! Synthetic posed skeleton clips with known rule-bundle signatures.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::features::FeatureDescriptor;
use crate::geometry::{Axis, Point3};
use crate::label::EmotionLabel;
use crate::rules::{Comparator, RuleBundle, RuleDescriptor};
use crate::skeleton::{Modality, ModalityLayout, SkeletonFrame, SkeletonStream, ARM_JOINTS, DEFAULT_FRAME_RATE_HZ};

/// A static body pose in the default body layout order
/// (trunk joints, then left and right arm).
#[derive(Debug, Clone, PartialEq)]
pub struct PoseTemplate {
    pub emotion: EmotionLabel,
    pub bundle: &'static str,
    pub joints: [[f64; 3]; 12],
}

const TRUNK: [[f64; 3]; 4] = [[0.0, 1.3, 2.5], [0.0, 1.0, 2.5], [-0.15, 1.0, 2.5], [0.15, 1.0, 2.5]];

fn mirrored(trunk: [[f64; 3]; 4], left_arm: [[f64; 3]; 4], x_axis: f64) -> [[f64; 3]; 12] {
    let mut out = [[0.0; 3]; 12];
    out[..4].copy_from_slice(&trunk);
    out[4..8].copy_from_slice(&left_arm);
    for (k, p) in left_arm.iter().enumerate() {
        out[8 + k] = [2.0 * x_axis - p[0], p[1], p[2]];
    }
    out
}

/// Three poses: hands on waist (anger), arms raised (happy) and a slumped
/// stance with hanging arms (sad).
pub fn pose_templates() -> Vec<PoseTemplate> {
    let waist = mirrored(TRUNK, [[-0.2, 1.5, 2.5], [-0.4, 1.25, 2.45], [-0.17, 1.05, 2.5], [-0.15, 1.02, 2.5]], 0.0);
    let raised = mirrored(TRUNK, [[-0.2, 1.5, 2.5], [-0.35, 1.75, 2.5], [-0.45, 2.0, 2.5], [-0.47, 2.07, 2.5]], 0.0);
    let lean = 0.08;
    let slump_trunk = [[lean, 1.28, 2.45], TRUNK[1], TRUNK[2], TRUNK[3]];
    let slumped = mirrored(
        slump_trunk,
        [[-0.2 + lean, 1.45, 2.45], [-0.17 + lean, 1.18, 2.45], [-0.16 + lean, 0.92, 2.45], [-0.16 + lean, 0.85, 2.45]],
        lean,
    );
    vec![
        PoseTemplate { emotion: EmotionLabel::Anger, bundle: "hands_on_waist", joints: waist },
        PoseTemplate { emotion: EmotionLabel::Happy, bundle: "arms_raised", joints: raised },
        PoseTemplate { emotion: EmotionLabel::Sad, bundle: "slumped", joints: slumped },
    ]
}

/// Uncalibrated bundles matching [`pose_templates`].
pub fn pose_bundles() -> Vec<RuleBundle> {
    use FeatureDescriptor as F;
    let coord_y = |p: &str| F::coordinate(p, Axis::Y);
    let l_elbow = F::joint("l_shoulder", "l_elbow", "l_wrist");
    let r_elbow = F::joint("r_shoulder", "r_elbow", "r_wrist");
    let cmp = |id: &str, a: &str, c: Comparator, b: &str| RuleDescriptor::compare(id, coord_y(a), c, coord_y(b)).expect("coordinate pair");
    let waist = RuleBundle::new(
        EmotionLabel::Anger,
        "hands_on_waist",
        vec![
            RuleDescriptor::interval("R1", l_elbow.clone()),
            RuleDescriptor::interval("R2", r_elbow.clone()),
            cmp("R7", "r_wrist", Comparator::LessThan, "r_elbow"),
            RuleDescriptor::interval("W1", F::distance("l_wrist", "hip_left")),
        ],
        0.75,
    );
    let raised = RuleBundle::new(
        EmotionLabel::Happy,
        "arms_raised",
        vec![
            cmp("R7", "r_wrist", Comparator::GreaterThan, "r_elbow"),
            cmp("R8", "r_elbow", Comparator::GreaterThan, "r_shoulder"),
            RuleDescriptor::interval("R2", r_elbow.clone()),
        ],
        0.66,
    );
    let slumped = RuleBundle::new(
        EmotionLabel::Sad,
        "slumped",
        vec![
            RuleDescriptor::interval("R5", F::angle("hip_center", "spine_mid")),
            RuleDescriptor::interval("R1", l_elbow),
            RuleDescriptor::interval("R2", r_elbow),
        ],
        0.66,
    );
    [waist, raised, slumped].into_iter().map(|b| b.expect("stock bundle is valid")).collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CorpusOptions {
    pub clips_per_emotion: usize,
    pub frames_per_clip: usize,
    /// Per-clip, per-joint displacement of the pose, metres.
    pub pose_sigma: f64,
    /// Per-frame sensor noise, metres.
    pub frame_sigma: f64,
    /// Half-width of the uniform whole-body offset per clip, metres.
    pub offset_range: f64,
    pub seed: u64,
}

impl Default for CorpusOptions {
    fn default() -> Self {
        CorpusOptions { clips_per_emotion: 30, frames_per_clip: 20, pose_sigma: 0.15, frame_sigma: 0.01, offset_range: 0.3, seed: 11 }
    }
}

/// Body and hand streams for one emotion. Clips are concatenated, so a
/// tumbling window of `frames_per_clip` frames covers exactly one clip.
#[derive(Debug, Clone)]
pub struct CorpusPart {
    pub emotion: EmotionLabel,
    pub bundle: &'static str,
    pub body: SkeletonStream,
    pub hand: SkeletonStream,
}

/// Generates one [`CorpusPart`] per pose template.
pub fn pose_corpus(options: &CorpusOptions) -> Vec<CorpusPart> {
    let mut rng = ChaCha8Rng::seed_from_u64(options.seed);
    let pose_noise = Normal::new(0.0, options.pose_sigma).expect("pose sigma");
    let frame_noise = Normal::new(0.0, options.frame_sigma).expect("frame sigma");
    let body_layout = ModalityLayout::default_for(Modality::Body);
    let hand_layout = ModalityLayout::default_for(Modality::Hand);
    let hand_index: Vec<usize> = ARM_JOINTS.iter().map(|n| body_layout.index_of(n).expect("arm joint")).collect();
    let dt = 1.0 / DEFAULT_FRAME_RATE_HZ;

    pose_templates()
        .into_iter()
        .map(|template| {
            let mut body = Vec::new();
            let mut hand = Vec::new();
            for _ in 0..options.clips_per_emotion {
                let r = options.offset_range;
                let offset = if r > 0.0 { [rng.random_range(-r..r), 0.0, rng.random_range(-r..r)] } else { [0.0; 3] };
                let pose: Vec<[f64; 3]> =
                    template.joints.iter().map(|j| std::array::from_fn(|a| j[a] + offset[a] + pose_noise.sample(&mut rng))).collect();
                let sway_hz = rng.random_range(0.3..0.8);
                for _ in 0..options.frames_per_clip {
                    let k = body.len();
                    let t = k as f64 * dt;
                    let sway = 0.02 * (2.0 * std::f64::consts::PI * sway_hz * t).sin();
                    let mut jitter = |p: &[f64; 3]| {
                        Point3::new(
                            p[0] + sway + frame_noise.sample(&mut rng),
                            p[1] + frame_noise.sample(&mut rng),
                            p[2] + frame_noise.sample(&mut rng),
                        )
                    };
                    let body_coords: Vec<Point3> = pose.iter().map(&mut jitter).collect();
                    let hand_coords: Vec<Point3> = hand_index.iter().map(|&i| jitter(&pose[i])).collect();
                    body.push(SkeletonFrame { frame_index: k as u64, timestamp: t, coords: body_coords });
                    hand.push(SkeletonFrame { frame_index: k as u64, timestamp: t, coords: hand_coords });
                }
            }
            CorpusPart {
                emotion: template.emotion,
                bundle: template.bundle,
                body: SkeletonStream::new(body_layout.clone(), body, DEFAULT_FRAME_RATE_HZ).expect("generated stream is valid"),
                hand: SkeletonStream::new(hand_layout.clone(), hand, DEFAULT_FRAME_RATE_HZ).expect("generated stream is valid"),
            }
        })
        .collect()
}
