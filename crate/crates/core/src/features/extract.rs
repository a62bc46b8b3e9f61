use std::collections::HashMap;
use std::sync::Arc;

use crate::geometry::Axis;
use crate::skeleton::{ModalityLayout, Window};

use super::ops::{displacement, joint_angle, movement_frequency, pair_angle, pair_distance, velocity};
use super::{FeatureDescriptor, FeatureError};

/// An ordered descriptor list with a name index, shared between all
/// windows extracted with the same configuration.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DescriptorSet {
    list: Vec<FeatureDescriptor>,
    index: HashMap<FeatureDescriptor, usize>,
}

impl DescriptorSet {
    /// Builds a set, dropping repeated descriptors after their first
    /// occurrence.
    pub fn new(descriptors: impl IntoIterator<Item = FeatureDescriptor>) -> Self {
        let mut list = Vec::new();
        let mut index = HashMap::new();
        for d in descriptors {
            if !index.contains_key(&d) {
                index.insert(d.clone(), list.len());
                list.push(d);
            }
        }
        DescriptorSet { list, index }
    }

    pub fn len(&self) -> usize {
        self.list.len()
    }

    pub fn is_empty(&self) -> bool {
        self.list.is_empty()
    }

    pub fn position(&self, d: &FeatureDescriptor) -> Option<usize> {
        self.index.get(d).copied()
    }

    pub fn descriptors(&self) -> &[FeatureDescriptor] {
        &self.list
    }
}

/// Descriptor values for one analysis window.
#[derive(Debug, Clone, PartialEq)]
pub struct WindowFeatures {
    pub start_frame: usize,
    pub length_frames: usize,
    set: Arc<DescriptorSet>,
    values: Vec<f64>,
}

impl WindowFeatures {
    pub fn new(set: Arc<DescriptorSet>, values: Vec<f64>, start_frame: usize, length_frames: usize) -> Result<Self, FeatureError> {
        if set.len() != values.len() {
            return Err(FeatureError::Shape { descriptors: set.len(), values: values.len() });
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(FeatureError::Domain(format!("descriptor {} is not finite", set.list[i])));
        }
        Ok(WindowFeatures { start_frame, length_frames, set, values })
    }

    /// Convenience constructor from `(descriptor, value)` pairs.
    pub fn from_pairs(pairs: impl IntoIterator<Item = (FeatureDescriptor, f64)>) -> Result<Self, FeatureError> {
        let (ds, vs): (Vec<_>, Vec<_>) = pairs.into_iter().unzip();
        let set = DescriptorSet::new(ds.clone());
        if set.len() != ds.len() {
            return Err(FeatureError::Domain("repeated descriptor".into()));
        }
        Self::new(Arc::new(set), vs, 0, 0)
    }

    pub fn descriptors(&self) -> &[FeatureDescriptor] {
        self.set.descriptors()
    }

    pub fn descriptor_set(&self) -> &Arc<DescriptorSet> {
        &self.set
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn get(&self, d: &FeatureDescriptor) -> Option<f64> {
        self.set.position(d).map(|i| self.values[i])
    }

    /// Concatenates two feature sets (e.g. from different modalities of the
    /// same instant). Descriptors already present keep their first value.
    pub fn merge(&self, other: &WindowFeatures) -> WindowFeatures {
        let mut pairs: Vec<(FeatureDescriptor, f64)> = self.descriptors().iter().cloned().zip(self.values.iter().copied()).collect();
        for (d, v) in other.descriptors().iter().zip(other.values.iter()) {
            if self.set.position(d).is_none() {
                pairs.push((d.clone(), *v));
            }
        }
        let (ds, vs): (Vec<_>, Vec<_>) = pairs.into_iter().unzip();
        WindowFeatures {
            start_frame: self.start_frame,
            length_frames: self.length_frames,
            set: Arc::new(DescriptorSet::new(ds)),
            values: vs,
        }
    }
}

/// Length of the base vector for `points` layout points:
/// `3P + 2·C(P,2) + 2P`.
pub fn base_dimension(points: usize) -> usize {
    let pairs = points * points.saturating_sub(1) / 2;
    3 * points + 2 * pairs + 2 * points
}

/// The canonical descriptor order for a layout: last-frame coordinates,
/// pair distances in `(i < j)` order, pair angles in the same order, mean
/// speeds, then displacements.
pub fn canonical_descriptors(layout: &ModalityLayout) -> Vec<FeatureDescriptor> {
    let names: Vec<&str> = layout.names().collect();
    let mut out = Vec::with_capacity(base_dimension(names.len()));
    for n in &names {
        for axis in Axis::ALL {
            out.push(FeatureDescriptor::coordinate(n, axis));
        }
    }
    for i in 0..names.len() {
        for j in i + 1..names.len() {
            out.push(FeatureDescriptor::distance(names[i], names[j]));
        }
    }
    for i in 0..names.len() {
        for j in i + 1..names.len() {
            out.push(FeatureDescriptor::angle(names[i], names[j]));
        }
    }
    for n in &names {
        out.push(FeatureDescriptor::Speed { point: n.to_string() });
    }
    for n in &names {
        out.push(FeatureDescriptor::Displacement { point: n.to_string() });
    }
    out
}

/// Evaluates one descriptor over a window.
pub fn compute_descriptor(window: &Window<'_>, layout: &ModalityLayout, d: &FeatureDescriptor) -> Result<f64, FeatureError> {
    let idx = |name: &str| layout.index_of(name).ok_or_else(|| FeatureError::UnknownPoint(name.to_string()));
    let last = window.last_frame().ok_or(FeatureError::InsufficientFrames { needed: 1, got: 0 })?;
    let value = match d {
        FeatureDescriptor::Coordinate { point, axis } => last.coords[idx(point)?].get(*axis),
        FeatureDescriptor::PairDistance { a, b } => pair_distance(&last.coords[idx(a)?], &last.coords[idx(b)?])?,
        FeatureDescriptor::PairAngle { a, b } => pair_angle(&last.coords[idx(a)?], &last.coords[idx(b)?])?.degrees,
        FeatureDescriptor::JointAngle { a, vertex, c } => {
            joint_angle(&last.coords[idx(a)?], &last.coords[idx(vertex)?], &last.coords[idx(c)?])?.degrees
        }
        FeatureDescriptor::Speed { point } => velocity(&window.track(idx(point)?), window.frame_rate_hz)?.speed,
        FeatureDescriptor::VelocityComponent { point, axis } => {
            velocity(&window.track(idx(point)?), window.frame_rate_hz)?.component(*axis)
        }
        FeatureDescriptor::Displacement { point } => displacement(&window.track(idx(point)?))?,
        FeatureDescriptor::Frequency { point, axis } => {
            let p = idx(point)?;
            let positions: Vec<f64> = window.frames.iter().map(|f| f.coords[p].get(*axis)).collect();
            movement_frequency(&positions, window.frame_rate_hz)?
        }
    };
    Ok(value)
}

/// Extracts the canonical base vector for a window.
pub fn extract_window_features(window: &Window<'_>, layout: &ModalityLayout) -> Result<WindowFeatures, FeatureError> {
    let set = Arc::new(DescriptorSet::new(canonical_descriptors(layout)));
    extract_into(window, layout, set)
}

/// Extracts the base vector followed by `extra` descriptors (frequencies,
/// joint angles and velocity components requested by rules). Extras that
/// duplicate base descriptors are skipped.
pub fn extract_with_extras(
    window: &Window<'_>,
    layout: &ModalityLayout,
    extra: &[FeatureDescriptor],
) -> Result<WindowFeatures, FeatureError> {
    let set = Arc::new(descriptor_set_with_extras(layout, extra));
    extract_into(window, layout, set)
}

pub fn descriptor_set_with_extras(layout: &ModalityLayout, extra: &[FeatureDescriptor]) -> DescriptorSet {
    DescriptorSet::new(canonical_descriptors(layout).into_iter().chain(extra.iter().cloned()))
}

/// Extracts values for an existing descriptor set, so many windows can
/// share one set.
pub fn extract_into(window: &Window<'_>, layout: &ModalityLayout, set: Arc<DescriptorSet>) -> Result<WindowFeatures, FeatureError> {
    if window.frames.is_empty() {
        return Err(FeatureError::InsufficientFrames { needed: 1, got: 0 });
    }
    if let Some(f) = window.frames.iter().find(|f| f.coords.len() != layout.expected_count()) {
        return Err(FeatureError::Domain(format!(
            "frame {} has {} points, layout expects {}",
            f.frame_index,
            f.coords.len(),
            layout.expected_count()
        )));
    }
    // Per-point velocities are shared by the speed and component descriptors.
    let mut velocity_cache = HashMap::new();
    let mut values = Vec::with_capacity(set.len());
    for d in set.descriptors() {
        let v = match d {
            FeatureDescriptor::Speed { point } | FeatureDescriptor::VelocityComponent { point, .. } => {
                let p = layout.index_of(point).ok_or_else(|| FeatureError::UnknownPoint(point.clone()))?;
                let vel = match velocity_cache.get(&p) {
                    Some(v) => *v,
                    None => {
                        let v = velocity(&window.track(p), window.frame_rate_hz)?;
                        velocity_cache.insert(p, v);
                        v
                    }
                };
                match d {
                    FeatureDescriptor::VelocityComponent { axis, .. } => vel.component(*axis),
                    _ => vel.speed,
                }
            }
            _ => compute_descriptor(window, layout, d)?,
        };
        values.push(v);
    }
    WindowFeatures::new(set, values, window.start_frame, window.length_frames())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Point3;
    use crate::skeleton::{Modality, SkeletonFrame};

    fn frames(n: usize, points: usize) -> Vec<SkeletonFrame> {
        (0..n)
            .map(|i| SkeletonFrame {
                frame_index: i as u64,
                timestamp: i as f64 * 0.05,
                coords: (0..points)
                    .map(|k| Point3::new(k as f64 * 0.1 + i as f64 * 0.01, (k * k) as f64 * 0.02, 1.0 + k as f64 * 0.03))
                    .collect(),
            })
            .collect()
    }

    #[test]
    fn dimensions_follow_formula() {
        for (m, expect) in [(Modality::Hand, 96), (Modality::Head, 192)] {
            let layout = ModalityLayout::default_for(m);
            let p = layout.expected_count();
            let oracle = 3 * p + p * (p - 1) / 2 * 2 + p + p;
            assert_eq!(oracle, expect);
            let f = frames(100, p);
            let w = Window::new(&f, 20.0);
            assert_eq!(extract_window_features(&w, &layout).unwrap().len(), expect);
        }
        let toy = ModalityLayout::new(Modality::Hand, &["only"]).unwrap();
        let f = frames(10, 1);
        assert_eq!(extract_window_features(&Window::new(&f, 20.0), &toy).unwrap().len(), 5);
    }

    #[test]
    fn canonical_order() {
        let layout = ModalityLayout::new(Modality::Hand, &["a", "b", "c"]).unwrap();
        let names: Vec<String> = canonical_descriptors(&layout).iter().map(|d| d.to_string()).collect();
        assert_eq!(&names[..3], ["coord:a:x", "coord:a:y", "coord:a:z"]);
        assert_eq!(&names[9..12], ["dist:a:b", "dist:a:c", "dist:b:c"]);
        assert_eq!(&names[12..15], ["angle:a:b", "angle:a:c", "angle:b:c"]);
        assert_eq!(&names[15..], ["vel:a", "vel:b", "vel:c", "disp:a", "disp:b", "disp:c"]);
    }

    #[test]
    fn extras_append_and_dedupe() {
        let layout = ModalityLayout::new(Modality::Hand, &["a", "b", "c"]).unwrap();
        let f = frames(20, 3);
        let w = Window::new(&f, 20.0);
        let extra = vec![
            FeatureDescriptor::frequency("a", Axis::X),
            FeatureDescriptor::distance("a", "b"),
            FeatureDescriptor::joint("a", "b", "c"),
            FeatureDescriptor::VelocityComponent { point: "a".into(), axis: Axis::X },
        ];
        let wf = extract_with_extras(&w, &layout, &extra).unwrap();
        assert_eq!(wf.len(), base_dimension(3) + 3);
        assert!((wf.get(&extra[3]).unwrap() - 0.2).abs() < 1e-9);
        let bad = [FeatureDescriptor::frequency("zz", Axis::X)];
        assert!(matches!(extract_with_extras(&w, &layout, &bad), Err(FeatureError::UnknownPoint(_))));
    }

    #[test]
    fn coordinates_come_from_last_frame() {
        let layout = ModalityLayout::new(Modality::Hand, &["a"]).unwrap();
        let f = frames(5, 1);
        let wf = extract_window_features(&Window::new(&f, 20.0), &layout).unwrap();
        assert_eq!(wf.get(&FeatureDescriptor::coordinate("a", Axis::X)).unwrap(), f[4].coords[0].x);
    }

    #[test]
    fn merge_skips_duplicates() {
        let a = WindowFeatures::from_pairs([(FeatureDescriptor::distance("a", "b"), 1.0)]).unwrap();
        let b = WindowFeatures::from_pairs([(FeatureDescriptor::distance("a", "b"), 9.0), (FeatureDescriptor::distance("c", "d"), 2.0)])
            .unwrap();
        let m = a.merge(&b);
        assert_eq!(m.values(), &[1.0, 2.0]);
    }
}
