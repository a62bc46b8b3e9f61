use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::features::{FeatureDescriptor, WindowFeatures};
use crate::label::EmotionLabel;

use super::RuleError;

/// What a rule looks at: one descriptor, or an ordered pair compared
/// against each other. In JSON a single descriptor is a string and a
/// comparison is a two-element array.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Measure {
    Single(FeatureDescriptor),
    Compare([FeatureDescriptor; 2]),
}

impl Measure {
    pub fn descriptors(&self) -> Vec<&FeatureDescriptor> {
        match self {
            Measure::Single(d) => vec![d],
            Measure::Compare([a, b]) => vec![a, b],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Comparator {
    WithinInterval,
    GreaterThan,
    LessThan,
}

/// A closed interval `[min, max]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub min: f64,
    pub max: f64,
}

impl Interval {
    pub fn new(min: f64, max: f64) -> Result<Self, RuleError> {
        if !(min.is_finite() && max.is_finite()) || min > max {
            return Err(RuleError::Invalid(format!("interval [{min}, {max}] is not a finite ordered pair")));
        }
        Ok(Interval { min, max })
    }

    pub fn contains(&self, v: f64) -> bool {
        self.min <= v && v <= self.max
    }
}

#[derive(Serialize, Deserialize)]
struct RawRule {
    id: String,
    measure: Measure,
    comparator: Comparator,
    #[serde(default)]
    min: Option<f64>,
    #[serde(default)]
    max: Option<f64>,
}

/// One threshold test. Interval rules carry a calibrated `[min, max]` once
/// calibrated; comparison rules carry two descriptors and no interval.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawRule", into = "RawRule")]
pub struct RuleDescriptor {
    pub id: String,
    pub measure: Measure,
    pub comparator: Comparator,
    pub interval: Option<Interval>,
}

impl TryFrom<RawRule> for RuleDescriptor {
    type Error = RuleError;

    fn try_from(raw: RawRule) -> Result<Self, Self::Error> {
        let interval = match (raw.min, raw.max) {
            (Some(min), Some(max)) => Some(Interval::new(min, max)?),
            (None, None) => None,
            _ => return Err(RuleError::Invalid(format!("rule {}: give both min and max or neither", raw.id))),
        };
        let rule = RuleDescriptor { id: raw.id, measure: raw.measure, comparator: raw.comparator, interval };
        rule.check_shape()?;
        Ok(rule)
    }
}

impl From<RuleDescriptor> for RawRule {
    fn from(r: RuleDescriptor) -> Self {
        RawRule { id: r.id, measure: r.measure, comparator: r.comparator, min: r.interval.map(|i| i.min), max: r.interval.map(|i| i.max) }
    }
}

impl RuleDescriptor {
    /// An uncalibrated interval rule.
    pub fn interval(id: &str, descriptor: FeatureDescriptor) -> Self {
        RuleDescriptor { id: id.into(), measure: Measure::Single(descriptor), comparator: Comparator::WithinInterval, interval: None }
    }

    pub fn compare(id: &str, left: FeatureDescriptor, comparator: Comparator, right: FeatureDescriptor) -> Result<Self, RuleError> {
        let rule = RuleDescriptor { id: id.into(), measure: Measure::Compare([left, right]), comparator, interval: None };
        rule.check_shape()?;
        Ok(rule)
    }

    pub fn with_interval(mut self, min: f64, max: f64) -> Result<Self, RuleError> {
        self.interval = Some(Interval::new(min, max)?);
        self.check_shape()?;
        Ok(self)
    }

    fn check_shape(&self) -> Result<(), RuleError> {
        match (&self.measure, self.comparator) {
            (Measure::Single(_), Comparator::WithinInterval) => Ok(()),
            (Measure::Compare(_), Comparator::GreaterThan | Comparator::LessThan) if self.interval.is_none() => Ok(()),
            _ => Err(RuleError::Invalid(format!(
                "rule {}: interval rules take one descriptor, comparison rules take two and no interval",
                self.id
            ))),
        }
    }

    pub fn is_interval(&self) -> bool {
        self.comparator == Comparator::WithinInterval
    }

    /// Tests the rule against a feature vector. Boundaries are inclusive.
    pub fn evaluate(&self, features: &WindowFeatures) -> Result<bool, RuleError> {
        let value = |d: &FeatureDescriptor| {
            features.get(d).ok_or_else(|| RuleError::MissingDescriptor { rule: self.id.clone(), descriptor: d.to_string() })
        };
        match (&self.measure, self.comparator) {
            (Measure::Single(d), Comparator::WithinInterval) => {
                let interval = self.interval.ok_or_else(|| RuleError::Uncalibrated(self.id.clone()))?;
                Ok(interval.contains(value(d)?))
            }
            (Measure::Compare([a, b]), Comparator::GreaterThan) => Ok(value(a)? > value(b)?),
            (Measure::Compare([a, b]), Comparator::LessThan) => Ok(value(a)? < value(b)?),
            _ => Err(RuleError::Invalid(format!("rule {} has an inconsistent shape", self.id))),
        }
    }
}

/// Free function form of [`RuleDescriptor::evaluate`].
pub fn evaluate_rule(rule: &RuleDescriptor, features: &WindowFeatures) -> Result<bool, RuleError> {
    rule.evaluate(features)
}

fn default_min_satisfaction() -> f64 {
    1.0
}

#[derive(Serialize, Deserialize)]
struct RawBundle {
    emotion: EmotionLabel,
    name: String,
    #[serde(default = "default_min_satisfaction")]
    min_satisfaction: f64,
    rules: Vec<RuleDescriptor>,
}

/// A named pose or action: a set of rules that together vote for one
/// emotion.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawBundle", into = "RawBundle")]
pub struct RuleBundle {
    pub emotion: EmotionLabel,
    pub name: String,
    pub min_satisfaction: f64,
    pub rules: Vec<RuleDescriptor>,
}

impl TryFrom<RawBundle> for RuleBundle {
    type Error = RuleError;

    fn try_from(raw: RawBundle) -> Result<Self, Self::Error> {
        RuleBundle::new(raw.emotion, &raw.name, raw.rules, raw.min_satisfaction)
    }
}

impl From<RuleBundle> for RawBundle {
    fn from(b: RuleBundle) -> Self {
        RawBundle { emotion: b.emotion, name: b.name, min_satisfaction: b.min_satisfaction, rules: b.rules }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BundleOutcome {
    pub satisfied: usize,
    pub total: usize,
    /// `satisfied / total`.
    pub satisfaction: f64,
    pub fired: bool,
    /// Rules that could not be evaluated (missing descriptor or interval).
    pub gaps: Vec<String>,
}

impl RuleBundle {
    pub fn new(emotion: EmotionLabel, name: &str, rules: Vec<RuleDescriptor>, min_satisfaction: f64) -> Result<Self, RuleError> {
        if rules.is_empty() {
            return Err(RuleError::Invalid(format!("bundle {name:?} has no rules")));
        }
        if !(min_satisfaction > 0.0 && min_satisfaction <= 1.0) {
            return Err(RuleError::Invalid(format!("bundle {name:?}: min_satisfaction {min_satisfaction} outside (0, 1]")));
        }
        let mut ids = HashSet::new();
        for r in &rules {
            if !ids.insert(r.id.as_str()) {
                return Err(RuleError::Invalid(format!("bundle {name:?} repeats rule id {}", r.id)));
            }
            r.check_shape()?;
        }
        Ok(RuleBundle { emotion, name: name.into(), min_satisfaction, rules })
    }

    pub fn is_calibrated(&self) -> bool {
        self.rules.iter().all(|r| !r.is_interval() || r.interval.is_some())
    }

    /// Every descriptor the bundle reads.
    pub fn descriptors(&self) -> impl Iterator<Item = &FeatureDescriptor> {
        self.rules.iter().flat_map(|r| r.measure.descriptors())
    }

    /// Fraction of satisfied rules; data gaps count as unsatisfied.
    pub fn evaluate(&self, features: &WindowFeatures) -> BundleOutcome {
        let mut satisfied = 0;
        let mut gaps = Vec::new();
        for rule in &self.rules {
            match rule.evaluate(features) {
                Ok(true) => satisfied += 1,
                Ok(false) => {}
                Err(_) => gaps.push(rule.id.clone()),
            }
        }
        let total = self.rules.len();
        let satisfaction = satisfied as f64 / total as f64;
        BundleOutcome { satisfied, total, satisfaction, fired: satisfaction >= self.min_satisfaction, gaps }
    }
}

pub fn evaluate_bundle(bundle: &RuleBundle, features: &WindowFeatures) -> BundleOutcome {
    bundle.evaluate(features)
}

/// The winning bundle of a rule vote.
#[derive(Debug, Clone, PartialEq)]
pub struct RuleVote {
    pub emotion: EmotionLabel,
    pub bundle: usize,
    pub satisfaction: f64,
}

/// Picks among fired bundles by highest satisfaction, then most rules, then
/// lowest emotion code. `None` when nothing fires.
pub fn rule_vote_detail(bundles: &[RuleBundle], features: &WindowFeatures) -> Option<RuleVote> {
    let mut best: Option<(RuleVote, usize)> = None;
    for (i, b) in bundles.iter().enumerate() {
        let outcome = b.evaluate(features);
        if !outcome.fired {
            continue;
        }
        let candidate = (RuleVote { emotion: b.emotion, bundle: i, satisfaction: outcome.satisfaction }, b.rules.len());
        best = match best {
            None => Some(candidate),
            Some(current) => {
                let better = candidate
                    .0
                    .satisfaction
                    .total_cmp(&current.0.satisfaction)
                    .then(candidate.1.cmp(&current.1))
                    .then(current.0.emotion.cmp(&candidate.0.emotion))
                    .is_gt();
                Some(if better { candidate } else { current })
            }
        };
    }
    best.map(|(v, _)| v)
}

pub fn rule_vote(bundles: &[RuleBundle], features: &WindowFeatures) -> Option<EmotionLabel> {
    rule_vote_detail(bundles, features).map(|v| v.emotion)
}

/// Parses a bundle file holding one bundle object, an array, or an object
/// whose `bundles` field is an array (other fields are ignored).
pub fn load_bundles(json: &str) -> Result<Vec<RuleBundle>, RuleError> {
    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Document {
        Many(Vec<RuleBundle>),
        Wrapped { bundles: Vec<RuleBundle> },
        One(RuleBundle),
    }
    let parsed: Document = serde_json::from_str(json).map_err(|e| RuleError::Format(e.to_string()))?;
    Ok(match parsed {
        Document::Many(v) | Document::Wrapped { bundles: v } => v,
        Document::One(b) => vec![b],
    })
}

pub fn bundles_to_json(bundles: &[RuleBundle]) -> String {
    serde_json::to_string_pretty(bundles).expect("bundles serialise")
}

/// All descriptors referenced by a bundle set, in first-use order.
pub fn required_descriptors(bundles: &[RuleBundle]) -> Vec<FeatureDescriptor> {
    let mut seen = HashSet::new();
    bundles.iter().flat_map(|b| b.descriptors()).filter(|d| seen.insert((*d).clone())).cloned().collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn d(s: &str) -> FeatureDescriptor {
        s.parse().unwrap()
    }

    fn features(pairs: &[(&str, f64)]) -> WindowFeatures {
        WindowFeatures::from_pairs(pairs.iter().map(|(k, v)| (d(k), *v))).unwrap()
    }

    #[test]
    fn wrist_above_elbow() {
        let r7 = RuleDescriptor::compare("R7", d("coord:r_wrist:y"), Comparator::GreaterThan, d("coord:r_elbow:y")).unwrap();
        let f = features(&[("coord:r_wrist:y", 1.2), ("coord:r_elbow:y", 1.0)]);
        assert!(evaluate_rule(&r7, &f).unwrap());
        let below = features(&[("coord:r_wrist:y", 0.9), ("coord:r_elbow:y", 1.0)]);
        assert!(!evaluate_rule(&r7, &below).unwrap());
        let lt = RuleDescriptor::compare("R13", d("coord:r_wrist:x"), Comparator::LessThan, d("coord:r_shoulder:x")).unwrap();
        assert!(evaluate_rule(&lt, &features(&[("coord:r_wrist:x", 0.1), ("coord:r_shoulder:x", 0.2)])).unwrap());
    }

    #[test]
    fn closed_interval() {
        let r = RuleDescriptor::interval("R1", d("joint:a:b:c")).with_interval(92.0, 95.0).unwrap();
        assert!(r.evaluate(&features(&[("joint:a:b:c", 95.0)])).unwrap());
        assert!(r.evaluate(&features(&[("joint:a:b:c", 92.0)])).unwrap());
        assert!(!r.evaluate(&features(&[("joint:a:b:c", 91.99)])).unwrap());
    }

    #[test]
    fn missing_and_uncalibrated() {
        let r = RuleDescriptor::interval("R1", d("joint:a:b:c"));
        assert!(matches!(r.evaluate(&features(&[("joint:a:b:c", 1.0)])), Err(RuleError::Uncalibrated(_))));
        let r = r.with_interval(0.0, 1.0).unwrap();
        assert!(matches!(r.evaluate(&features(&[("dist:a:b", 1.0)])), Err(RuleError::MissingDescriptor { .. })));
    }

    fn four_rule_bundle(min_satisfaction: f64) -> RuleBundle {
        let rules = (0..4)
            .map(|i| RuleDescriptor::interval(&format!("R{i}"), d(&format!("dist:p{i}:q"))).with_interval(0.0, 1.0).unwrap())
            .collect();
        RuleBundle::new(EmotionLabel::Anger, "b", rules, min_satisfaction).unwrap()
    }

    #[test]
    fn bundle_satisfaction() {
        let all = features(&[("dist:p0:q", 0.5), ("dist:p1:q", 0.5), ("dist:p2:q", 0.5), ("dist:p3:q", 0.5)]);
        let three = features(&[("dist:p0:q", 0.5), ("dist:p1:q", 0.5), ("dist:p2:q", 0.5), ("dist:p3:q", 5.0)]);
        let o = evaluate_bundle(&four_rule_bundle(1.0), &all);
        assert_eq!((o.satisfaction, o.fired), (1.0, true));
        let o = evaluate_bundle(&four_rule_bundle(1.0), &three);
        assert_eq!((o.satisfaction, o.fired), (0.75, false));
        let o = evaluate_bundle(&four_rule_bundle(0.7), &three);
        assert_eq!((o.satisfaction, o.fired), (0.75, true));
        // a data gap counts as unsatisfied
        let gap = features(&[("dist:p0:q", 0.5), ("dist:p1:q", 0.5), ("dist:p2:q", 0.5)]);
        let o = evaluate_bundle(&four_rule_bundle(0.7), &gap);
        assert_eq!(o.gaps, vec!["R3".to_string()]);
        assert_eq!(o.satisfaction, 0.75);
    }

    #[test]
    fn vote_tie_breaks() {
        let rule = |id: &str, k: &str| RuleDescriptor::interval(id, d(k)).with_interval(0.0, 1.0).unwrap();
        let five: Vec<_> = (0..5).map(|i| rule(&format!("A{i}"), &format!("dist:a{i}:z"))).collect();
        let three: Vec<_> = (0..3).map(|i| rule(&format!("B{i}"), &format!("dist:b{i}:z"))).collect();
        let fear = RuleBundle::new(EmotionLabel::Fear, "five", five, 1.0).unwrap();
        let anger = RuleBundle::new(EmotionLabel::Anger, "three", three, 1.0).unwrap();
        let mut pairs: Vec<(String, f64)> = (0..5).map(|i| (format!("dist:a{i}:z"), 0.5)).collect();
        pairs.extend((0..3).map(|i| (format!("dist:b{i}:z"), 0.5)));
        let f = WindowFeatures::from_pairs(pairs.iter().map(|(k, v)| (d(k), *v))).unwrap();
        // both fire at 1.0; the 5-rule bundle wins although its emotion code is higher
        assert_eq!(rule_vote(&[anger.clone(), fear.clone()], &f), Some(EmotionLabel::Fear));
        assert_eq!(rule_vote(&[fear, anger.clone()], &f), Some(EmotionLabel::Fear));

        let mut sad = anger.clone();
        sad.emotion = EmotionLabel::Sad;
        assert_eq!(rule_vote(&[sad.clone(), anger.clone()], &f), Some(EmotionLabel::Anger));

        let nothing = features(&[("dist:zz:z", 1.0)]);
        assert_eq!(rule_vote(&[sad, anger], &nothing), None);
    }

    #[test]
    fn json_shape() {
        let json = r#"{
            "emotion": 0,
            "name": "hands_on_waist",
            "rules": [
                {"id": "R1", "measure": "joint:l_shoulder:l_elbow:l_wrist", "comparator": "within_interval", "min": 92.0, "max": 95.0},
                {"id": "R7", "measure": ["coord:r_wrist:y", "coord:r_elbow:y"], "comparator": "less_than"}
            ]
        }"#;
        let bundles = load_bundles(json).unwrap();
        assert_eq!(bundles.len(), 1);
        assert_eq!(bundles[0].min_satisfaction, 1.0);
        assert_eq!(bundles[0].rules[0].interval, Some(Interval { min: 92.0, max: 95.0 }));
        let back = load_bundles(&bundles_to_json(&bundles)).unwrap();
        assert_eq!(back, bundles);
        let wrapped = format!(r#"{{"provenance": "x", "bundles": {}}}"#, bundles_to_json(&bundles));
        assert_eq!(load_bundles(&wrapped).unwrap(), bundles);

        let bad = r#"{"emotion": 0, "name": "x", "rules": [{"id": "R1", "measure": "dist:a:b", "comparator": "greater_than"}]}"#;
        assert!(load_bundles(bad).is_err());
        let empty = r#"{"emotion": 0, "name": "x", "rules": []}"#;
        assert!(load_bundles(empty).is_err());
        let half =
            r#"{"emotion": 0, "name": "x", "rules": [{"id": "R1", "measure": "dist:a:b", "comparator": "within_interval", "min": 1.0}]}"#;
        assert!(load_bundles(half).is_err());
    }
}
