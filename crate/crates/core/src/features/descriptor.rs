use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::geometry::Axis;

use super::FeatureError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FeatureKind {
    Coordinate,
    PairDistance,
    PairAngle,
    Velocity,
    Displacement,
    Frequency,
    JointAngle,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Unit {
    Meters,
    Degrees,
    MetersPerSecond,
    Hertz,
}

impl Unit {
    pub fn as_str(self) -> &'static str {
        match self {
            Unit::Meters => "m",
            Unit::Degrees => "deg",
            Unit::MetersPerSecond => "m/s",
            Unit::Hertz => "Hz",
        }
    }
}

/// One named geometric measurement over a window.
///
/// The textual form doubles as the CSV column name and the rule-file
/// measure reference:
///
/// | form                 | meaning                                          |
/// |----------------------|--------------------------------------------------|
/// | `coord:p:x`          | coordinate of `p` in the window's last frame     |
/// | `dist:a:b`           | distance between `a` and `b` in the last frame   |
/// | `angle:a:b`          | angle of `a→b` with the horizontal (x–y plane)   |
/// | `joint:a:v:c`        | interior angle at `v` of the chain `a–v–c`       |
/// | `vel:p`              | mean speed of `p`                                |
/// | `vel:p:x`            | mean signed velocity of `p` along one axis       |
/// | `disp:p`             | distance between first and last position of `p`  |
/// | `freq:p:y`           | oscillation frequency of `p` along one axis      |
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum FeatureDescriptor {
    Coordinate { point: String, axis: Axis },
    PairDistance { a: String, b: String },
    PairAngle { a: String, b: String },
    JointAngle { a: String, vertex: String, c: String },
    Speed { point: String },
    VelocityComponent { point: String, axis: Axis },
    Displacement { point: String },
    Frequency { point: String, axis: Axis },
}

impl FeatureDescriptor {
    pub fn coordinate(point: &str, axis: Axis) -> Self {
        FeatureDescriptor::Coordinate { point: point.into(), axis }
    }

    pub fn distance(a: &str, b: &str) -> Self {
        FeatureDescriptor::PairDistance { a: a.into(), b: b.into() }
    }

    pub fn angle(a: &str, b: &str) -> Self {
        FeatureDescriptor::PairAngle { a: a.into(), b: b.into() }
    }

    pub fn joint(a: &str, vertex: &str, c: &str) -> Self {
        FeatureDescriptor::JointAngle { a: a.into(), vertex: vertex.into(), c: c.into() }
    }

    pub fn frequency(point: &str, axis: Axis) -> Self {
        FeatureDescriptor::Frequency { point: point.into(), axis }
    }

    pub fn kind(&self) -> FeatureKind {
        match self {
            FeatureDescriptor::Coordinate { .. } => FeatureKind::Coordinate,
            FeatureDescriptor::PairDistance { .. } => FeatureKind::PairDistance,
            FeatureDescriptor::PairAngle { .. } => FeatureKind::PairAngle,
            FeatureDescriptor::JointAngle { .. } => FeatureKind::JointAngle,
            FeatureDescriptor::Speed { .. } | FeatureDescriptor::VelocityComponent { .. } => FeatureKind::Velocity,
            FeatureDescriptor::Displacement { .. } => FeatureKind::Displacement,
            FeatureDescriptor::Frequency { .. } => FeatureKind::Frequency,
        }
    }

    pub fn unit(&self) -> Unit {
        match self.kind() {
            FeatureKind::Coordinate | FeatureKind::PairDistance | FeatureKind::Displacement => Unit::Meters,
            FeatureKind::PairAngle | FeatureKind::JointAngle => Unit::Degrees,
            FeatureKind::Velocity => Unit::MetersPerSecond,
            FeatureKind::Frequency => Unit::Hertz,
        }
    }

    pub fn operands(&self) -> Vec<&str> {
        match self {
            FeatureDescriptor::Coordinate { point, .. }
            | FeatureDescriptor::Speed { point }
            | FeatureDescriptor::VelocityComponent { point, .. }
            | FeatureDescriptor::Displacement { point }
            | FeatureDescriptor::Frequency { point, .. } => vec![point],
            FeatureDescriptor::PairDistance { a, b } | FeatureDescriptor::PairAngle { a, b } => vec![a, b],
            FeatureDescriptor::JointAngle { a, vertex, c } => vec![a, vertex, c],
        }
    }
}

impl fmt::Display for FeatureDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FeatureDescriptor::Coordinate { point, axis } => write!(f, "coord:{point}:{}", axis.as_str()),
            FeatureDescriptor::PairDistance { a, b } => write!(f, "dist:{a}:{b}"),
            FeatureDescriptor::PairAngle { a, b } => write!(f, "angle:{a}:{b}"),
            FeatureDescriptor::JointAngle { a, vertex, c } => write!(f, "joint:{a}:{vertex}:{c}"),
            FeatureDescriptor::Speed { point } => write!(f, "vel:{point}"),
            FeatureDescriptor::VelocityComponent { point, axis } => write!(f, "vel:{point}:{}", axis.as_str()),
            FeatureDescriptor::Displacement { point } => write!(f, "disp:{point}"),
            FeatureDescriptor::Frequency { point, axis } => write!(f, "freq:{point}:{}", axis.as_str()),
        }
    }
}

impl FromStr for FeatureDescriptor {
    type Err = FeatureError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || FeatureError::BadDescriptor(s.to_string());
        let parts: Vec<&str> = s.trim().split(':').collect();
        if parts.iter().skip(1).any(|p| p.is_empty()) {
            return Err(bad());
        }
        let axis = |t: &str| Axis::parse(t).ok_or_else(bad);
        let d = match parts.as_slice() {
            ["coord", p, ax] => FeatureDescriptor::Coordinate { point: p.to_string(), axis: axis(ax)? },
            ["dist", a, b] if a != b => FeatureDescriptor::distance(a, b),
            ["angle", a, b] if a != b => FeatureDescriptor::angle(a, b),
            ["joint", a, v, c] if a != v && v != c && a != c => FeatureDescriptor::joint(a, v, c),
            ["vel", p] => FeatureDescriptor::Speed { point: p.to_string() },
            ["vel", p, ax] => FeatureDescriptor::VelocityComponent { point: p.to_string(), axis: axis(ax)? },
            ["disp", p] => FeatureDescriptor::Displacement { point: p.to_string() },
            ["freq", p, ax] => FeatureDescriptor::Frequency { point: p.to_string(), axis: axis(ax)? },
            _ => return Err(bad()),
        };
        Ok(d)
    }
}

impl Serialize for FeatureDescriptor {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for FeatureDescriptor {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn text_form_round_trips() {
        for text in
            ["coord:l_wrist:y", "dist:a:b", "angle:a:b", "joint:l_shoulder:l_elbow:l_wrist", "vel:p", "vel:p:z", "disp:p", "freq:head_00:y"]
        {
            let d: FeatureDescriptor = text.parse().unwrap();
            assert_eq!(d.to_string(), text);
        }
    }

    #[test]
    fn rejects_malformed() {
        for text in ["", "coord:p", "coord:p:w", "dist:a:a", "joint:a:a:b", "speed:p", "vel:", "freq:p"] {
            assert!(text.parse::<FeatureDescriptor>().is_err(), "{text}");
        }
    }

    #[test]
    fn units() {
        assert_eq!("dist:a:b".parse::<FeatureDescriptor>().unwrap().unit(), Unit::Meters);
        assert_eq!("joint:a:b:c".parse::<FeatureDescriptor>().unwrap().unit(), Unit::Degrees);
        assert_eq!("vel:a:x".parse::<FeatureDescriptor>().unwrap().unit(), Unit::MetersPerSecond);
        assert_eq!("freq:a:x".parse::<FeatureDescriptor>().unwrap().unit(), Unit::Hertz);
    }
}
