use crate::geometry::{Axis, Point3};

use super::FeatureError;

/// An angle in degrees; `degenerate` marks an undefined direction that was
/// reported as 0.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Angle {
    pub degrees: f64,
    pub degenerate: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Velocity {
    /// Mean speed, m/s.
    pub speed: f64,
    /// Mean signed velocity per axis, m/s.
    pub components: [f64; 3],
}

impl Velocity {
    pub fn component(&self, axis: Axis) -> f64 {
        self.components[axis as usize]
    }
}

fn check_finite(points: &[&Point3]) -> Result<(), FeatureError> {
    if points.iter().all(|p| p.is_finite()) {
        Ok(())
    } else {
        Err(FeatureError::Domain("non-finite coordinate".into()))
    }
}

pub fn pair_distance(a: &Point3, b: &Point3) -> Result<f64, FeatureError> {
    check_finite(&[a, b])?;
    Ok((*b - *a).norm())
}

/// Direction of `a → b` against the horizontal axis in the frontal x–y
/// plane, degrees in (−180, 180]. Depth is ignored.
pub fn pair_angle(a: &Point3, b: &Point3) -> Result<Angle, FeatureError> {
    check_finite(&[a, b])?;
    let dx = b.x - a.x;
    let dy = b.y - a.y;
    if dx == 0.0 && dy == 0.0 {
        return Ok(Angle { degrees: 0.0, degenerate: true });
    }
    let mut degrees = dy.atan2(dx).to_degrees();
    if degrees <= -180.0 {
        degrees = 180.0;
    }
    Ok(Angle { degrees, degenerate: false })
}

/// Interior angle at `vertex` between the rays to `a` and `c`, degrees in
/// [0, 180].
pub fn joint_angle(a: &Point3, vertex: &Point3, c: &Point3) -> Result<Angle, FeatureError> {
    check_finite(&[a, vertex, c])?;
    let u = *a - *vertex;
    let v = *c - *vertex;
    let (nu, nv) = (u.norm(), v.norm());
    if nu == 0.0 || nv == 0.0 {
        return Ok(Angle { degrees: 0.0, degenerate: true });
    }
    let cos = (u.dot(&v) / (nu * nv)).clamp(-1.0, 1.0);
    Ok(Angle { degrees: cos.acos().to_degrees(), degenerate: false })
}

/// Mean speed and mean per-axis velocity of a track sampled at
/// `frame_rate_hz`.
pub fn velocity(track: &[Point3], frame_rate_hz: f64) -> Result<Velocity, FeatureError> {
    if track.len() < 2 {
        return Err(FeatureError::InsufficientFrames { needed: 2, got: track.len() });
    }
    check_rate(frame_rate_hz)?;
    check_finite(&track.iter().collect::<Vec<_>>())?;
    let steps = (track.len() - 1) as f64;
    let mut path = 0.0;
    let mut sum = Point3::default();
    for w in track.windows(2) {
        let d = w[1] - w[0];
        path += d.norm();
        sum = sum + d;
    }
    let k = frame_rate_hz / steps;
    Ok(Velocity { speed: path * k, components: [sum.x * k, sum.y * k, sum.z * k] })
}

/// Straight-line distance between the first and last position.
pub fn displacement(track: &[Point3]) -> Result<f64, FeatureError> {
    match (track.first(), track.last()) {
        (Some(first), Some(last)) => pair_distance(first, last),
        _ => Err(FeatureError::InsufficientFrames { needed: 1, got: 0 }),
    }
}

/// Oscillation frequency of a single-axis position track, Hz.
///
/// Per-frame deltas are smoothed with a 3-frame moving average and
/// mean-centred; each sign change is a half cycle, so the count is divided
/// by twice the window duration (`len / rate` seconds).
pub fn movement_frequency(positions: &[f64], frame_rate_hz: f64) -> Result<f64, FeatureError> {
    if positions.len() < 3 {
        return Err(FeatureError::InsufficientFrames { needed: 3, got: positions.len() });
    }
    check_rate(frame_rate_hz)?;
    if positions.iter().any(|v| !v.is_finite()) {
        return Err(FeatureError::Domain("non-finite coordinate".into()));
    }
    let deltas: Vec<f64> = positions.windows(2).map(|w| w[1] - w[0]).collect();
    let smoothed: Vec<f64> = if deltas.len() >= 3 { deltas.windows(3).map(|w| (w[0] + w[1] + w[2]) / 3.0).collect() } else { deltas };
    let mean = smoothed.iter().sum::<f64>() / smoothed.len() as f64;
    let centred: Vec<f64> = smoothed.iter().map(|v| v - mean).collect();
    let peak = centred.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    let scale = smoothed.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    // Residue from centring a constant sequence is noise, not motion.
    let floor = 1e-9 * scale + f64::MIN_POSITIVE;
    if peak <= floor {
        return Ok(0.0);
    }
    let mut last_sign = 0i8;
    let mut changes = 0usize;
    for v in centred {
        let sign = if v > floor {
            1
        } else if v < -floor {
            -1
        } else {
            0
        };
        if sign != 0 {
            if last_sign != 0 && sign != last_sign {
                changes += 1;
            }
            last_sign = sign;
        }
    }
    let duration = positions.len() as f64 / frame_rate_hz;
    Ok(changes as f64 / (2.0 * duration))
}

fn check_rate(rate: f64) -> Result<(), FeatureError> {
    if rate.is_finite() && rate > 0.0 {
        Ok(())
    } else {
        Err(FeatureError::Domain(format!("frame rate must be positive, got {rate}")))
    }
}
