use std::io::Write;

use crate::features::{FeatureRow, WindowFeatures};

use super::{Interval, Measure, RuleBundle, RuleError};

/// Half-width applied when every exemplar shows the same value.
pub const DEFAULT_DEGENERATE_FLOOR: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CalibrationOptions {
    /// Fractional widening of each side by `margin × (max − min)`.
    pub margin: f64,
    /// Absolute half-width used when `max == min`.
    pub floor: f64,
}

impl Default for CalibrationOptions {
    fn default() -> Self {
        CalibrationOptions { margin: 0.0, floor: DEFAULT_DEGENERATE_FLOOR }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CalibrationRecord {
    pub bundle: String,
    pub rule_id: String,
    pub min: f64,
    pub max: f64,
    pub exemplar_count: usize,
}

/// Sets every interval rule of `bundle` to the observed `[min, max]` over
/// the exemplars, widened per `options`. Comparison rules are copied
/// unchanged.
pub fn calibrate_thresholds(
    bundle: &RuleBundle,
    exemplars: &[&WindowFeatures],
    options: CalibrationOptions,
) -> Result<(RuleBundle, Vec<CalibrationRecord>), RuleError> {
    if !(options.margin.is_finite() && options.margin >= 0.0) {
        return Err(RuleError::Invalid(format!("margin must be non-negative, got {}", options.margin)));
    }
    if !(options.floor.is_finite() && options.floor >= 0.0) {
        return Err(RuleError::Invalid(format!("floor must be non-negative, got {}", options.floor)));
    }
    if exemplars.is_empty() {
        return Err(RuleError::NoExemplars(bundle.name.clone()));
    }
    let mut calibrated = bundle.clone();
    let mut records = Vec::new();
    for rule in calibrated.rules.iter_mut() {
        let Measure::Single(descriptor) = &rule.measure else {
            let failing = exemplars.iter().filter(|ex| !matches!(rule.evaluate(ex), Ok(true))).count();
            if failing > 0 {
                log::warn!("bundle {}: {failing} exemplar(s) fail comparison rule {}", bundle.name, rule.id);
            }
            continue;
        };
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for ex in exemplars {
            let v = ex
                .get(descriptor)
                .ok_or_else(|| RuleError::MissingDescriptor { rule: rule.id.clone(), descriptor: descriptor.to_string() })?;
            lo = lo.min(v);
            hi = hi.max(v);
        }
        let span = hi - lo;
        let (min, max) =
            if span == 0.0 { (lo - options.floor, hi + options.floor) } else { (lo - options.margin * span, hi + options.margin * span) };
        rule.interval = Some(Interval::new(min, max)?);
        records.push(CalibrationRecord {
            bundle: bundle.name.clone(),
            rule_id: rule.id.clone(),
            min,
            max,
            exemplar_count: exemplars.len(),
        });
    }
    Ok((calibrated, records))
}

/// Calibrates each bundle on the rows tagged with its name.
pub fn calibrate_tagged(
    bundles: &[RuleBundle],
    rows: &[FeatureRow],
    options: CalibrationOptions,
) -> Result<(Vec<RuleBundle>, Vec<CalibrationRecord>), RuleError> {
    let mut out = Vec::with_capacity(bundles.len());
    let mut records = Vec::new();
    for bundle in bundles {
        let exemplars: Vec<&WindowFeatures> =
            rows.iter().filter(|r| r.bundle.as_deref() == Some(bundle.name.as_str())).map(|r| &r.features).collect();
        let (b, mut rec) = calibrate_thresholds(bundle, &exemplars, options)?;
        out.push(b);
        records.append(&mut rec);
    }
    Ok((out, records))
}

/// Writes `bundle,rule_id,min,max,exemplar_count` rows.
pub fn write_calibration_report<W: Write>(out: W, records: &[CalibrationRecord]) -> Result<(), RuleError> {
    let mut w = csv::Writer::from_writer(out);
    let err = |e: csv::Error| RuleError::Format(e.to_string());
    w.write_record(["bundle", "rule_id", "min", "max", "exemplar_count"]).map_err(err)?;
    for r in records {
        w.write_record([r.bundle.clone(), r.rule_id.clone(), r.min.to_string(), r.max.to_string(), r.exemplar_count.to_string()])
            .map_err(err)?;
    }
    w.flush().map_err(|e| RuleError::Format(e.to_string()))
}
