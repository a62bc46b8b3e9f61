use std::path::PathBuf;

use clap::Args;
use emofuse_core::rules::{calibrate_tagged, load_bundles, write_calibration_report, CalibrationOptions};

use super::{pick_list, read_all_rows, render};
use crate::config::{read_text, require_paths, CalibrateConfig, Output, Provenance};
use crate::error::{CliError, Context as _};
use crate::Context;

#[derive(Debug, Args)]
pub struct CalibrateArgs {
    /// Bundle file (JSON) to calibrate.
    #[arg(long, value_name = "PATH")]
    bundles: Option<PathBuf>,
    /// Feature CSV with a `bundle` tag column; repeatable.
    #[arg(long = "features", value_name = "PATH")]
    features: Vec<PathBuf>,
    /// Widen each interval by margin x (max - min) on both sides.
    #[arg(long)]
    margin: Option<f64>,
    /// Half-width used when every exemplar has the same value.
    #[arg(long)]
    floor: Option<f64>,
}

pub fn run(ctx: &Context, a: CalibrateArgs) -> Result<(), CliError> {
    let c = &ctx.config.calibrate;
    let eff = CalibrateConfig {
        bundles: a.bundles.or_else(|| c.bundles.clone()),
        features: pick_list(&a.features, &c.features),
        margin: a.margin.or(c.margin),
        floor: a.floor.or(c.floor),
    };
    let bundles_path = eff.bundles.clone().ok_or_else(|| CliError::Config("calibrate needs --bundles".into()))?;
    require_paths([&bundles_path])?;
    let bundles = load_bundles(&read_text(&bundles_path)?).context(bundles_path.display())?;
    let rows = read_all_rows(&eff.features)?;
    let defaults = CalibrationOptions::default();
    let options = CalibrationOptions { margin: eff.margin.unwrap_or(defaults.margin), floor: eff.floor.unwrap_or(defaults.floor) };
    let (calibrated, records) = calibrate_tagged(&bundles, &rows, options).context("calibration")?;

    let out = Output::new(ctx.out.clone(), Provenance::new("calibrate", ctx.seed, &eff))?;
    let doc = serde_json::json!({ "bundles": calibrated });
    let bundles_out = out.write_json("calibrated_bundles.json", doc)?;
    let report = render(|b| write_calibration_report(b, &records)).context("calibration report")?;
    out.write_csv("calibration_report.csv", &report)?;
    for r in &records {
        println!("calibrate: {} {} [{}, {}] from {} exemplars", r.bundle, r.rule_id, r.min, r.max, r.exemplar_count);
    }
    println!("calibrate: {} bundles -> {}", calibrated.len(), bundles_out.display());
    Ok(())
}
