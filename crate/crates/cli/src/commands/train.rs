use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use clap::Args;
use emofuse_core::features::FeatureRow;
use emofuse_core::svm::{cross_validate, train_multiclass, MulticlassModel, Sample};
use serde::{Deserialize, Serialize};

use super::{pick_list, read_all_rows};
use crate::config::{Output, Provenance, TrainConfig};
use crate::error::{CliError, Context as _};
use crate::Context;

#[derive(Debug, Args)]
pub struct TrainArgs {
    /// Labelled feature CSV; repeatable. All files must share one column layout.
    #[arg(long = "features", value_name = "PATH")]
    features: Vec<PathBuf>,
    /// Run stratified k-fold cross-validation before the final fit.
    #[arg(long = "cv", value_name = "K")]
    folds: Option<usize>,
    /// Box constraint C.
    #[arg(long = "c", value_name = "C")]
    c: Option<f64>,
    /// RBF width; defaults to 1/d.
    #[arg(long)]
    gamma: Option<f64>,
    /// KKT stopping tolerance.
    #[arg(long)]
    tolerance: Option<f64>,
    /// Cap on SMO pair updates per binary model (default 10 x samples).
    #[arg(long, value_name = "N")]
    max_iterations: Option<usize>,
    /// Skip z-score standardization of the features.
    #[arg(long)]
    no_standardize: bool,
    /// Output file stem (default `model`).
    #[arg(long)]
    name: Option<String>,
}

/// On-disk model: the classifier plus the feature columns it expects.
#[derive(Debug, Serialize, Deserialize)]
pub struct ModelFile {
    pub descriptors: Vec<String>,
    pub model: MulticlassModel,
}

impl ModelFile {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path).map_err(|e| CliError::config(path.display(), e))?;
        let file: ModelFile = serde_json::from_str(&text).map_err(|e| CliError::parse(path.display(), e))?;
        file.model.validate().context(path.display())?;
        if file.descriptors.len() != file.model.dimension {
            return Err(CliError::Parse(format!(
                "{}: {} descriptors for a {}-d model",
                path.display(),
                file.descriptors.len(),
                file.model.dimension
            )));
        }
        Ok(file)
    }

    /// Picks the model's columns out of a feature row, by name.
    pub fn select(&self, row: &FeatureRow) -> Result<Vec<f64>, CliError> {
        let names: Vec<String> = row.features.descriptors().iter().map(|d| d.to_string()).collect();
        if names == self.descriptors {
            return Ok(row.features.values().to_vec());
        }
        self.descriptors
            .iter()
            .map(|d| {
                names
                    .iter()
                    .position(|n| n == d)
                    .map(|i| row.features.values()[i])
                    .ok_or_else(|| CliError::Config(format!("feature column {d} required by the model is missing")))
            })
            .collect()
    }
}

fn samples(rows: &[FeatureRow]) -> Result<(Vec<String>, Vec<Sample>), CliError> {
    let first = rows.first().ok_or_else(|| CliError::Config("feature files hold no rows".into()))?;
    let layout = first.features.descriptors();
    let mut out = Vec::with_capacity(rows.len());
    for (i, r) in rows.iter().enumerate() {
        if r.features.descriptors() != layout {
            return Err(CliError::Config(format!("row {i} has a different feature layout from row 0")));
        }
        let label = r.label.ok_or_else(|| CliError::Config(format!("row {i} has no label; training needs a label column")))?;
        out.push(Sample::new(r.features.values().to_vec(), label));
    }
    Ok((layout.iter().map(|d| d.to_string()).collect(), out))
}

pub fn run(ctx: &Context, a: TrainArgs) -> Result<(), CliError> {
    let c = &ctx.config.train;
    let mut svm = c.svm.clone();
    if let Some(v) = a.c {
        svm.c = v;
    }
    if a.gamma.is_some() {
        svm.gamma = a.gamma;
    }
    if let Some(t) = a.tolerance {
        svm.tolerance = t;
    }
    if a.max_iterations.is_some() {
        svm.max_iterations = a.max_iterations;
    }
    if a.no_standardize {
        svm.standardize = false;
    }
    let eff = TrainConfig {
        features: pick_list(&a.features, &c.features),
        folds: a.folds.or(c.folds),
        name: a.name.or_else(|| c.name.clone()),
        svm,
    };
    let rows = read_all_rows(&eff.features)?;
    let (descriptors, samples) = samples(&rows)?;
    let stem = eff.name.clone().unwrap_or_else(|| "model".into());

    let cv = match eff.folds {
        Some(k) => {
            if k > samples.len() {
                return Err(CliError::Config(format!("{k} folds requested for {} samples", samples.len())));
            }
            Some(cross_validate(&samples, &eff.svm, k, ctx.seed).context("cross-validation")?)
        }
        None => None,
    };
    let (model, pairs) = train_multiclass(&samples, &eff.svm).context("training")?;

    let out = Output::new(ctx.out.clone(), Provenance::new("train", ctx.seed, &eff))?;
    let file = ModelFile { descriptors, model };
    let model_path = out.write_json(&format!("{stem}.json"), serde_json::to_value(&file).expect("model serialises"))?;

    let mut report = String::from("positive,negative,iterations,converged,support_vectors,max_alpha,min_alpha,dual_residual\n");
    for p in &pairs {
        writeln!(
            report,
            "{},{},{},{},{},{},{},{}",
            p.positive.code(),
            p.negative.code(),
            p.iterations,
            p.converged,
            p.support_vectors,
            p.max_alpha,
            p.min_alpha,
            p.dual_residual
        )
        .unwrap();
        if !p.converged {
            log::warn!("pair {}/{} stopped at the iteration cap", p.positive.code(), p.negative.code());
        }
    }
    out.write_csv(&format!("{stem}_pairs.csv"), report.as_bytes())?;

    if let Some(cv) = &cv {
        let mut text = String::from("fold,accuracy\n");
        for (i, acc) in cv.fold_accuracies.iter().enumerate() {
            writeln!(text, "{i},{acc}").unwrap();
        }
        writeln!(text, "mean,{}", cv.mean_accuracy()).unwrap();
        out.write_csv(&format!("{stem}_cv.csv"), text.as_bytes())?;
        let mut confusion = Vec::new();
        cv.confusion.write_csv(&mut confusion).context("cv confusion")?;
        out.write_csv(&format!("{stem}_cv_confusion.csv"), &confusion)?;
        println!("train: {}-fold cv mean accuracy {:.4}", cv.fold_accuracies.len(), cv.mean_accuracy());
    }
    println!(
        "train: {} samples, {} classes, d={}, C={}, gamma={} -> {}",
        samples.len(),
        file.model.labels.len(),
        file.model.dimension,
        file.model.params.c,
        file.model.params.gamma,
        model_path.display()
    );
    Ok(())
}
