use std::fmt::Write as _;
use std::fs::File;
use std::path::{Path, PathBuf};

use clap::Args;
use emofuse_core::eval::tables::{builtin_mapping, published_matrix, published_metrics, TABLE_PAIRS};
use emofuse_core::eval::{
    apply_label_mapping, compare_reports, overall_accuracy, precision_recall_f, read_reference_csv, write_metrics_csv, ConfusionMatrix,
    LabelMapping, ReferenceRow, DEFAULT_AGREEMENT_CUTOFF, PUBLISHED_TOLERANCE,
};
use emofuse_core::EmotionLabel;

use super::render;
use crate::config::{read_text, require_paths, EvalConfig, Output, Provenance};
use crate::error::{CliError, Context as _};
use crate::Context;

#[derive(Debug, Args)]
pub struct EvalArgs {
    /// Confusion matrix CSV (`true,0..6` header; `-` marks an absent class).
    #[arg(long, value_name = "PATH")]
    matrix: Option<PathBuf>,
    /// Reference metrics CSV. For a shipped `tableN.csv` matrix the paired
    /// reference table is used when this is omitted.
    #[arg(long, value_name = "PATH")]
    reference: Option<PathBuf>,
    /// Largest allowed absolute difference per cell (default 0.002).
    #[arg(long)]
    tolerance: Option<f64>,
    /// Check every shipped matrix against its reference table.
    #[arg(long)]
    all: bool,
    /// Predictions CSV with `truth,prediction` columns (`-` = no decision).
    #[arg(long, value_name = "PATH")]
    predictions: Option<PathBuf>,
    /// Built-in mapping name (msrc12, ucfkinect, msraction) or mapping CSV.
    #[arg(long, value_name = "NAME|PATH")]
    mapping: Option<String>,
    /// Action annotations, one action name per line.
    #[arg(long, value_name = "PATH")]
    actions: Option<PathBuf>,
    /// Lowest agreement kept by the mapping (default 0.6).
    #[arg(long)]
    cutoff: Option<f64>,
}

fn merge(c: &EvalConfig, a: EvalArgs) -> EvalConfig {
    EvalConfig {
        matrix: a.matrix.or_else(|| c.matrix.clone()),
        reference: a.reference.or_else(|| c.reference.clone()),
        tolerance: a.tolerance.or(c.tolerance),
        all: a.all || c.all,
        predictions: a.predictions.or_else(|| c.predictions.clone()),
        mapping: a.mapping.or_else(|| c.mapping.clone()),
        actions: a.actions.or_else(|| c.actions.clone()),
        cutoff: a.cutoff.or(c.cutoff),
    }
}

/// The shipped table number of a `tableN.csv` path.
fn table_number(path: &Path) -> Option<u32> {
    path.file_stem()?.to_str()?.strip_prefix("table")?.parse().ok()
}

fn read_matrix(path: &Path) -> Result<ConfusionMatrix, CliError> {
    require_paths([&path.to_path_buf()])?;
    ConfusionMatrix::read_csv(File::open(path).map_err(|e| CliError::parse(path.display(), e))?).context(path.display())
}

fn read_predictions(path: &Path) -> Result<ConfusionMatrix, CliError> {
    let text = read_text(path)?;
    let mut matrix = ConfusionMatrix::new();
    let mut reader = csv::ReaderBuilder::new().comment(Some(b'#')).trim(csv::Trim::All).from_reader(text.as_bytes());
    let headers = reader.headers().map_err(|e| CliError::parse(path.display(), e))?.clone();
    let col = |name: &str| {
        headers.iter().position(|h| h == name).ok_or_else(|| CliError::Parse(format!("{}: missing column {name:?}", path.display())))
    };
    let (t, p) = (col("truth")?, col("prediction")?);
    for (i, rec) in reader.records().enumerate() {
        let rec = rec.map_err(|e| CliError::parse(path.display(), e))?;
        let at = format!("{} row {}", path.display(), i + 1);
        let truth = EmotionLabel::parse_optional(&rec[t]).map_err(|e| CliError::parse(&at, e))?;
        let predicted = EmotionLabel::parse_optional(&rec[p]).map_err(|e| CliError::parse(&at, e))?;
        let truth = truth.ok_or_else(|| CliError::Parse(format!("{at}: truth label is missing")))?;
        matrix.record(truth, predicted);
    }
    Ok(matrix)
}

/// Metrics for one matrix, optionally diffed against a reference.
fn evaluate(
    out: &Output,
    stem: &str,
    matrix: &ConfusionMatrix,
    reference: Option<Vec<ReferenceRow>>,
    tolerance: f64,
) -> Result<bool, CliError> {
    let metrics = precision_recall_f(matrix);
    out.write_csv(&format!("{stem}metrics.csv"), &render(|b| write_metrics_csv(b, &metrics)).context("metrics")?)?;
    let accuracy = overall_accuracy(matrix).context("accuracy")?;
    println!("eval: overall accuracy {accuracy:.4} ({} of {})", matrix.trace(), matrix.total());
    if matrix.no_decision() > 0 {
        println!("eval: {} events without a decision (not in the matrix)", matrix.no_decision());
    }
    let Some(reference) = reference else {
        return Ok(true);
    };
    let diff = compare_reports(&metrics, &reference, tolerance).context("diff")?;
    out.write_csv(&format!("{stem}diff.csv"), &render(|b| diff.write_csv(b)).context("diff")?)?;
    out.write_csv(&format!("{stem}diff.txt"), diff.to_text().as_bytes())?;
    for c in diff.failures() {
        println!(
            "eval: FAIL {} {} computed {:.4} reference {:.4} delta {:.4}",
            c.label.name(),
            c.metric.as_str(),
            c.computed,
            c.reference,
            c.delta
        );
    }
    println!(
        "eval: {} cells, max delta {:.4}, tolerance {tolerance} -> {}",
        diff.cells.len(),
        diff.max_delta(),
        if diff.pass() { "pass" } else { "FAIL" }
    );
    Ok(diff.pass())
}

fn load_mapping(spec: &str, cutoff: f64) -> Result<LabelMapping, CliError> {
    let mapping = match builtin_mapping(spec) {
        Some(m) => m,
        None => {
            let path = PathBuf::from(spec);
            if !path.exists() {
                return Err(CliError::Config(format!("mapping {spec:?} is neither a built-in name nor an existing file")));
            }
            LabelMapping::read_csv(read_text(&path)?.as_bytes()).context(path.display())?
        }
    };
    Ok(mapping.with_cutoff(cutoff))
}

fn read_actions(path: &Path) -> Result<Vec<String>, CliError> {
    let text = read_text(path)?;
    let mut lines: Vec<String> = text.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#')).map(str::to_string).collect();
    if lines.first().is_some_and(|l| l.eq_ignore_ascii_case("action")) {
        lines.remove(0);
    }
    Ok(lines)
}

pub fn run(ctx: &Context, a: EvalArgs) -> Result<(), CliError> {
    let eff = merge(&ctx.config.eval, a);
    let tolerance = eff.tolerance.unwrap_or(PUBLISHED_TOLERANCE);
    if !(tolerance.is_finite() && tolerance >= 0.0) {
        return Err(CliError::Config(format!("tolerance must be non-negative, got {tolerance}")));
    }
    if !eff.all && eff.matrix.is_none() && eff.predictions.is_none() && eff.mapping.is_none() {
        return Err(CliError::Config("eval needs --matrix, --predictions, --all or --mapping".into()));
    }
    if eff.mapping.is_some() != eff.actions.is_some() {
        return Err(CliError::Config("--mapping and --actions go together".into()));
    }
    let out = Output::new(ctx.out.clone(), Provenance::new("eval", ctx.seed, &eff))?;
    let mut failures = Vec::new();

    if eff.all {
        let mut summary = String::from("matrix_table,metrics_table,cells,max_delta,pass\n");
        for pair in TABLE_PAIRS {
            let matrix = published_matrix(pair.matrix_table).expect("shipped table parses");
            let reference = published_metrics(pair.metrics_table).expect("shipped table parses");
            let diff = compare_reports(&precision_recall_f(&matrix), &reference, tolerance).context("diff")?;
            writeln!(summary, "{},{},{},{},{}", pair.matrix_table, pair.metrics_table, diff.cells.len(), diff.max_delta(), diff.pass())
                .unwrap();
            println!(
                "eval: table {:>2} vs table {} ({}): max delta {:.4} -> {}",
                pair.matrix_table,
                pair.metrics_table,
                pair.description,
                diff.max_delta(),
                if diff.pass() { "pass" } else { "FAIL" }
            );
            if !diff.pass() {
                failures.push(format!("table {} vs table {}", pair.matrix_table, pair.metrics_table));
            }
        }
        out.write_csv("all_tables.csv", summary.as_bytes())?;
    }

    if let Some(path) = &eff.matrix {
        let matrix = read_matrix(path)?;
        let reference = match (&eff.reference, table_number(path)) {
            (Some(r), _) => {
                require_paths([r])?;
                Some(read_reference_csv(File::open(r).map_err(|e| CliError::parse(r.display(), e))?).context(r.display())?)
            }
            (None, Some(n)) => TABLE_PAIRS.iter().find(|p| p.matrix_table == n).and_then(|p| published_metrics(p.metrics_table)),
            (None, None) => None,
        };
        if !evaluate(&out, "", &matrix, reference, tolerance)? {
            failures.push(path.display().to_string());
        }
    }

    if let Some(path) = &eff.predictions {
        let matrix = read_predictions(path)?;
        out.write_csv("confusion.csv", &render(|b| matrix.write_csv(b)).context("confusion")?)?;
        let reference = match &eff.reference {
            Some(r) if eff.matrix.is_none() => {
                require_paths([r])?;
                Some(read_reference_csv(File::open(r).map_err(|e| CliError::parse(r.display(), e))?).context(r.display())?)
            }
            _ => None,
        };
        if !evaluate(&out, "predictions_", &matrix, reference, tolerance)? {
            failures.push(path.display().to_string());
        }
    }

    if let (Some(spec), Some(actions_path)) = (&eff.mapping, &eff.actions) {
        require_paths([actions_path])?;
        let mapping = load_mapping(spec, eff.cutoff.unwrap_or(DEFAULT_AGREEMENT_CUTOFF))?;
        let actions = read_actions(actions_path)?;
        let outcome = apply_label_mapping(&mapping, &actions);
        let mut labeled = String::from("index,action,emotion,code,agreement\n");
        for (i, action, emotion, agreement) in &outcome.labeled {
            writeln!(labeled, "{i},\"{action}\",{},{},{agreement}", emotion.name(), emotion.code()).unwrap();
        }
        out.write_csv("labeled.csv", labeled.as_bytes())?;
        let mut excluded = String::from("index,action,reason\n");
        for x in &outcome.excluded {
            writeln!(excluded, "{},\"{}\",{}", x.index, x.action, x.reason.as_str()).unwrap();
        }
        out.write_csv("exclusions.csv", excluded.as_bytes())?;
        println!("eval: mapping {spec}: {} labelled, {} excluded", outcome.labeled.len(), outcome.excluded.len());
    }

    if failures.is_empty() {
        Ok(())
    } else {
        Err(CliError::Diff(format!("metrics differ from the reference beyond {tolerance}: {}", failures.join(", "))))
    }
}
