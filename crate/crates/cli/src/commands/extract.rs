use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::Args;
use emofuse_core::features::{descriptor_set_with_extras, extract_into, write_feature_csv, FeatureDescriptor, FeatureRow};
use emofuse_core::rules::{load_bundles, required_descriptors};
use emofuse_core::skeleton::{adapt_corpus, parse_stream, windows, ColumnMapping, Modality, ModalityLayout, DEFAULT_WINDOW_FRAMES};

use super::{parse_label, pick_list, render};
use crate::config::{read_text, require_paths, ExtractConfig, Output, Provenance, StreamEntry};
use crate::error::{CliError, Context as _};
use crate::Context;

#[derive(Debug, Args)]
pub struct ExtractArgs {
    /// Canonical stream CSV, or a directory of them; repeatable.
    #[arg(long = "input", value_name = "PATH")]
    inputs: Vec<PathBuf>,
    /// face, head, hand or body.
    #[arg(long)]
    modality: Option<String>,
    /// Window length in frames (default 100).
    #[arg(long, value_name = "FRAMES")]
    window: Option<usize>,
    /// Frames between window starts; defaults to the window length (tumbling).
    #[arg(long, value_name = "FRAMES")]
    stride: Option<usize>,
    /// Emotion label attached to every window of the `--input` streams.
    #[arg(long)]
    label: Option<String>,
    /// Bundle tag attached to every window of the `--input` streams.
    #[arg(long)]
    bundle: Option<String>,
    /// Bundle file; its descriptors are appended to the base vector.
    #[arg(long, value_name = "PATH")]
    bundles: Option<PathBuf>,
    /// Column mapping (TOML) for streams in an external corpus layout.
    #[arg(long, value_name = "PATH")]
    column_mapping: Option<PathBuf>,
    /// Output file stem (default `features`).
    #[arg(long)]
    name: Option<String>,
}

fn merge(config: &ExtractConfig, a: ExtractArgs) -> ExtractConfig {
    let flag_inputs = !a.inputs.is_empty();
    ExtractConfig {
        modality: a.modality.or_else(|| config.modality.clone()),
        points: config.points.clone(),
        window: a.window.or(config.window),
        stride: a.stride.or(config.stride),
        bundles: a.bundles.or_else(|| config.bundles.clone()),
        column_mapping: a.column_mapping.or_else(|| config.column_mapping.clone()),
        name: a.name.or_else(|| config.name.clone()),
        label: if flag_inputs { a.label } else { a.label.or_else(|| config.label.clone()) },
        bundle: if flag_inputs { a.bundle } else { a.bundle.or_else(|| config.bundle.clone()) },
        inputs: pick_list(&a.inputs, &config.inputs),
        streams: if flag_inputs { Vec::new() } else { config.streams.clone() },
    }
}

/// Stream files under `path`: the file itself, or the sorted `.csv` files
/// of a directory.
fn expand(path: &Path) -> Result<Vec<PathBuf>, CliError> {
    if !path.is_dir() {
        return Ok(vec![path.to_path_buf()]);
    }
    let mut files: Vec<PathBuf> = fs::read_dir(path)
        .map_err(|e| CliError::config(path.display(), e))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.is_file() && p.extension().is_some_and(|x| x.eq_ignore_ascii_case("csv")))
        .collect();
    files.sort();
    if files.is_empty() {
        return Err(CliError::Parse(format!("{}: directory contains no stream files (*.csv)", path.display())));
    }
    Ok(files)
}

pub fn run(ctx: &Context, args: ExtractArgs) -> Result<(), CliError> {
    let x = merge(&ctx.config.extract, args);
    let modality: Modality = x
        .modality
        .as_deref()
        .ok_or_else(|| CliError::Config("extract needs --modality (face, head, hand or body)".into()))?
        .parse()
        .context("modality")?;
    let layout = match &x.points {
        Some(names) => ModalityLayout::new(modality, names).context("points")?,
        None => ModalityLayout::default_for(modality),
    };
    let window = x.window.unwrap_or(DEFAULT_WINDOW_FRAMES);
    let stride = x.stride.unwrap_or(window);
    if window == 0 || stride == 0 {
        return Err(CliError::Config("window and stride must be positive".into()));
    }

    let mut entries = x.streams.clone();
    require_paths(&x.inputs)?;
    for input in &x.inputs {
        for path in expand(input)? {
            entries.push(StreamEntry { path, label: x.label.clone(), bundle: x.bundle.clone(), column_mapping: None });
        }
    }
    if entries.is_empty() {
        return Err(CliError::Config("no input streams (--input or [extract] streams)".into()));
    }
    require_paths(entries.iter().map(|e| &e.path))?;
    require_paths(x.bundles.iter().chain(&x.column_mapping).chain(entries.iter().filter_map(|e| e.column_mapping.as_ref())))?;

    let extras: Vec<FeatureDescriptor> = match &x.bundles {
        Some(p) => {
            let bundles = load_bundles(&read_text(p)?).context(p.display())?;
            let (usable, skipped): (Vec<_>, Vec<_>) =
                required_descriptors(&bundles).into_iter().partition(|d| d.operands().iter().all(|n| layout.index_of(n).is_some()));
            for d in skipped {
                log::info!("descriptor {d} is outside the {modality} layout; not extracted");
            }
            usable
        }
        None => Vec::new(),
    };
    let set = Arc::new(descriptor_set_with_extras(&layout, &extras));

    let mut rows = Vec::new();
    for entry in &entries {
        let label = entry.label.as_deref().map(parse_label).transpose()?;
        let text = read_text(&entry.path)?;
        let where_ = entry.path.display();
        let stream = match entry.column_mapping.as_ref().or(x.column_mapping.as_ref()) {
            Some(m) => adapt_corpus(&text, &ColumnMapping::from_toml(&read_text(m)?).context(m.display())?, &layout),
            None => parse_stream(&text, &layout),
        }
        .context(&where_)?;
        let ws = windows(&stream, window, stride).context(&where_)?;
        if ws.is_empty() {
            log::warn!("{where_}: {} frames, shorter than one {window}-frame window", stream.len());
        }
        for w in &ws {
            let features = extract_into(w, &layout, Arc::clone(&set)).context(format!("{where_} window at frame {}", w.start_frame))?;
            rows.push(FeatureRow { features, label, bundle: entry.bundle.clone() });
        }
    }
    if rows.is_empty() {
        return Err(CliError::Config(format!("no stream holds a complete {window}-frame window")));
    }

    let provenance = Provenance::new("extract", ctx.seed, &x);
    let out = Output::new(ctx.out.clone(), provenance)?;
    let body = render(|b| write_feature_csv(b, &rows)).context("feature csv")?;
    let name = format!("{}.csv", x.name.as_deref().unwrap_or("features"));
    let path = out.write_csv(&name, &body)?;
    println!("extract: {} windows x {} features from {} streams -> {}", rows.len(), set.len(), entries.len(), path.display());
    Ok(())
}
