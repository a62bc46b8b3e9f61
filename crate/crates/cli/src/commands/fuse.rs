use std::fmt::Write as _;
use std::fs::File;
use std::path::PathBuf;

use clap::Args;
use emofuse_core::features::FeatureRow;
use emofuse_core::fusion::{
    read_replay, sweep_buffer_size, write_prediction_log, write_replay, BufferMode, FusionConfig, FusionEngine, ReplayEvent, Vote,
    VoteSource,
};
use emofuse_core::rules::{load_bundles, rule_vote, RuleBundle};
use emofuse_core::EmotionLabel;

use super::train::ModelFile;
use super::{pick_list, read_rows, render};
use crate::config::{read_text, require_paths, FuseConfig, Output, Provenance, SourceEntry};
use crate::error::{CliError, Context as _};
use crate::Context;

#[derive(Debug, Args)]
pub struct FuseArgs {
    /// Vote replay CSV (`tick,modality,label[,truth]`).
    #[arg(long, value_name = "PATH")]
    replay: Option<PathBuf>,
    /// Vote source built from features: `SOURCE:FEATURES:MODEL` for a
    /// modality classifier, `rule:FEATURES:BUNDLES` for the rule vote.
    /// Repeatable; rows of all feature files are aligned by position.
    #[arg(long = "source", value_name = "SPEC")]
    sources: Vec<String>,
    /// Instances per buffer (default 10).
    #[arg(long, value_name = "N")]
    buffer: Option<usize>,
    /// Switch a modality off, e.g. `rule`; repeatable or comma separated.
    #[arg(long, value_delimiter = ',')]
    disable: Vec<String>,
    /// Seal an instance column after this many ticks.
    #[arg(long, value_name = "TICKS")]
    timeout: Option<u64>,
    /// tumbling (default) or sliding.
    #[arg(long)]
    mode: Option<String>,
    /// Buffer sizes to evaluate, e.g. `5,10,15,20,25`; needs truth labels.
    #[arg(long, value_delimiter = ',', value_name = "SIZES")]
    sweep: Vec<usize>,
}

fn parse_source_spec(spec: &str) -> Result<SourceEntry, CliError> {
    let parts: Vec<&str> = spec.splitn(3, ':').collect();
    let [source, features, third] = parts[..] else {
        return Err(CliError::Config(format!("--source {spec:?}: expected SOURCE:FEATURES:MODEL_OR_BUNDLES")));
    };
    let is_rule = source.trim().eq_ignore_ascii_case("rule");
    Ok(SourceEntry {
        source: source.trim().to_string(),
        features: PathBuf::from(features),
        model: (!is_rule).then(|| PathBuf::from(third)),
        bundles: is_rule.then(|| PathBuf::from(third)),
    })
}

enum Voter {
    Model(ModelFile),
    Rules(Vec<RuleBundle>),
}

/// One vote per source per feature row; tick = row index, truth from the
/// first source's label column.
fn events_from_sources(entries: &[SourceEntry]) -> Result<Vec<ReplayEvent>, CliError> {
    let mut voters = Vec::new();
    for e in entries {
        let source: VoteSource = e.source.parse().map_err(|err| CliError::config("--source", err))?;
        require_paths(std::iter::once(&e.features).chain(&e.model).chain(&e.bundles))?;
        let voter = match (source, &e.model, &e.bundles) {
            (VoteSource::Rule, _, Some(b)) => Voter::Rules(load_bundles(&read_text(b)?).context(b.display())?),
            (s, Some(m), _) if s != VoteSource::Rule => Voter::Model(ModelFile::load(m)?),
            _ => {
                return Err(CliError::Config(format!(
                    "source {source} needs {}",
                    if source == VoteSource::Rule { "a bundle file" } else { "a model file" }
                )))
            }
        };
        if let Voter::Rules(b) = &voter {
            if let Some(u) = b.iter().find(|b| !b.is_calibrated()) {
                return Err(CliError::Config(format!("bundle {} is not calibrated", u.name)));
            }
        }
        voters.push((source, voter, read_rows(&e.features)?, e.features.display().to_string()));
    }
    let n = voters[0].2.len();
    if let Some((_, _, rows, path)) = voters.iter().find(|v| v.2.len() != n) {
        return Err(CliError::Config(format!("{path} has {} rows, expected {n} to align with the other sources", rows.len())));
    }
    let truth = |i: usize| -> Option<EmotionLabel> { voters[0].2[i].label };
    let mut events = Vec::with_capacity(n * voters.len());
    for i in 0..n {
        for (source, voter, rows, path) in &voters {
            let row: &FeatureRow = &rows[i];
            let label = match voter {
                Voter::Model(m) => Some(m.model.predict(&m.select(row)?).context(format!("{path} row {i}"))?),
                Voter::Rules(b) => rule_vote(b, &row.features),
            };
            events.push(ReplayEvent { vote: Vote { source: *source, label, tick: i as u64 }, truth: truth(i) });
        }
    }
    Ok(events)
}

pub fn run(ctx: &Context, a: FuseArgs) -> Result<(), CliError> {
    let c = &ctx.config.fuse;
    let flag_sources = a.sources.iter().map(|s| parse_source_spec(s)).collect::<Result<Vec<_>, _>>()?;
    // flag inputs replace both configured inputs
    let flag_inputs = a.replay.is_some() || !flag_sources.is_empty();
    let eff = FuseConfig {
        replay: if flag_inputs { a.replay } else { c.replay.clone() },
        sources: if flag_inputs { flag_sources } else { c.sources.clone() },
        buffer: a.buffer.or(c.buffer),
        disable: pick_list(&a.disable, &c.disable),
        timeout: a.timeout.or(c.timeout),
        mode: a.mode.or_else(|| c.mode.clone()),
        sweep: pick_list(&a.sweep, &c.sweep),
    };
    if eff.replay.is_some() && !eff.sources.is_empty() {
        return Err(CliError::Config("give either a replay file or vote sources, not both".into()));
    }

    let mut config = FusionConfig::default();
    if let Some(b) = eff.buffer {
        config = config.with_buffer(b);
    }
    for d in &eff.disable {
        config = config.without(d.parse().map_err(|e| CliError::config("--disable", e))?);
    }
    config.timeout_ticks = eff.timeout;
    config.mode = match eff.mode.as_deref() {
        None | Some("tumbling") => BufferMode::Tumbling,
        Some("sliding") => BufferMode::Sliding,
        Some(other) => return Err(CliError::Config(format!("unknown buffer mode {other:?} (tumbling or sliding)"))),
    };
    config.validate().context("fusion config")?;

    let events = match (&eff.replay, eff.sources.is_empty()) {
        (Some(path), _) => {
            require_paths([path])?;
            read_replay(File::open(path).map_err(|e| CliError::parse(path.display(), e))?).context(path.display())?
        }
        (None, false) => events_from_sources(&eff.sources)?,
        (None, true) => return Err(CliError::Config("fuse needs --replay or --source".into())),
    };
    if events.is_empty() {
        return Err(CliError::Parse("vote stream is empty".into()));
    }

    let out = Output::new(ctx.out.clone(), Provenance::new("fuse", ctx.seed, &eff))?;
    let with_truth = events.iter().all(|e| e.truth.is_some());
    if !eff.sources.is_empty() {
        out.write_csv("votes.csv", &render(|b| write_replay(b, &events, with_truth)).context("votes")?)?;
    }

    let mut engine = FusionEngine::new(config.clone()).context("fusion config")?;
    let predictions = engine.run(events.iter().map(|e| e.vote));
    out.write_csv("predictions.csv", &render(|b| write_prediction_log(b, &predictions)).context("predictions")?)?;
    if !engine.audit().is_empty() {
        let mut text = String::from("tick,modality,label,reason\n");
        for r in engine.audit() {
            writeln!(text, "{},{},{},{}", r.tick, r.source, EmotionLabel::format_optional(r.label), r.reason).unwrap();
        }
        out.write_csv("audit.csv", text.as_bytes())?;
    }
    match predictions.last() {
        Some(p) => println!(
            "fuse: {} buffer predictions, final {} ({})",
            predictions.len(),
            EmotionLabel::format_optional(p.prediction),
            p.prediction.map(|l| l.name()).unwrap_or("unavailable")
        ),
        None => println!("fuse: no buffer filled"),
    }
    if !engine.audit().is_empty() {
        println!("fuse: {} votes from disabled modalities audited", engine.audit().len());
    }

    if !eff.sweep.is_empty() {
        if !with_truth {
            return Err(CliError::Config("--sweep needs a truth label on every event".into()));
        }
        let points = sweep_buffer_size(&events, &eff.sweep, &config).context("sweep")?;
        let mut text = String::from("size,predictions,correct,unfilled_segments,accuracy\n");
        for p in &points {
            writeln!(text, "{},{},{},{},{}", p.size, p.predictions, p.correct, p.unfilled_segments, p.accuracy).unwrap();
            println!(
                "sweep: size {:>3} accuracy {:.4} ({} of {} scored)",
                p.size,
                p.accuracy,
                p.correct,
                p.predictions + p.unfilled_segments
            );
        }
        out.write_csv("sweep.csv", text.as_bytes())?;
    }
    Ok(())
}
