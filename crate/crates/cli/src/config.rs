//! Run configuration file (TOML), path handling and output provenance.

use std::fs;
use std::path::{Path, PathBuf};

use emofuse_core::svm::SvmConfig;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::CliError;

pub const DEFAULT_SEED: u64 = 0;

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub extract: ExtractConfig,
    pub calibrate: CalibrateConfig,
    pub train: TrainConfig,
    pub fuse: FuseConfig,
    pub eval: EvalConfig,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct StreamEntry {
    pub path: PathBuf,
    pub label: Option<String>,
    pub bundle: Option<String>,
    pub column_mapping: Option<PathBuf>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExtractConfig {
    pub modality: Option<String>,
    /// Custom point names; the modality's default layout otherwise.
    pub points: Option<Vec<String>>,
    pub window: Option<usize>,
    pub stride: Option<usize>,
    /// Bundle file whose descriptors are appended to the base vector.
    pub bundles: Option<PathBuf>,
    pub column_mapping: Option<PathBuf>,
    pub name: Option<String>,
    /// Label and bundle tags for `inputs`.
    pub label: Option<String>,
    pub bundle: Option<String>,
    pub inputs: Vec<PathBuf>,
    pub streams: Vec<StreamEntry>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CalibrateConfig {
    pub bundles: Option<PathBuf>,
    pub features: Vec<PathBuf>,
    pub margin: Option<f64>,
    pub floor: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrainConfig {
    pub features: Vec<PathBuf>,
    pub folds: Option<usize>,
    pub name: Option<String>,
    pub svm: SvmConfig,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SourceEntry {
    pub source: String,
    pub features: PathBuf,
    pub model: Option<PathBuf>,
    pub bundles: Option<PathBuf>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FuseConfig {
    pub replay: Option<PathBuf>,
    pub sources: Vec<SourceEntry>,
    pub buffer: Option<usize>,
    pub disable: Vec<String>,
    pub timeout: Option<u64>,
    pub mode: Option<String>,
    pub sweep: Vec<usize>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EvalConfig {
    pub matrix: Option<PathBuf>,
    pub reference: Option<PathBuf>,
    pub tolerance: Option<f64>,
    pub all: bool,
    pub predictions: Option<PathBuf>,
    pub mapping: Option<String>,
    pub actions: Option<PathBuf>,
    pub cutoff: Option<f64>,
}

fn rebase(base: &Path, p: &mut PathBuf) {
    if p.is_relative() {
        *p = base.join(&*p);
    }
}

fn rebase_opt(base: &Path, p: &mut Option<PathBuf>) {
    if let Some(p) = p {
        rebase(base, p);
    }
}

impl RunConfig {
    /// Loads a config file; relative paths inside it are taken relative to
    /// the file's directory.
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path).map_err(|e| CliError::config(path.display(), e))?;
        let mut config: RunConfig = toml::from_str(&text).map_err(|e| CliError::config(path.display(), e))?;
        let base = path.parent().unwrap_or(Path::new("."));
        config.rebase(base);
        Ok(config)
    }

    fn rebase(&mut self, base: &Path) {
        rebase_opt(base, &mut self.out);
        let x = &mut self.extract;
        rebase_opt(base, &mut x.bundles);
        rebase_opt(base, &mut x.column_mapping);
        x.inputs.iter_mut().for_each(|p| rebase(base, p));
        for s in &mut x.streams {
            rebase(base, &mut s.path);
            rebase_opt(base, &mut s.column_mapping);
        }
        rebase_opt(base, &mut self.calibrate.bundles);
        self.calibrate.features.iter_mut().for_each(|p| rebase(base, p));
        self.train.features.iter_mut().for_each(|p| rebase(base, p));
        rebase_opt(base, &mut self.fuse.replay);
        for s in &mut self.fuse.sources {
            rebase(base, &mut s.features);
            rebase_opt(base, &mut s.model);
            rebase_opt(base, &mut s.bundles);
        }
        let e = &mut self.eval;
        rebase_opt(base, &mut e.matrix);
        rebase_opt(base, &mut e.reference);
        rebase_opt(base, &mut e.predictions);
        rebase_opt(base, &mut e.actions);
        if let Some(m) = &e.mapping {
            // a mapping is either a built-in name or a file path
            if m.ends_with(".csv") && Path::new(m).is_relative() {
                e.mapping = Some(base.join(m).display().to_string());
            }
        }
    }
}

/// Fails with a config error when any referenced path does not exist.
pub fn require_paths<'a>(paths: impl IntoIterator<Item = &'a PathBuf>) -> Result<(), CliError> {
    for p in paths {
        if !p.exists() {
            return Err(CliError::Config(format!("{}: no such file or directory", p.display())));
        }
    }
    Ok(())
}

pub fn read_text(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(
        |e| {
            if path.exists() {
                CliError::parse(path.display(), e)
            } else {
                CliError::config(path.display(), e)
            }
        },
    )
}

/// Reproducibility stamp written at the top of every output.
#[derive(Debug, Clone)]
pub struct Provenance {
    pub seed: u64,
    pub config_hash: String,
}

impl Provenance {
    /// Hashes the effective settings of one command, after flags are
    /// applied.
    pub fn new<T: Serialize>(command: &str, seed: u64, effective: &T) -> Self {
        #[derive(Serialize)]
        struct Stamp<'a, T> {
            command: &'a str,
            seed: u64,
            settings: &'a T,
        }
        let text = toml::to_string(&Stamp { command, seed, settings: effective }).expect("settings serialise");
        Provenance { seed, config_hash: hex::encode(Sha256::digest(text.as_bytes())) }
    }

    pub fn line(&self) -> String {
        format!("emofuse {} seed={} config={}", env!("CARGO_PKG_VERSION"), self.seed, self.config_hash)
    }
}

/// Output directory writer that stamps every file.
pub struct Output {
    dir: PathBuf,
    provenance: Provenance,
}

impl Output {
    pub fn new(dir: PathBuf, provenance: Provenance) -> Result<Self, CliError> {
        fs::create_dir_all(&dir).map_err(|e| CliError::config(dir.display(), e))?;
        Ok(Output { dir, provenance })
    }

    pub fn path(&self, name: &str) -> PathBuf {
        self.dir.join(name)
    }

    fn write(&self, name: &str, body: &[u8]) -> Result<PathBuf, CliError> {
        let path = self.path(name);
        fs::write(&path, body).map_err(|e| CliError::config(path.display(), e))?;
        Ok(path)
    }

    /// CSV (or plain text) with a leading `# ` provenance line.
    pub fn write_csv(&self, name: &str, body: &[u8]) -> Result<PathBuf, CliError> {
        let mut text = format!("# {}\n", self.provenance.line()).into_bytes();
        text.extend_from_slice(body);
        self.write(name, &text)
    }

    /// JSON object with a `provenance` member added at the top.
    pub fn write_json(&self, name: &str, value: serde_json::Value) -> Result<PathBuf, CliError> {
        let mut doc = serde_json::Map::new();
        doc.insert("provenance".into(), serde_json::Value::String(self.provenance.line()));
        match value {
            serde_json::Value::Object(map) => doc.extend(map),
            other => {
                doc.insert("data".into(), other);
            }
        }
        let mut text = serde_json::to_string_pretty(&serde_json::Value::Object(doc)).expect("json serialises");
        text.push('\n');
        self.write(name, text.as_bytes())
    }
}
