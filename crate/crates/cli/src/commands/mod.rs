pub mod calibrate;
pub mod eval;
pub mod extract;
pub mod fuse;
pub mod train;

use std::fs::File;
use std::path::{Path, PathBuf};

use emofuse_core::features::{read_feature_csv, FeatureRow};
use emofuse_core::EmotionLabel;

use crate::config::require_paths;
use crate::error::{CliError, Context};

pub fn parse_label(text: &str) -> Result<EmotionLabel, CliError> {
    text.parse().map_err(|e| CliError::config(format!("label {text:?}"), e))
}

/// Flag values replace the configured list when any are given.
pub fn pick_list<T: Clone>(flags: &[T], configured: &[T]) -> Vec<T> {
    if flags.is_empty() {
        configured.to_vec()
    } else {
        flags.to_vec()
    }
}

pub fn read_rows(path: &Path) -> Result<Vec<FeatureRow>, CliError> {
    require_paths([&path.to_path_buf()])?;
    let file = File::open(path).map_err(|e| CliError::parse(path.display(), e))?;
    read_feature_csv(file).context(path.display())
}

/// Rows of several feature files, in file order.
pub fn read_all_rows(paths: &[PathBuf]) -> Result<Vec<FeatureRow>, CliError> {
    if paths.is_empty() {
        return Err(CliError::Config("no feature files given (--features)".into()));
    }
    require_paths(paths)?;
    let mut rows = Vec::new();
    for p in paths {
        rows.extend(read_rows(p)?);
    }
    Ok(rows)
}

/// Renders into an in-memory buffer with a writer-based serializer.
pub fn render<E>(f: impl FnOnce(&mut Vec<u8>) -> Result<(), E>) -> Result<Vec<u8>, E> {
    let mut buf = Vec::new();
    f(&mut buf)?;
    Ok(buf)
}
