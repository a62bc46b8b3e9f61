//! Regenerates the shipped fixtures.
//!
//! ```text
//! cargo run -p emofuse-core --example gen_fixtures [-- OUT_DIR] [--corpus]
//! ```
//!
//! `OUT_DIR` defaults to the workspace `fixtures/` directory. `--corpus`
//! also writes the synthetic pose corpus (train and test streams).

use std::fs;
use std::path::{Path, PathBuf};

use emofuse_core::synth::fixtures;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut out = PathBuf::from(concat!(env!("CARGO_MANIFEST_DIR"), "/../../fixtures"));
    let mut corpus = false;
    for arg in std::env::args().skip(1) {
        match arg.as_str() {
            "--corpus" => corpus = true,
            other => out = PathBuf::from(other),
        }
    }
    fs::create_dir_all(&out)?;
    for (name, body) in fixtures::shipped() {
        write(&out, &name, &body)?;
    }
    if corpus {
        for (name, body) in fixtures::corpus_files(&fixtures::train_corpus_options(), &fixtures::test_corpus_options()) {
            write(&out, &name, &body)?;
        }
    }
    Ok(())
}

fn write(dir: &Path, name: &str, body: &str) -> std::io::Result<()> {
    let path = dir.join(name);
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent)?;
    }
    fs::write(&path, body)?;
    println!("wrote {}", path.display());
    Ok(())
}
