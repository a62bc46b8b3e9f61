use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

macro_rules! fixture {
    ($name:literal) => {
        concat!(env!("CARGO_MANIFEST_DIR"), "/../../fixtures/", $name)
    };
}

macro_rules! table {
    ($name:literal) => {
        concat!(env!("CARGO_MANIFEST_DIR"), "/../../tables/", $name)
    };
}

fn emofuse(out: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_emofuse")).arg("--out").arg(out).args(args).output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

/// Data lines of a CSV written by the CLI, header line first, `#` lines dropped.
fn csv_lines(path: &Path) -> Vec<String> {
    fs::read_to_string(path).unwrap().lines().filter(|l| !l.starts_with('#')).map(str::to_string).collect()
}

#[test]
fn extract_hand_window_has_96_features() {
    let dir = TempDir::new().unwrap();
    let o = emofuse(dir.path(), &["extract", "--input", fixture!("hand_stream.csv"), "--modality", "hand", "--label", "Happy"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let lines = csv_lines(&dir.path().join("features.csv"));
    assert_eq!(lines.len(), 2);
    let header: Vec<&str> = lines[0].split(',').collect();
    // no bundle tag given, so only the label column follows the features
    assert_eq!(header.len(), 96 + 1);
    assert_eq!(header[96], "label");
    let row: Vec<&str> = lines[1].split(',').collect();
    assert_eq!(row[96], "1");
}

#[test]
fn provenance_header_and_determinism() {
    let a = TempDir::new().unwrap();
    let b = TempDir::new().unwrap();
    let args = ["--seed", "7", "extract", "--input", fixture!("hand_stream.csv"), "--modality", "hand"];
    assert_eq!(code(&emofuse(a.path(), &args)), 0);
    assert_eq!(code(&emofuse(b.path(), &args)), 0);
    let (fa, fb) = (fs::read(a.path().join("features.csv")).unwrap(), fs::read(b.path().join("features.csv")).unwrap());
    assert_eq!(fa, fb);
    let first = String::from_utf8(fa).unwrap().lines().next().unwrap().to_string();
    assert!(first.starts_with("# emofuse "), "{first}");
    assert!(first.contains(" seed=7 config="), "{first}");
    let hash = first.rsplit("config=").next().unwrap();
    assert_eq!(hash.len(), 64);

    // a different effective setting changes the hash
    let c = TempDir::new().unwrap();
    assert_eq!(
        code(&emofuse(
            c.path(),
            &["--seed", "7", "extract", "--input", fixture!("hand_stream.csv"), "--modality", "hand", "--window", "50"]
        )),
        0
    );
    let other = fs::read_to_string(c.path().join("features.csv")).unwrap();
    assert_ne!(other.lines().next().unwrap(), first);
}

#[test]
fn empty_input_directory_is_a_parse_error() {
    let dir = TempDir::new().unwrap();
    let empty = dir.path().join("empty");
    fs::create_dir(&empty).unwrap();
    let o = emofuse(dir.path(), &["extract", "--input", p(&empty), "--modality", "hand"]);
    assert_eq!(code(&o), 2);
}

#[test]
fn malformed_stream_is_a_parse_error() {
    let dir = TempDir::new().unwrap();
    let bad = dir.path().join("bad.csv");
    fs::write(&bad, "frame,timestamp,p0_x\n0,0.0,not-a-number\n").unwrap();
    assert_eq!(code(&emofuse(dir.path(), &["extract", "--input", p(&bad), "--modality", "hand"])), 2);
}

#[test]
fn missing_input_file_is_a_config_error() {
    let dir = TempDir::new().unwrap();
    let o = emofuse(dir.path(), &["extract", "--input", p(&dir.path().join("nope.csv")), "--modality", "hand"]);
    assert_eq!(code(&o), 3);
}

#[test]
fn unknown_flag_is_a_config_error() {
    let dir = TempDir::new().unwrap();
    assert_eq!(code(&emofuse(dir.path(), &["fuse", "--no-such-flag"])), 3);
}

#[test]
fn elbow_calibration_gives_92_to_95() {
    let dir = TempDir::new().unwrap();
    let o = emofuse(dir.path(), &["calibrate", "--bundles", fixture!("elbow_bundle.json"), "--features", fixture!("elbow_exemplars.csv")]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let doc: serde_json::Value = serde_json::from_str(&fs::read_to_string(dir.path().join("calibrated_bundles.json")).unwrap()).unwrap();
    assert!(doc["provenance"].as_str().unwrap().starts_with("emofuse "));
    let rule = &doc["bundles"][0]["rules"][0];
    assert_eq!((rule["min"].as_f64(), rule["max"].as_f64()), (Some(92.0), Some(95.0)));
    assert_eq!(csv_lines(&dir.path().join("calibration_report.csv"))[1], "hands_on_waist,R1,92,95,3");

    let wide = TempDir::new().unwrap();
    let args = ["calibrate", "--bundles", fixture!("elbow_bundle.json"), "--features", fixture!("elbow_exemplars.csv"), "--margin", "0.1"];
    assert_eq!(code(&emofuse(wide.path(), &args)), 0);
    let doc: serde_json::Value = serde_json::from_str(&fs::read_to_string(wide.path().join("calibrated_bundles.json")).unwrap()).unwrap();
    let rule = &doc["bundles"][0]["rules"][0];
    assert!((rule["min"].as_f64().unwrap() - 91.7).abs() < 1e-9);
    assert!((rule["max"].as_f64().unwrap() - 95.3).abs() < 1e-9);
}

#[test]
fn calibration_without_the_descriptor_is_a_config_error() {
    let dir = TempDir::new().unwrap();
    // the blob features carry no elbow angle column
    let o = emofuse(dir.path(), &["calibrate", "--bundles", fixture!("elbow_bundle.json"), "--features", fixture!("blobs.csv")]);
    assert_eq!(code(&o), 3, "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn calibrated_bundles_load_back_for_fusion() {
    let dir = TempDir::new().unwrap();
    let args = ["calibrate", "--bundles", fixture!("elbow_bundle.json"), "--features", fixture!("elbow_exemplars.csv")];
    assert_eq!(code(&emofuse(dir.path(), &args)), 0);
    let spec = format!("rule:{}:{}", fixture!("elbow_exemplars.csv"), p(&dir.path().join("calibrated_bundles.json")));
    let out = dir.path().join("fused");
    let o = emofuse(&out, &["fuse", "--source", &spec, "--buffer", "3"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).contains("final 0 (Anger)"), "{}", stdout(&o));
}

#[test]
fn train_blobs_with_cross_validation() {
    let dir = TempDir::new().unwrap();
    let o = emofuse(dir.path(), &["train", "--features", fixture!("blobs.csv"), "--cv", "10", "--gamma", "0.0625"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let model: serde_json::Value = serde_json::from_str(&fs::read_to_string(dir.path().join("model.json")).unwrap()).unwrap();
    assert_eq!(model["model"]["params"]["gamma"].as_f64(), Some(0.0625));
    assert_eq!(model["descriptors"].as_array().unwrap().len(), 2);
    assert!(model["provenance"].is_string());
    let cv = csv_lines(&dir.path().join("model_cv.csv"));
    assert_eq!(cv.len(), 1 + 10 + 1);
    let mean: f64 = cv.last().unwrap().split(',').nth(1).unwrap().parse().unwrap();
    assert!(mean >= 0.9, "{mean}");
    assert_eq!(csv_lines(&dir.path().join("model_pairs.csv")).len(), 1 + 3);
}

#[test]
fn more_folds_than_samples_is_a_config_error() {
    let dir = TempDir::new().unwrap();
    assert_eq!(code(&emofuse(dir.path(), &["train", "--features", fixture!("blobs.csv"), "--cv", "91"])), 3);
}

#[test]
fn table3_replay_predicts_fear() {
    let dir = TempDir::new().unwrap();
    let o = emofuse(dir.path(), &["fuse", "--replay", fixture!("table3_replay.csv")]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("final 4 (Fear)"), "{}", stdout(&o));
    let preds = csv_lines(&dir.path().join("predictions.csv"));
    assert_eq!(preds.len(), 2);
    assert!(!dir.path().join("audit.csv").exists());

    let off = TempDir::new().unwrap();
    let o = emofuse(off.path(), &["fuse", "--replay", fixture!("table3_replay.csv"), "--disable", "rule"]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("final 4 (Fear)"));
    let audit = csv_lines(&off.path().join("audit.csv"));
    assert_eq!(audit.len(), 1 + 10);
    assert!(audit[1..].iter().all(|l| l.split(',').nth(1) == Some("rule")));
}

#[test]
fn bad_fusion_settings_are_config_errors() {
    let dir = TempDir::new().unwrap();
    let replay = fixture!("table3_replay.csv");
    assert_eq!(code(&emofuse(dir.path(), &["fuse", "--replay", replay, "--buffer", "0"])), 3);
    assert_eq!(code(&emofuse(dir.path(), &["fuse", "--replay", replay, "--mode", "rolling"])), 3);
    assert_eq!(code(&emofuse(dir.path(), &["fuse", "--replay", replay, "--disable", "smell"])), 3);
    // no truth column, so a sweep cannot be scored
    assert_eq!(code(&emofuse(dir.path(), &["fuse", "--replay", replay, "--sweep", "5"])), 3);
}

#[test]
fn sweep_reports_each_size() {
    let dir = TempDir::new().unwrap();
    let o = emofuse(dir.path(), &["fuse", "--replay", fixture!("noisy_sweep.csv"), "--sweep", "5,10,15,20,25"]);
    assert_eq!(code(&o), 0);
    let rows = csv_lines(&dir.path().join("sweep.csv"));
    assert_eq!(rows[0], "size,predictions,correct,unfilled_segments,accuracy");
    let sizes: Vec<&str> = rows[1..].iter().map(|r| r.split(',').next().unwrap()).collect();
    assert_eq!(sizes, ["5", "10", "15", "20", "25"]);
}

#[test]
fn config_file_supplies_settings() {
    let dir = TempDir::new().unwrap();
    let config = dir.path().join("run.toml");
    fs::write(&config, format!("seed = 3\n\n[fuse]\nreplay = {:?}\nsweep = [5, 10]\n", fixture!("noisy_sweep.csv"))).unwrap();
    let o = emofuse(dir.path(), &["--config", p(&config), "fuse"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(csv_lines(&dir.path().join("sweep.csv")).len(), 3);
    let header = fs::read_to_string(dir.path().join("sweep.csv")).unwrap();
    assert!(header.lines().next().unwrap().contains(" seed=3 "));

    fs::write(&config, "[fuse]\nbuffer_size = 4\n").unwrap();
    assert_eq!(code(&emofuse(dir.path(), &["--config", p(&config), "fuse"])), 3);
}

#[test]
fn eval_table4_passes_and_a_perturbed_reference_fails() {
    let dir = TempDir::new().unwrap();
    let o = emofuse(dir.path(), &["eval", "--matrix", table!("table4.csv")]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    assert!(stdout(&o).contains("-> pass"));
    let diff = csv_lines(&dir.path().join("diff.csv"));
    assert!(diff.len() > 1);

    let reference = fs::read_to_string(table!("table16.csv")).unwrap();
    let mut lines: Vec<String> = reference.lines().map(str::to_string).collect();
    let row = lines.iter().position(|l| l.starts_with("Anger") || l.starts_with('0')).expect("an Anger row");
    lines[row] = lines[row].replacen("0.651", "0.661", 1);
    assert!(lines[row].contains("0.661"), "{}", lines[row]);
    let perturbed = dir.path().join("perturbed.csv");
    fs::write(&perturbed, lines.join("\n") + "\n").unwrap();
    let o = emofuse(dir.path(), &["eval", "--matrix", table!("table4.csv"), "--reference", p(&perturbed)]);
    assert_eq!(code(&o), 1, "{}", stdout(&o));
    assert!(stdout(&o).contains("FAIL Anger precision"), "{}", stdout(&o));
}

#[test]
fn eval_all_tables_pass() {
    let dir = TempDir::new().unwrap();
    let o = emofuse(dir.path(), &["eval", "--all"]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    let rows = csv_lines(&dir.path().join("all_tables.csv"));
    assert_eq!(rows.len(), 1 + 8);
    assert!(rows[1..].iter().all(|r| r.ends_with(",true")));
}

#[test]
fn eval_predictions_builds_a_matrix() {
    let dir = TempDir::new().unwrap();
    let preds = dir.path().join("preds.csv");
    fs::write(&preds, "truth,prediction\n0,0\n0,4\n4,4\n4,-\n").unwrap();
    let o = emofuse(dir.path(), &["eval", "--predictions", p(&preds)]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("overall accuracy 0.6667 (2 of 3)"), "{}", stdout(&o));
    assert!(stdout(&o).contains("1 events without a decision"));
    assert!(dir.path().join("confusion.csv").exists());
}

#[test]
fn label_mapping_outputs() {
    let dir = TempDir::new().unwrap();
    let o = emofuse(dir.path(), &["eval", "--mapping", "ucfkinect", "--actions", fixture!("actions_ucfkinect.txt")]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let labeled = csv_lines(&dir.path().join("labeled.csv"));
    assert!(labeled.iter().any(|l| l.contains("\"Punch\",Anger,0,")));
    assert!(labeled.iter().any(|l| l.contains("\"Step back\",Fear,4,0.8")));
    let excluded = csv_lines(&dir.path().join("exclusions.csv"));
    assert!(excluded.iter().any(|l| l.ends_with("\"Juggle\",unknown_action")));
    assert_eq!(excluded.iter().filter(|l| l.ends_with(",inconclusive")).count(), 6);

    assert_eq!(code(&emofuse(dir.path(), &["eval", "--mapping", "ucfkinect"])), 3);
    assert_eq!(code(&emofuse(dir.path(), &["eval", "--mapping", "nowhere", "--actions", fixture!("actions_ucfkinect.txt")])), 3);
}
