use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn rfzt(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rfzt"))
        .current_dir(dir)
        .env_remove("RFZT_CORPUS")
        .env_remove("RFZT_MODEL")
        .env_remove("RFZT_PCA_MODEL")
        .env_remove("RFZT_REPORTS")
        .args(args)
        .output()
        .expect("binary runs")
}

fn ok(dir: &Path, args: &[&str]) -> String {
    let out = rfzt(dir, args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn stderr_json(out: &Output) -> serde_json::Value {
    let text = String::from_utf8_lossy(&out.stderr);
    let first = text.lines().next().expect("stderr has an error record");
    serde_json::from_str(first).expect("error record is JSON")
}

fn files(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut v = Vec::new();
    for e in fs::read_dir(dir).unwrap() {
        let path = e.unwrap().path();
        if path.is_dir() {
            let name = path.file_name().unwrap().to_string_lossy().into_owned();
            v.extend(files(&path).into_iter().map(|(n, b)| (format!("{name}/{n}"), b)));
        } else {
            v.push((path.file_name().unwrap().to_string_lossy().into_owned(), fs::read(&path).unwrap()));
        }
    }
    v.sort();
    v
}

#[test]
fn synth_is_reproducible_from_the_seed() {
    let dir = tempfile::tempdir().unwrap();
    ok(dir.path(), &["synth", "--seed", "7", "--per-class", "3", "--segment-len", "256", "--out", "a"]);
    ok(dir.path(), &["synth", "--seed", "7", "--per-class", "3", "--segment-len", "256", "--out", "b"]);
    ok(dir.path(), &["synth", "--seed", "8", "--per-class", "3", "--segment-len", "256", "--out", "c"]);
    let a = files(&dir.path().join("a"));
    assert_eq!(a.len(), 25);
    assert_eq!(a, files(&dir.path().join("b")));
    assert_ne!(a, files(&dir.path().join("c")));
}

#[test]
fn synth_refuses_to_overwrite_without_force() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["synth", "--per-class", "1", "--segment-len", "64", "--out", "raw"];
    ok(dir.path(), &args);
    let out = rfzt(dir.path(), &args);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(stderr_json(&out)["field"], "out");
    let mut forced = args.to_vec();
    forced.push("--force");
    ok(dir.path(), &forced);
}

#[test]
fn invalid_batch_size_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = rfzt(dir.path(), &["train", "--batch-size", "0", "--corpus", "x.csv", "--out", "m.json"]);
    assert_eq!(out.status.code(), Some(2));
    let err = stderr_json(&out);
    assert_eq!(err["error"], "config");
    assert_eq!(err["field"], "batch_size");
    assert!(!dir.path().join("m.json").exists());
}

#[test]
fn unknown_flag_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = rfzt(dir.path(), &["train", "--no-such-flag"]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(stderr_json(&out)["error"], "usage");
}

#[test]
fn help_exits_cleanly() {
    let dir = tempfile::tempdir().unwrap();
    let out = ok(dir.path(), &["--help"]);
    assert!(out.contains("auth-sim"));
}

#[test]
fn missing_input_is_a_runtime_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = rfzt(dir.path(), &["pca", "--corpus", "absent.csv", "--out", "p.json"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn config_file_and_flags_layer_in_order() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("rfzt.toml"), "[train]\nbatch_size = 0\n").unwrap();
    let out = rfzt(dir.path(), &["--config", "rfzt.toml", "train", "--corpus", "x.csv", "--out", "m.json"]);
    assert_eq!(stderr_json(&out)["field"], "batch_size");

    fs::write(dir.path().join("bad.toml"), "[train]\nbatchsize = 3\n").unwrap();
    let out = rfzt(dir.path(), &["--config", "bad.toml", "timing"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn timing_without_artifacts_is_an_empty_report() {
    let dir = tempfile::tempdir().unwrap();
    let stdout = ok(dir.path(), &["timing", "--out", "t.json"]);
    assert!(stdout.contains("no evaluation artifacts"));
    let report: serde_json::Value = serde_json::from_slice(&fs::read(dir.path().join("t.json")).unwrap()).unwrap();
    assert_eq!(report["runs"].as_array().unwrap().len(), 0);
    assert!(report["comparison"].is_null());
    assert!(!report["notices"].as_array().unwrap().is_empty());
}

#[test]
fn pipeline_end_to_end() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    ok(d, &["synth", "--seed", "3", "--per-class", "6", "--out", "raw"]);
    ok(d, &["preprocess", "--input", "raw", "--out", "corpus.csv"]);
    ok(d, &["pca", "--corpus", "corpus.csv", "--out", "pca.json"]);
    ok(d, &["train", "--corpus", "corpus.csv", "--pca-model", "pca.json", "--out", "model.json", "--epochs", "30"]);

    // One timing sample per stage for every instance, with and without projection.
    ok(d, &["evaluate", "--corpus", "corpus.csv", "--folds", "2", "--epochs", "5", "--out-dir", "plain"]);
    ok(
        d,
        &["evaluate", "--corpus", "corpus.csv", "--folds", "2", "--epochs", "5", "--pca", "0.95", "--out-dir", "proj"],
    );
    for sub in ["plain", "proj"] {
        for f in ["report.json", "report.txt", "confusion.csv"] {
            assert!(d.join(sub).join(f).exists(), "{sub}/{f}");
        }
    }
    ok(d, &["timing", "--reports", "plain/report.json", "--reports", "proj/report.json", "--out", "t.json"]);
    let t: serde_json::Value = serde_json::from_slice(&fs::read(d.join("t.json")).unwrap()).unwrap();
    let runs = t["runs"].as_array().unwrap();
    assert_eq!(runs.len(), 2);
    for r in runs {
        assert_eq!(r["samples_per_stage"], 24);
    }
    assert!(runs[0]["pca_components"].is_null());
    assert!(runs[1]["pca_components"].as_u64().unwrap() > 0);
    assert!(t["comparison"].is_object());

    ok(
        d,
        &[
            "explain", "--model", "model.json", "--pca-model", "pca.json", "--corpus", "corpus.csv", "--method",
            "shap-exact", "--features", "0,1,2", "--out", "ex.json",
        ],
    );
    let ex: serde_json::Value = serde_json::from_slice(&fs::read(d.join("ex.json")).unwrap()).unwrap();
    assert_eq!(ex["bin_attribution"].as_array().unwrap().len(), 2047);

    // Every stream row comes from the enrolled class, so trust should hold throughout.
    let corpus = fs::read_to_string(d.join("corpus.csv")).unwrap();
    let mut lines = corpus.lines();
    let header = lines.next().unwrap();
    let rows: Vec<&str> = lines.filter(|l| l.starts_with("0,")).collect();
    assert!(!rows.is_empty(), "corpus rows carry a class label column");
    fs::write(d.join("stream.csv"), format!("{header}\n{}\n", rows.join("\n"))).unwrap();
    ok(
        d,
        &[
            "auth-sim", "--model", "model.json", "--pca-model", "pca.json", "--stream", "stream.csv", "--enrolled",
            "NoDrone", "--out", "log.jsonl",
        ],
    );
    let log = fs::read_to_string(d.join("log.jsonl")).unwrap();
    assert_eq!(log.lines().count(), rows.len());
    for line in log.lines() {
        let v: serde_json::Value = serde_json::from_str(line).unwrap();
        assert_eq!(v["trust"], "granted");
    }
}
