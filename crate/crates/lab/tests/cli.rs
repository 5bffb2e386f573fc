use std::path::Path;
use std::process::{Command, Output};

fn lab(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bbm-lab")).args(args).env("BBM_LAB_OUT", out).output().expect("binary runs")
}

fn read(dir: &Path, name: &str) -> Vec<u8> {
    std::fs::read(dir.join(name)).unwrap_or_else(|e| panic!("{}: {e}", dir.join(name).display()))
}

#[test]
fn same_seed_gives_identical_files() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    for dir in [&a, &b] {
        let o = lab(&["run", "triangle-model", "--seed", "7", "--replicas", "5000"], dir.path());
        assert!(o.status.code().is_some_and(|c| c <= 1), "{}", String::from_utf8_lossy(&o.stderr));
    }
    for file in ["samples.jsonl", "verdict.json", "plot.csv"] {
        let (x, y) = (a.path().join("triangle-model"), b.path().join("triangle-model"));
        assert_eq!(read(&x, file), read(&y, file), "{file} differs");
    }
}

#[test]
fn different_seeds_differ() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    lab(&["run", "triangle-model", "--seed", "1", "--replicas", "100"], a.path());
    lab(&["run", "triangle-model", "--seed", "2", "--replicas", "100"], b.path());
    let (x, y) = (a.path().join("triangle-model"), b.path().join("triangle-model"));
    assert_ne!(read(&x, "samples.jsonl"), read(&y, "samples.jsonl"));
}

#[test]
fn unknown_experiment_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let o = lab(&["run", "no-such-thing"], dir.path());
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("taboo-validate") && err.contains("Usage"), "{err}");
}

#[test]
fn invalid_parameters_are_config_errors() {
    let dir = tempfile::tempdir().unwrap();
    for args in [&["run", "lemma5-min", "--gamma", "0.5"][..], &["run", "many-to-one", "--replicas", "0"]] {
        assert_eq!(lab(args, dir.path()).status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn config_file_and_flags_combine() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("run.toml");
    std::fs::write(
        &file,
        "experiment = \"many-to-one\"\nreplicas = 50\nseed = 3\n[thresholds]\nmean-within-3-sigma = 1e9\n",
    )
    .unwrap();
    let o = lab(&["run", "--config", file.to_str().unwrap(), "--replicas", "20"], dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let verdict: serde_json::Value =
        serde_json::from_slice(&read(&dir.path().join("many-to-one"), "verdict.json")).unwrap();
    assert_eq!(verdict["params"]["replicas"], 20.0);
    assert_eq!(verdict["seed"], 3);
}

#[test]
fn report_aggregates_runs() {
    let dir = tempfile::tempdir().unwrap();
    let empty = lab(&["report", dir.path().to_str().unwrap()], dir.path());
    assert_eq!(empty.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&empty.stdout).contains("No verdicts found."));

    lab(&["run", "excursion-validate", "--t", "50"], dir.path());
    let o = lab(&["report", dir.path().to_str().unwrap()], dir.path());
    let md = String::from_utf8_lossy(&o.stdout);
    assert!(md.contains("intensity-ratio-d0.1"), "{md}");
    assert!(dir.path().join("report.md").exists() && dir.path().join("report.csv").exists());
}

#[test]
fn list_names_every_experiment() {
    let dir = tempfile::tempdir().unwrap();
    let o = lab(&["list"], dir.path());
    let text = String::from_utf8_lossy(&o.stdout);
    for name in ["taboo-validate", "lemma5-min", "spine-theorem1", "prop3-diagnostic"] {
        assert!(text.contains(name), "{name} missing");
    }
}
