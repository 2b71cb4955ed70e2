use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use posecast::harness::{load_trace, REPEATS_HEADER, SAMPLES_HEADER, SUMMARY_HEADER};

fn posecast(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_posecast"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn synth(dir: &Path, profile: &str, seconds: &str) -> String {
    let out = dir.join(format!("{profile}.csv"));
    let out = out.to_str().unwrap().to_string();
    let o = posecast(&["synth", "--profile", profile, "--duration", seconds, "--seed", "2", "--out", &out]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    out
}

#[test]
fn synth_writes_a_loadable_trace() {
    let dir = tempfile::tempdir().unwrap();
    let path = synth(dir.path(), "medium", "3");
    let text = fs::read_to_string(&path).unwrap();
    assert!(text.starts_with("t,px,py,pz,qw,qx,qy,qz\n"));
    assert_eq!(load_trace(&path).unwrap().len(), 300);
}

#[test]
fn classify_prints_one_row_per_chunk() {
    let dir = tempfile::tempdir().unwrap();
    let path = synth(dir.path(), "easy", "10");
    let o = posecast(&["classify", "--input", &path, "--chunk-len", "250"]);
    assert!(o.status.success());
    let stdout = String::from_utf8(o.stdout).unwrap();
    let lines: Vec<&str> = stdout.lines().collect();
    assert_eq!(lines[0], "chunk,start_index,t_start,entropy_bits,class");
    assert_eq!(lines.len(), 1 + 4);
    // thresholds are flags
    let o = posecast(&["classify", "--input", &path, "--h-low", "0.1", "--h-high", "0.2"]);
    let stdout = String::from_utf8(o.stdout).unwrap();
    assert!(stdout.lines().skip(1).all(|l| l.ends_with(",hard")));
}

#[test]
fn predict_prints_per_tick_rows() {
    let dir = tempfile::tempdir().unwrap();
    let path = synth(dir.path(), "hard", "2");
    let o = posecast(&[
        "predict", "--input", &path, "--model", "p2o3", "--horizon-ms", "50", "--drop-rate", "0.2", "--seed", "4",
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let stdout = String::from_utf8(o.stdout).unwrap();
    // ticks 1..=194 have ground truth 5 ticks ahead
    assert_eq!(stdout.lines().count(), 1 + 194);
    let row: Vec<&str> = stdout.lines().nth(1).unwrap().split(',').collect();
    assert_eq!(row.len(), 12);
}

#[test]
fn bench_writes_report_files() {
    let dir = tempfile::tempdir().unwrap();
    let a = synth(dir.path(), "easy", "6");
    let b = synth(dir.path(), "hard", "6");
    let out = dir.path().join("report");
    let o = posecast(&[
        "bench", "--input", &a, &b, "--models", "kf,p3o3", "--horizons", "20,60", "--drop-rates", "0,0.5",
        "--repeats", "2", "--seed", "1", "--samples", "--out", out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let summary = fs::read_to_string(out.join("summary.csv")).unwrap();
    let repeats = fs::read_to_string(out.join("repeats.csv")).unwrap();
    let samples = fs::read_to_string(out.join("samples.csv")).unwrap();
    assert_eq!(summary.lines().next().unwrap(), SUMMARY_HEADER);
    assert_eq!(repeats.lines().next().unwrap(), REPEATS_HEADER);
    assert_eq!(samples.lines().next().unwrap(), SAMPLES_HEADER);
    let classes: std::collections::BTreeSet<&str> =
        summary.lines().skip(1).map(|l| l.split(',').nth(1).unwrap()).collect();
    let cells = 2 * 2 * 2;
    assert_eq!(summary.lines().count() - 1, cells * classes.len());
    assert_eq!(repeats.lines().count() - 1, cells * classes.len() * 2);
    assert!(samples.lines().count() > 1000);
    assert!(out.join("table.txt").exists());
}

#[test]
fn errors_exit_nonzero_with_diagnostic() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("none.csv");
    let o = posecast(&["predict", "--input", missing.to_str().unwrap(), "--model", "kf", "--horizon-ms", "50"]);
    assert!(!o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).contains("none.csv"));

    let bad = dir.path().join("bad.csv");
    fs::write(&bad, "t,px,py,pz,qw,qx,qy,qz\n0,0,0,0,1,0,0,0\n0.01,0,0,0,1,0\n").unwrap();
    let o = posecast(&["classify", "--input", bad.to_str().unwrap()]);
    assert!(!o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 3"));

    let path = synth(dir.path(), "easy", "1");
    let o = posecast(&["predict", "--input", &path, "--model", "p9o9", "--horizon-ms", "50"]);
    assert!(!o.status.success());
    let o = posecast(&["predict", "--input", &path, "--model", "kf", "--horizon-ms", "50", "--drop-rate", "1.5"]);
    assert!(!o.status.success());
    let o = posecast(&["synth", "--profile", "wild", "--duration", "1", "--out", &path]);
    assert!(!o.status.success());
}
