use std::process::{Command, Output};

fn polyirr(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_polyirr"))
        .args(args)
        .env("POLYIRR_THREADS", "2")
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

#[test]
fn census_of_quadratics() {
    let out = polyirr(&["census", "--d", "2", "--K", "2"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("d,K,total,reducible,mode,runtime_ms"));
    let row: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert_eq!(&row[..4], ["2", "2", "20", "5"]);
}

#[test]
fn bounds_table_has_one_row_per_pair() {
    let out = polyirr(&["bounds", "--d", "10,100", "--K", "1,4"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.starts_with("d,K,m0,m1,"));
    assert_eq!(text.lines().count(), 5);
}

#[test]
fn verify_cyclotomic_passes() {
    let out = polyirr(&["verify", "cyclotomic"]);
    assert_eq!(out.status.code(), Some(0));
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(report["checks"].as_array().is_some_and(|c| !c.is_empty()));
}

#[test]
fn sampling_is_reproducible() {
    let args = ["sample", "--d", "12", "--K", "3", "--trials", "5", "--seed", "42"];
    let (a, b) = (polyirr(&args), polyirr(&args));
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(stdout(&a).lines().count(), 5);
}

#[test]
fn estimate_writes_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().to_str().unwrap();
    let out = polyirr(&[
        "estimate", "--d", "8", "--K", "2", "--trials", "500", "--seed", "3", "--out", out_dir,
    ]);
    assert_eq!(out.status.code(), Some(0));
    let csv = std::fs::read_to_string(dir.path().join("results.csv")).unwrap();
    assert_eq!(csv, stdout(&out));
    assert!(dir.path().join("manifest.json").exists());
}

#[test]
fn configuration_errors_exit_with_two() {
    assert_eq!(polyirr(&["estimate", "--detector", "bogus", "--d", "5"]).status.code(), Some(2));
    let dir = tempfile::tempdir().unwrap();
    let out = polyirr(&[
        "estimate",
        "--d",
        "100",
        "--detector",
        "full_irreducibility",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("error"));
}

#[test]
fn bad_config_file_exits_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("config.json");
    std::fs::write(&path, r#"{"model": "uniform_symmetric", "unknown_field": 1}"#).unwrap();
    let out = polyirr(&["estimate", "--config", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}
