use std::process::{Command, Output};

use tmsv_decoherence::sweep::{read_records_csv, CSV_HEADER};
use tmsv_decoherence::ResultKind;

fn tmsv(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tmsv"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

const SMALL_AMPLITUDE: &[&str] = &[
    "amplitude",
    "--r-max",
    "1.0",
    "--r-steps",
    "5",
    "--d-max",
    "0.8",
    "--d-steps",
    "5",
    "--nbar",
    "0.1",
];

#[test]
fn amplitude_csv_header_and_rows() {
    let out = tmsv(SMALL_AMPLITUDE);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let text = stdout(&out);
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), CSV_HEADER.join(","));
    assert_eq!(lines.count(), 25);
    assert!(!text.contains('\r'));
    let records = read_records_csv(text.as_bytes()).unwrap();
    assert_eq!(records.len(), 25);
    for rec in &records {
        assert_eq!(rec.kind, ResultKind::UpperBound);
        assert_eq!(rec.nbar, Some(0.1));
        assert!(rec.separable.is_some());
        assert!(rec.value >= 0.0);
    }
    // Grid order: r outer, d inner.
    assert_eq!((records[1].r, records[1].d), (0.0, 0.2));
    assert_eq!((records[5].r, records[5].d), (0.25, 0.0));
    let field = text
        .lines()
        .nth(2)
        .unwrap()
        .split(',')
        .nth(3)
        .unwrap()
        .to_string();
    assert!(field.contains('e'), "{field}");
}

#[test]
fn phase_csv_leaves_amplitude_columns_empty() {
    let out = tmsv(&["phase", "--r-steps", "4", "--d-steps", "3"]);
    assert!(out.status.success());
    let records = read_records_csv(stdout(&out).as_bytes()).unwrap();
    assert_eq!(records.len(), 12);
    for rec in &records {
        assert_eq!(rec.kind, ResultKind::Exact);
        assert_eq!(rec.nbar, None);
        assert_eq!(rec.separable, None);
        assert_eq!(rec.k_cutoff, None);
    }
}

#[test]
fn output_independent_of_worker_count() {
    let dir = tempfile::tempdir().unwrap();
    let mut files = Vec::new();
    for workers in ["1", "8"] {
        let path = dir.path().join(format!("w{workers}.csv"));
        let mut args = SMALL_AMPLITUDE.to_vec();
        args.extend(["--workers", workers, "--output", path.to_str().unwrap()]);
        let out = tmsv(&args);
        assert!(out.status.success());
        assert!(out.stdout.is_empty());
        files.push(std::fs::read(&path).unwrap());
    }
    assert_eq!(files[0], files[1]);
}

#[test]
fn json_table_carries_config() {
    let mut args = SMALL_AMPLITUDE.to_vec();
    args.extend(["--format", "json"]);
    let out = tmsv(&args);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["records"].as_array().unwrap().len(), 25);
    assert_eq!(v["config"]["nbar"], 0.1);
    assert_eq!(v["records"][0]["kind"], "upper-bound");
    assert!(v["config"].get("workers").is_none());
}

#[test]
fn border_and_pure_tables() {
    let out = tmsv(&[
        "border",
        "--r-min",
        "1.0",
        "--r-max",
        "1.0",
        "--r-steps",
        "1",
    ]);
    assert!(out.status.success());
    let text = stdout(&out);
    let row: Vec<f64> = text
        .lines()
        .nth(1)
        .unwrap()
        .split(',')
        .map(|s| s.parse().unwrap())
        .collect();
    assert_eq!(text.lines().next().unwrap(), "r,d_star");
    assert!((row[1] - 3.789_476_448_556_907_7).abs() < 1e-12);

    let out = tmsv(&["pure", "--r-min", "1.0", "--r-max", "1.0", "--r-steps", "1"]);
    assert!(out.status.success());
    let value: f64 = stdout(&out)
        .lines()
        .nth(1)
        .unwrap()
        .split(',')
        .nth(1)
        .unwrap()
        .parse()
        .unwrap();
    assert!((value - 2.336_909_300_545_897).abs() < 1e-12);
}

#[test]
fn verify_passes_with_json_report() {
    let out = tmsv(&[
        "verify",
        "amplitude",
        "--r",
        "0.3",
        "--d",
        "0.5",
        "--format",
        "json",
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["passed"], true);
    assert!(v["max_abs_deviation"].as_f64().unwrap() < 1e-6);

    let out = tmsv(&["verify", "phase"]);
    assert!(out.status.success());
    assert!(stdout(&out).contains("PASS"));
}

#[test]
fn exit_codes() {
    // Fixed N = 100 cannot hold the tail below 1e-12 at r = 1.5.
    let out = tmsv(&[
        "phase",
        "--r-min",
        "1.5",
        "--r-max",
        "1.5",
        "--r-steps",
        "1",
        "--fixed-trunc",
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("r=1.5"));

    let out = tmsv(&[
        "phase",
        "--r-min",
        "1.5",
        "--r-max",
        "1.5",
        "--r-steps",
        "1",
        "--d-steps",
        "2",
    ]);
    assert_eq!(out.status.code(), Some(0));

    assert_eq!(tmsv(&["border", "--nbar", "0"]).status.code(), Some(1));
    assert_eq!(tmsv(&["amplitude", "--nbar", "-1"]).status.code(), Some(1));
    assert_eq!(tmsv(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(tmsv(&["phase", "--r-steps", "0"]).status.code(), Some(1));
    assert_eq!(tmsv(&["--help"]).status.code(), Some(0));
}
