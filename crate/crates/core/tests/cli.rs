use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

const BIN: &str = env!("CARGO_BIN_EXE_reebcheck");

fn run(args: &[&str]) -> Output {
    Command::new(BIN).args(args).output().expect("binary runs")
}

fn with_config(json: &str, args: &[&str]) -> Output {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("config.json");
    std::fs::write(&path, json).unwrap();
    let mut all: Vec<&str> = vec!["--config", path.to_str().unwrap()];
    all.extend_from_slice(args);
    run(&all)
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn rows(text: &str) -> Vec<Vec<String>> {
    text.lines()
        .skip(1)
        .take_while(|l| !l.starts_with('#'))
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

fn column(header: &str, name: &str) -> usize {
    header.split(',').position(|c| c == name).unwrap()
}

#[test]
fn catalog_listing() {
    let o = run(&["catalog"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert_eq!(text.lines().count(), 7);
    assert!(text.lines().next().unwrap().starts_with("euclidean_parallel"));
    let v: Value = serde_json::from_slice(&run(&["catalog", "--json"]).stdout).unwrap();
    assert_eq!(v.as_array().unwrap().len(), 7);
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(run(&[]).status.code(), Some(2));
    assert_eq!(run(&["analyze", "--entry", "nope"]).status.code(), Some(2));
    assert_eq!(with_config(r#"{"manifold": "h3_vertical", "gird": null}"#, &["analyze"]).status.code(), Some(2));
    assert_eq!(with_config("{not json", &["analyze"]).status.code(), Some(2));
}

#[test]
fn analyze_h3_grid() {
    let o = with_config(
        r#"{"manifold": "h3_vertical", "grid": {"min": [-1, -1, 0.5], "max": [1, 1, 2], "counts": [3, 3, 3]}}"#,
        &["analyze"],
    );
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let text = stdout(&o);
    let header = text.lines().next().unwrap();
    assert_eq!(
        header,
        "x1,x2,x3,unit_defect,geodesic_defect,killing_defect,contact_defect,eig_kind,eig_re1,eig_im1,eig_re2,eig_im2,ric_X,Delta,delta,beta_rank"
    );
    let rows = rows(&text);
    assert_eq!(rows.len(), 27);
    let cd = column(header, "contact_defect");
    assert!(rows.iter().all(|r| r[cd].parse::<f64>().unwrap().abs() < 1e-8));
    assert!(text.lines().any(|l| l.starts_with("# config ")));
}

#[test]
fn analyze_hopf_is_complex() {
    let o = run(&["analyze", "--entry", "s3_hopf"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let kind = column(text.lines().next().unwrap(), "eig_kind");
    let rows = rows(&text);
    assert_eq!(rows.len(), 125);
    assert!(rows.iter().all(|r| r[kind] == "complex"));
}

#[test]
fn analyze_lists_out_of_chart_points() {
    let o = with_config(
        r#"{"manifold": "h3_vertical", "grid": {"min": [0, 0, -1], "max": [0, 0, 1], "counts": [1, 1, 3]}}"#,
        &["analyze"],
    );
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert_eq!(rows(&text).len(), 1);
    let block: Vec<&str> = text.lines().skip_while(|l| *l != "# out_of_chart").collect();
    assert!(block.len() >= 3, "{text}");
    assert!(block[1..3].iter().all(|l| l.starts_with("# ")));
}

#[test]
fn analyze_rejects_non_unit_field() {
    let o = with_config(
        r#"{"manifold": "euclidean_parallel", "field": {"components": ["0", "0", "2"]}}"#,
        &["analyze"],
    );
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn orbit_h3_wronskian_ratio() {
    let o = with_config(r#"{"manifold": "h3_vertical", "orbit": {"start": [0, 0, 1], "t_end": 2}}"#, &["orbit"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let header = text.lines().next().unwrap();
    assert_eq!(
        header,
        "t,x1,x2,x3,tr_beta,det_beta,discriminant,contact_defect,A_numeric,A_expected,riccati_residual,adapted_residual"
    );
    let (t, a, e) = (column(header, "t"), column(header, "A_numeric"), column(header, "A_expected"));
    let rows = rows(&text);
    assert_eq!(rows.len(), 2001);
    for r in &rows {
        let (t, a, e): (f64, f64, f64) = (r[t].parse().unwrap(), r[a].parse().unwrap(), r[e].parse().unwrap());
        assert!((a / e - 1.0).abs() <= 1e-4);
        assert!((a / (-2.0 * t).exp() - 1.0).abs() <= 1e-4);
    }
}

#[test]
fn orbit_hopf_is_periodic() {
    let o = with_config(
        r#"{"manifold": "s3_hopf", "orbit": {"start": [0.5, 0, 0], "t_end": 6.283185307179586}}"#,
        &["orbit"],
    );
    assert_eq!(o.status.code(), Some(0));
    let rows = rows(&stdout(&o));
    let p = |r: &Vec<String>| [1, 2, 3].map(|i| r[i].parse::<f64>().unwrap());
    let (a, b) = (p(&rows[0]), p(rows.last().unwrap()));
    assert!((0..3).map(|i| (a[i] - b[i]).powi(2)).sum::<f64>().sqrt() < 1e-6);
}

#[test]
fn orbit_euclidean_residuals_vanish() {
    let o = run(&["orbit", "--entry", "euclidean_parallel"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let header = text.lines().next().unwrap();
    let cols = ["riccati_residual", "adapted_residual"].map(|c| column(header, c));
    for r in rows(&text) {
        assert!(cols.iter().all(|&c| r[c].parse::<f64>().unwrap() == 0.0));
    }
}

#[test]
fn verify_master_suite() {
    let o = run(&["verify", "--all"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    let reports = v["reports"].as_array().unwrap();
    assert!(!reports.is_empty());
    assert!(reports.iter().all(|r| r["verdict"] != "violated"));
}

fn single_verdict(args: &[&str]) -> String {
    let o = run(args);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    let reports = v["reports"].as_array().unwrap();
    assert_eq!(reports.len(), 1);
    reports[0]["verdict"].as_str().unwrap().to_string()
}

#[test]
fn verify_single_theorems() {
    assert_eq!(single_verdict(&["verify", "T5.1", "--entry", "s3_hopf", "--c", "1"]), "consistent");
    assert_eq!(single_verdict(&["verify", "T6.1", "--entry", "h2xr_vertical"]), "hypotheses-not-met");
    assert_eq!(run(&["verify", "T9.9", "--entry", "s3_hopf"]).status.code(), Some(2));
}

fn volume(args: &[&str]) -> Value {
    let o = run(args);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    serde_json::from_slice(&o.stdout).unwrap()
}

#[test]
fn volume_command() {
    let v = volume(&["volume", "--entry", "s3_hopf", "--nodes", "64"]);
    let value = v["result"]["value"].as_f64().unwrap();
    assert!((value.abs() / 39.4784176 - 1.0).abs() < 0.01, "{value}");
    let err = |n: &str| volume(&["volume", "--entry", "s3_hopf", "--nodes", n])["result"]["estimated_error"].as_f64().unwrap();
    assert!(err("16") < err("8"));
    let o = run(&["volume", "--entry", "h3_vertical"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("NoParametrization"));
}

#[test]
fn reports_are_byte_identical() {
    for args in [
        &["analyze", "--entry", "heisenberg_reeb"][..],
        &["orbit", "--entry", "s3_hopf"],
        &["verify", "--all"],
        &["volume", "--entry", "s3_weighted", "--nodes", "16"],
    ] {
        let (a, b) = (run(args), run(args));
        assert_eq!(a.status.code(), b.status.code());
        assert_eq!(a.stdout, b.stdout, "{args:?}");
    }
}

#[test]
fn out_flag_writes_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("r.csv");
    let o = run(&["analyze", "--entry", "euclidean_parallel", "--out", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());
    let text = std::fs::read_to_string(Path::new(&path)).unwrap();
    assert_eq!(rows(&text).len(), 125);
    assert!(!text.contains('\r'));
}
