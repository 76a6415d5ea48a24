use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

const N3: &str = "points = [\"0\", \"1\", \"-1\"]\nangles = [\"1/2\", \"1/2\", \"1/2\"]\n";
const N4: &str = "points = [\"1\", [\"0\", \"1\"], \"-1\", [\"0\", \"-1\"]]\nangles = [\"3/4\", \"3/4\", \"3/4\", \"3/4\"]\n";

fn write_config(dir: &Path, name: &str, text: &str) -> PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path
}

fn run(args: &[&str], config: &Path, out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_spherecone"))
        .args(args)
        .arg("--config")
        .arg(config)
        .arg("--out")
        .arg(out)
        .output()
        .unwrap()
}

fn read_json(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn check_reports_admissible_configuration() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_config(tmp.path(), "n3.toml", N3);
    let out = tmp.path().join("out");
    let o = run(&["check"], &cfg, &out);
    assert_eq!(o.status.code(), Some(0));
    let r = read_json(&out.join("report.json"));
    assert_eq!(r["exact"]["admissible"], true);
    assert_eq!(r["exact"]["stable"], true);
    assert_eq!(r["exact"]["parabolic_degree_total"], "0");
    assert_eq!(r["exact"]["residue_degree_sum"], "3");
    assert!(r["solver"].is_null());
}

#[test]
fn check_rejects_gauss_bonnet_failure() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_config(tmp.path(), "bad.toml", "points = [\"0\", \"1\", \"-1\"]\nangles = [\"1/4\", \"1/4\", \"1/4\"]\n");
    let out = tmp.path().join("out");
    assert_eq!(run(&["check"], &cfg, &out).status.code(), Some(2));
    let r = read_json(&out.join("report.json"));
    assert_eq!(r["exact"]["gauss_bonnet"], false);
    assert_eq!(r["exact"]["defect_sum"], "9/4");
    assert_eq!(r["exact"]["max_parabolic_degree"], "1/8");

    assert_eq!(run(&["solve"], &cfg, &out).status.code(), Some(2));
    assert!(!out.join("solved.json").exists());
}

#[test]
fn duplicate_points_are_a_usage_error() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_config(tmp.path(), "dup.toml", "points = [\"0\", \"0.0\", \"1\"]\nangles = [\"1/2\", \"1/2\", \"1/2\"]\n");
    let o = run(&["check"], &cfg, &tmp.path().join("out"));
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("coincide"));
}

#[test]
fn missing_config_and_artifact() {
    let o = Command::new(env!("CARGO_BIN_EXE_spherecone")).arg("check").output().unwrap();
    assert_eq!(o.status.code(), Some(1));
    let tmp = TempDir::new().unwrap();
    let cfg = write_config(tmp.path(), "n3.toml", N3);
    assert_eq!(run(&["verify"], &cfg, &tmp.path().join("empty")).status.code(), Some(1));
    assert_eq!(run(&["--grid", "3by3", "sample"], &cfg, &tmp.path().join("empty")).status.code(), Some(1));
}

#[test]
fn report_n3_end_to_end() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_config(tmp.path(), "n3.toml", N3);
    let out = tmp.path().join("out");
    let o = run(&["report", "--grid", "15x15", "--json"], &cfg, &out);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let stdout: Value = serde_json::from_slice(&o.stdout).unwrap();
    let r = read_json(&out.join("report.json"));
    assert_eq!(stdout, r);
    assert!(r["solver"]["defect"].as_f64().unwrap() < 1e-8);
    assert_eq!(r["verification"]["passed"], true);
    let beta = &r["solver"]["accessory"];
    assert!((beta[1][0].as_f64().unwrap() + 9.0 / 16.0).abs() < 1e-12);
    assert!(out.join("solved.json").exists());
    let csv = std::fs::read_to_string(out.join("grid.csv")).unwrap();
    assert_eq!(csv.lines().next(), Some("re z,im z,lambda,chart"));
    // The centre node is the cone point at 0.
    assert_eq!(csv.lines().count() - 1, 15 * 15 - 1);
    assert_eq!(r["sampling"]["skipped"].as_array().unwrap().len(), 1);
}

#[test]
fn tampered_accessory_fails_verification() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_config(tmp.path(), "n3.toml", N3);
    let out = tmp.path().join("out");
    assert_eq!(run(&["solve"], &cfg, &out).status.code(), Some(0));
    assert_eq!(run(&["verify"], &cfg, &out).status.code(), Some(0));

    let solved_path = out.join("solved.json");
    let mut solved = read_json(&solved_path);
    let b = solved["data"]["accessory"][1][0].as_f64().unwrap();
    solved["data"]["accessory"][1][0] = Value::from(b + 0.01);
    std::fs::write(&solved_path, serde_json::to_string(&solved).unwrap()).unwrap();
    assert_eq!(run(&["verify"], &cfg, &out).status.code(), Some(4));
    let r = read_json(&out.join("report.json"));
    assert_eq!(r["verification"]["passed"], false);
    assert_eq!(r["verification"]["certificate_accepted"], false);
}

#[test]
fn unit_square_grid_is_complete_and_deterministic() {
    let tmp = TempDir::new().unwrap();
    let text = "points = [\"2\", \"-2\", [\"0\", \"2\"]]\nangles = [\"1/2\", \"1/2\", \"1/2\"]\n\
                [grid]\ncenter = [0.0, 0.0]\nhalf_width = 1.0\n";
    let cfg = write_config(tmp.path(), "far.toml", text);
    let out = tmp.path().join("out");
    assert_eq!(run(&["solve"], &cfg, &out).status.code(), Some(0));
    assert_eq!(run(&["sample", "--grid", "101x101"], &cfg, &out).status.code(), Some(0));
    let first = std::fs::read(out.join("grid.csv")).unwrap();
    let report_first = std::fs::read(out.join("report.json")).unwrap();
    assert_eq!(String::from_utf8_lossy(&first).lines().count(), 10201 + 1);
    assert_eq!(run(&["sample", "--grid", "101x101"], &cfg, &out).status.code(), Some(0));
    assert!(first == std::fs::read(out.join("grid.csv")).unwrap(), "grid.csv differs between runs");
    assert!(report_first == std::fs::read(out.join("report.json")).unwrap(), "report.json differs between runs");
}

#[test]
fn solve_is_reproducible() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_config(tmp.path(), "n4.toml", N4);
    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
    assert_eq!(run(&["solve", "--seed", "3"], &cfg, &a).status.code(), Some(0));
    assert_eq!(run(&["solve", "--seed", "3"], &cfg, &b).status.code(), Some(0));
    let (sa, sb) = (std::fs::read(a.join("solved.json")).unwrap(), std::fs::read(b.join("solved.json")).unwrap());
    assert!(sa == sb, "solved.json differs between runs");
    let r = read_json(&a.join("report.json"));
    let beta4 = &r["solver"]["accessory"][3];
    assert!(beta4[0].as_f64().unwrap().abs() < 1e-6);
    assert!((beta4[1].as_f64().unwrap() + 7.0 / 32.0).abs() < 1e-6);
    assert!(r["solver"]["symmetry"].as_str().unwrap().contains("2pi/4"));
}

#[test]
fn point_at_infinity_is_normalized() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_config(tmp.path(), "inf.toml", "points = [\"0\", \"1\", \"inf\"]\nangles = [\"1/2\", \"2/3\", \"3/4\"]\n");
    let out = tmp.path().join("out");
    assert_eq!(run(&["check"], &cfg, &out).status.code(), Some(0));
    let r = read_json(&out.join("report.json"));
    let m = &r["provenance"]["mobius"];
    assert_eq!(m["infinite_index"], 2);
    assert_eq!(r["exact"]["points"][2], "0");
}
