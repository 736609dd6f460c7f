use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

fn respoles(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_respoles"))
        .args(args)
        .arg("--output")
        .arg(dir)
        .output()
        .expect("binary runs")
}

fn config(dir: &TempDir, text: &str) -> String {
    let path = dir.path().join("run.toml");
    fs::write(&path, text).unwrap();
    path.display().to_string()
}

const SMALL: &str = r#"
[contour]
kind = "circle"
center = [4.39, -0.4]
radius = 0.2
nodes = 32

[spectrum]
k_min = 3.0
k_max = 5.0
samples = 9

[convergence]
nodes = [8, 16, 32]
limit_offsets = [1e-2, 1e-4, 1e-6]

[mode_map]
grid = { x_min = -1.0, x_max = 1.0, nx = 5, y_min = -1.0, y_max = 1.0, ny = 4 }
"#;

#[test]
fn empty_config_finds_the_rod_resonance() {
    let tmp = TempDir::new().unwrap();
    let cfg = config(&tmp, "");
    let out = tmp.path().join("out");
    let run = respoles(&out, &["find-pole", "--config", &cfg]);
    assert!(run.status.success(), "{}", String::from_utf8_lossy(&run.stderr));
    let report: serde_json::Value = serde_json::from_str(&fs::read_to_string(out.join("pole.json")).unwrap()).unwrap();
    let k = &report["k_p"];
    assert!((k[0].as_f64().unwrap() - 4.3906128330466).abs() < 1e-10);
    assert!((k[1].as_f64().unwrap() + 0.4007189007818).abs() < 1e-10);
    assert_eq!(report["rank"], 1);
    assert!(out.join("find-pole.config.toml").exists());
}

fn snapshot(dir: &Path) -> Vec<(std::ffi::OsString, Vec<u8>)> {
    let mut files: Vec<_> = fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (e.file_name(), fs::read(e.path()).unwrap())
        })
        .collect();
    files.sort();
    files
}

#[test]
fn every_command_is_byte_identical_on_rerun() {
    let tmp = TempDir::new().unwrap();
    let cfg = config(&tmp, SMALL);
    for cmd in ["spectrum", "find-pole", "refine-pole", "mode-map", "convergence", "validate"] {
        let dir = tmp.path().join(cmd);
        let mut runs = Vec::new();
        for _ in 0..2 {
            let run = respoles(&dir, &[cmd, "--config", &cfg]);
            assert!(run.status.success(), "{cmd}: {}", String::from_utf8_lossy(&run.stderr));
            runs.push(snapshot(&dir));
        }
        assert!(runs[0].len() >= 2, "{cmd}");
        for (a, b) in runs[0].iter().zip(&runs[1]) {
            assert_eq!(a.0, b.0);
            assert!(a.1 == b.1, "{cmd}: {:?} differs between runs", a.0);
        }
    }
}

#[test]
fn pole_free_contour_exits_with_3_and_writes_nothing() {
    let tmp = TempDir::new().unwrap();
    let cfg = config(&tmp, SMALL);
    let out = tmp.path().join("out");
    let run = respoles(&out, &["find-pole", "--config", &cfg, "--contour", "circle:3.3,-0.3,0.3"]);
    assert_eq!(run.status.code(), Some(3), "{}", String::from_utf8_lossy(&run.stderr));
    assert!(!out.join("pole.json").exists());
}

#[test]
fn two_poles_exit_with_4() {
    let tmp = TempDir::new().unwrap();
    let cfg = config(&tmp, SMALL);
    let run = respoles(tmp.path(), &["find-pole", "--config", &cfg, "--contour", "circle:4.2,-0.27,0.35", "--nodes", "64"]);
    assert_eq!(run.status.code(), Some(4), "{}", String::from_utf8_lossy(&run.stderr));
}

#[test]
fn bad_config_exits_with_2_and_names_the_line() {
    let tmp = TempDir::new().unwrap();
    let cfg = config(&tmp, "[crystal]\nnx = 3\nradius = -0.1\n");
    let run = respoles(tmp.path(), &["validate", "--config", &cfg]);
    assert_eq!(run.status.code(), Some(2));
    let err = String::from_utf8_lossy(&run.stderr);
    assert!(err.contains("line 3") && err.contains("crystal.radius"), "{err}");
}

#[test]
fn validate_reports_every_check() {
    let tmp = TempDir::new().unwrap();
    let cfg = config(&tmp, SMALL);
    let run = respoles(tmp.path(), &["validate", "--config", &cfg]);
    assert!(run.status.success(), "{}", String::from_utf8_lossy(&run.stderr));
    let report = fs::read_to_string(tmp.path().join("validate.txt")).unwrap();
    assert!(report.lines().count() >= 9, "{report}");
    assert!(report.lines().all(|l| l.starts_with("PASS ")), "{report}");
}

#[test]
fn convergence_writes_sweep_and_diagnostic() {
    let tmp = TempDir::new().unwrap();
    let cfg = config(&tmp, SMALL);
    let run = respoles(tmp.path(), &["convergence", "--config", &cfg]);
    assert!(run.status.success(), "{}", String::from_utf8_lossy(&run.stderr));
    let sweep = fs::read_to_string(tmp.path().join("convergence.csv")).unwrap();
    let mut lines = sweep.lines();
    assert_eq!(lines.next(), Some("N,k_re,k_im,pole_error,eig_re,eig_im,eig_error"));
    assert_eq!(lines.count(), 3);
    let diag = fs::read_to_string(tmp.path().join("limit_diagnostic.csv")).unwrap();
    assert!(diag.lines().skip(1).all(|l| l.ends_with(",DIAGNOSTIC-ONLY")));
}
