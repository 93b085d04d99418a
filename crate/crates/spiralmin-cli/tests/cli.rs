//! End-to-end tests of the command-line interface: config handling, output
//! formats, and the exit-code contract.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> PathBuf {
    PathBuf::from(env!("CARGO_BIN_EXE_spiralmin"))
}

fn run(args: &[&str]) -> Output {
    Command::new(bin()).args(args).output().expect("binary runs")
}

fn tmp(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join("spiralmin-cli-tests");
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

fn write(path: &Path, content: &str) {
    std::fs::write(path, content).unwrap();
}

#[test]
fn unknown_config_key_exits_2_naming_it() {
    let config = tmp("unknown.json");
    write(&config, "{\"delta\": 0.05, \"detla\": 1}");
    let out = run(&["solve", "--config", config.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("detla"), "stderr must name the key: {err}");
}

#[test]
fn negative_delta_exits_2_naming_delta() {
    let config = tmp("negdelta.json");
    write(&config, "{\"delta\": -1}");
    let out = run(&["export-mesh", "--flat", "--config", config.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("delta"), "stderr must name delta: {err}");
}

#[test]
fn delta_above_cap_exits_2() {
    let out = run(&["geometry-check", "--delta", "0.5"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn empty_config_file_uses_defaults() {
    let config = tmp("empty.json");
    write(&config, "");
    let output = tmp("defaults.obj");
    let out = run(&[
        "export-mesh",
        "--flat",
        "--config",
        config.to_str().unwrap(),
        "--output",
        output.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{out:?}");
    // default mesh density 50 x 200
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("10000 vertices"), "{text}");
}

#[test]
fn flags_override_config_values() {
    let config = tmp("override.json");
    write(&config, "{\"delta\": 0.15, \"grid_n\": 501}");
    let output = tmp("override.csv");
    let out = run(&[
        "solve",
        "--config",
        config.to_str().unwrap(),
        "--delta",
        "0.05",
        "--output",
        output.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{out:?}");
    let report = std::fs::read_to_string(output.with_extension("report.json")).unwrap();
    assert!(report.contains("\"delta\": 5.0000000000000003e-2"), "{report}");
}

#[test]
fn solve_csv_round_trips_into_mesh_export() {
    let profile = tmp("roundtrip.csv");
    let out = run(&[
        "solve",
        "--delta",
        "0.05",
        "--grid-n",
        "501",
        "--output",
        profile.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{out:?}");
    let csv = std::fs::read_to_string(&profile).unwrap();
    assert!(csv.starts_with("s,u,du,ddu,Q\n"));
    assert_eq!(csv.lines().count(), 502);

    let obj = tmp("roundtrip.obj");
    let config = tmp("roundtrip-mesh.json");
    write(&config, "{\"delta\": 0.05, \"mesh_n_s\": 20, \"mesh_n_theta\": 40}");
    let out = run(&[
        "export-mesh",
        "--config",
        config.to_str().unwrap(),
        "--u-file",
        profile.to_str().unwrap(),
        "--output",
        obj.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{out:?}");
    let obj_text = std::fs::read_to_string(&obj).unwrap();
    assert_eq!(obj_text.lines().filter(|l| l.starts_with("v ")).count(), 800);
    assert_eq!(obj_text.lines().filter(|l| l.starts_with("f ")).count(), 2 * 19 * 39);
    // 1-based indices
    assert!(!obj_text.lines().any(|l| l.starts_with("f 0 ") || l.contains(" 0\n")));
}

#[test]
fn export_mesh_requires_profile_or_flat() {
    let out = run(&["export-mesh", "--delta", "0.1"]);
    assert_eq!(out.status.code(), Some(2));
    let out = run(&["export-mesh", "--delta", "0.1", "--flat", "--u-file", "x.csv"]);
    assert_eq!(out.status.code(), Some(2));
    let out = run(&["export-mesh", "--delta", "0.1", "--u-file", "/nonexistent/u.csv"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn export_mesh_is_deterministic() {
    let a = tmp("det-a.obj");
    let b = tmp("det-b.obj");
    for out in [&a, &b] {
        let config = tmp("det.json");
        write(&config, "{\"delta\": 0.1, \"mesh_n_s\": 15, \"mesh_n_theta\": 30}");
        let status = run(&[
            "export-mesh",
            "--flat",
            "--config",
            config.to_str().unwrap(),
            "--output",
            out.to_str().unwrap(),
        ]);
        assert_eq!(status.status.code(), Some(0));
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
}

#[test]
fn geometry_check_passes_at_default_delta() {
    let report = tmp("geom.json");
    let out = run(&["geometry-check", "--delta", "0.1", "--output", report.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{out:?}");
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("H-sign-convention: trace(+) vs Corollary(-)"));
    let json = std::fs::read_to_string(&report).unwrap();
    assert!(json.contains("\"all_passed\": true"));
}

#[test]
fn verify_flags_a_non_solution_profile() {
    // a profile far outside the displacement envelope must fail checks
    let profile = tmp("garbage.csv");
    let mut csv = String::from("s,u,du,ddu,Q\n");
    let n = 501;
    let half = 0.5 * 0.05f64.powf(-0.25);
    for i in 0..n {
        let s = -half + 2.0 * half * i as f64 / (n - 1) as f64;
        csv.push_str(&format!("{},{},0,0,0\n", s, 0.3 * s * s));
    }
    write(&profile, &csv);
    let out = run(&[
        "verify",
        "--delta",
        "0.05",
        "--u-file",
        profile.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(1), "{out:?}");
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("FAIL"), "{text}");
}
