//! End-to-end tests of the hetflow binary: exit codes, artifact layout,
//! determinism, and the validate dry run.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_hetflow"));
    // Tests control the output directory explicitly; a leaked override
    // from the environment would break them.
    cmd.env_remove("HETFLOW_OUT");
    cmd
}

fn write_cfg(dir: &Path, text: &str) -> PathBuf {
    let path = dir.join("config.txt");
    fs::write(&path, text).unwrap();
    path
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

const CURVE_CFG: &str = "\
# shrinking circle, no forcing
experiment = curve
forcing.kind = constant
forcing.value = 0
curve.shape = circle
curve.radius = 1
curve.nodes = 64
solver.max_time = 0.02
solver.sample_interval = 0.01
";

#[test]
fn run_writes_expected_artifacts() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_cfg(tmp.path(), CURVE_CFG);
    let out_dir = tmp.path().join("out");

    let out = bin()
        .args(["run", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(&out_dir)
        .output()
        .unwrap();
    assert!(out.status.success(), "stderr: {}", stderr(&out));

    for name in ["manifest.json", "snapshots.csv", "diagnostics.csv", "summary.json"] {
        assert!(out_dir.join(name).is_file(), "missing {name}");
    }

    let manifest: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out_dir.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["status"], "ok");
    assert_eq!(manifest["experiment"], "curve");
    assert!(manifest["error"].is_null());

    let summary: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out_dir.join("summary.json")).unwrap()).unwrap();
    assert_eq!(summary["termination"], "reached-max-time");
    let checks = summary["checks"].as_array().unwrap();
    assert!(!checks.is_empty());
    assert!(checks.iter().all(|c| c["ok"].as_bool().unwrap()));

    let snapshots = fs::read_to_string(out_dir.join("snapshots.csv")).unwrap();
    let mut lines = snapshots.lines();
    assert_eq!(lines.next().unwrap(), "t,node,x,y");
    // Three samples (t = 0, 0.01, 0.02) of 64 nodes each.
    assert_eq!(lines.count(), 3 * 64);
    assert!(!snapshots.contains('\r'), "CSV must use LF line endings");
}

#[test]
fn identical_runs_produce_identical_data_files() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_cfg(tmp.path(), CURVE_CFG);
    let dir_a = tmp.path().join("a");
    let dir_b = tmp.path().join("b");

    for dir in [&dir_a, &dir_b] {
        let out = bin()
            .args(["run", "--config"])
            .arg(&cfg)
            .arg("--out")
            .arg(dir)
            .output()
            .unwrap();
        assert!(out.status.success(), "stderr: {}", stderr(&out));
    }

    for name in ["snapshots.csv", "diagnostics.csv", "summary.json"] {
        let a = fs::read(dir_a.join(name)).unwrap();
        let b = fs::read(dir_b.join(name)).unwrap();
        assert_eq!(a, b, "{name} differs between identical runs");
    }

    // Manifests agree on everything except the wall clock.
    let mut ma: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir_a.join("manifest.json")).unwrap()).unwrap();
    let mut mb: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir_b.join("manifest.json")).unwrap()).unwrap();
    ma.as_object_mut().unwrap().remove("wall_seconds");
    mb.as_object_mut().unwrap().remove("wall_seconds");
    assert_eq!(ma, mb);
}

#[test]
fn manifest_echo_reproduces_the_run() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_cfg(tmp.path(), CURVE_CFG);
    let dir_a = tmp.path().join("a");
    let out = bin()
        .args(["run", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(&dir_a)
        .output()
        .unwrap();
    assert!(out.status.success(), "stderr: {}", stderr(&out));

    // Rebuild a config from the manifest's normalized echo.
    let manifest: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir_a.join("manifest.json")).unwrap()).unwrap();
    let echo = manifest["config"].as_object().unwrap();
    let rebuilt: String = echo
        .iter()
        .map(|(k, v)| format!("{k} = {}\n", v.as_str().unwrap()))
        .collect();
    let cfg2 = tmp.path().join("rebuilt.txt");
    fs::write(&cfg2, rebuilt).unwrap();

    // The echo validates and reruns byte-identically.
    let out = bin().args(["validate", "--config"]).arg(&cfg2).output().unwrap();
    assert!(out.status.success(), "stderr: {}", stderr(&out));
    assert!(stdout(&out).contains("ok"));

    let dir_b = tmp.path().join("b");
    let out = bin()
        .args(["run", "--config"])
        .arg(&cfg2)
        .arg("--out")
        .arg(&dir_b)
        .output()
        .unwrap();
    assert!(out.status.success(), "stderr: {}", stderr(&out));
    for name in ["snapshots.csv", "diagnostics.csv", "summary.json"] {
        assert_eq!(
            fs::read(dir_a.join(name)).unwrap(),
            fs::read(dir_b.join(name)).unwrap(),
            "{name} differs after the round trip"
        );
    }
}

#[test]
fn unknown_key_is_rejected_by_name() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_cfg(
        tmp.path(),
        &format!("{CURVE_CFG}curve.radiuss = 2\n"),
    );
    let out = bin()
        .args(["run", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(tmp.path().join("out"))
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(
        stderr(&out).contains("unknown key `curve.radiuss`"),
        "stderr: {}",
        stderr(&out)
    );
}

#[test]
fn duplicate_key_is_rejected() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_cfg(tmp.path(), &format!("{CURVE_CFG}curve.radius = 2\n"));
    let out = bin().args(["validate", "--config"]).arg(&cfg).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(
        stderr(&out).contains("duplicate key `curve.radius`"),
        "stderr: {}",
        stderr(&out)
    );
}

#[test]
fn validate_checks_without_computing() {
    let tmp = tempfile::tempdir().unwrap();
    // A horizon that would take far too long to actually solve; validate
    // must return immediately.
    let cfg = write_cfg(
        tmp.path(),
        "\
experiment = curve
forcing.kind = constant
forcing.value = -2
curve.shape = circle
curve.radius = 0.5
curve.nodes = 2048
solver.max_time = 10000
solver.sample_interval = 1
",
    );
    let start = std::time::Instant::now();
    let out = bin().args(["validate", "--config"]).arg(&cfg).output().unwrap();
    assert!(out.status.success(), "stderr: {}", stderr(&out));
    assert!(stdout(&out).contains("ok"));
    assert!(start.elapsed().as_secs() < 5, "validate must not solve");
}

#[test]
fn validate_rejects_cfl_out_of_range() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_cfg(tmp.path(), &format!("{CURVE_CFG}solver.cfl = 0.9\n"));
    let out = bin().args(["validate", "--config"]).arg(&cfg).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    let err = stderr(&out);
    assert!(err.contains("solver.cfl"), "stderr: {err}");
    assert!(err.contains("0.9"), "stderr: {err}");
}

#[test]
fn validate_rejects_epsilon_that_is_not_a_reciprocal_integer() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_cfg(
        tmp.path(),
        "\
experiment = graph
forcing.kind = sin-y
forcing.amplitude = 1
forcing.epsilon = 0.3
graph.profile = constant
graph.nodes = 64
solver.max_time = 0.01
solver.sample_interval = 0.005
",
    );
    let out = bin().args(["validate", "--config"]).arg(&cfg).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    let err = stderr(&out);
    assert!(err.contains("forcing.epsilon"), "stderr: {err}");
}

#[test]
fn env_var_overrides_out_flag() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_cfg(tmp.path(), CURVE_CFG);
    let flag_dir = tmp.path().join("from-flag");
    let env_dir = tmp.path().join("from-env");

    let out = bin()
        .env("HETFLOW_OUT", &env_dir)
        .args(["run", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(&flag_dir)
        .output()
        .unwrap();
    assert!(out.status.success(), "stderr: {}", stderr(&out));
    assert!(env_dir.join("manifest.json").is_file());
    assert!(!flag_dir.exists());
}

#[test]
fn exhausted_step_budget_exits_3_with_a_manifest_note() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_cfg(
        tmp.path(),
        "\
experiment = curve
forcing.kind = constant
forcing.value = 0
curve.shape = circle
curve.radius = 1
curve.nodes = 64
solver.max_time = 0.4
solver.sample_interval = 0.1
solver.max_steps = 5
",
    );
    let out_dir = tmp.path().join("out");
    let out = bin()
        .args(["run", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(&out_dir)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3), "stderr: {}", stderr(&out));

    // The manifest survives as the partial artifact and carries the note.
    let manifest: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out_dir.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["status"], "failed");
    let note = manifest["error"].as_str().unwrap();
    assert!(note.contains("step budget"), "note: {note}");
}

#[test]
fn effective_speed_run_matches_the_closed_form() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_cfg(
        tmp.path(),
        "\
experiment = effective-speed
forcing.kind = offset-sin
forcing.offset = 2
forcing.amplitude = 1
speed.kind = rational
speed.num = 0
speed.den = 1
",
    );
    let out_dir = tmp.path().join("out");
    let out = bin()
        .args(["run", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(&out_dir)
        .output()
        .unwrap();
    assert!(out.status.success(), "stderr: {}", stderr(&out));

    let summary: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out_dir.join("summary.json")).unwrap()).unwrap();
    let c = summary["c"].as_f64().unwrap();
    assert!((c - 3f64.sqrt()).abs() <= 1e-6, "c = {c}");
    assert_eq!(summary["branch"], "harmonic-mean");

    let averages = fs::read_to_string(out_dir.join("averages.csv")).unwrap();
    assert!(averages.starts_with("s,average\n"));
    assert!(averages.lines().count() > 100);
}

#[test]
fn discontinuity_scan_tabulates_both_branches() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_cfg(
        tmp.path(),
        "\
experiment = discontinuity-scan
forcing.kind = offset-sin
forcing.offset = 2
forcing.amplitude = 1
scan.slopes = 0/1, 1/2, ~1.4142135623730951
",
    );
    let out_dir = tmp.path().join("out");
    let out = bin()
        .args(["run", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(&out_dir)
        .output()
        .unwrap();
    assert!(out.status.success(), "stderr: {}", stderr(&out));

    let scan = fs::read_to_string(out_dir.join("scan.csv")).unwrap();
    let lines: Vec<&str> = scan.lines().collect();
    assert_eq!(lines[0], "label,alpha,c,pinned");
    assert_eq!(lines.len(), 4);
    assert!(lines[1].starts_with("0/1,"));
    assert!(lines[3].starts_with("irrational "));

    let summary: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out_dir.join("summary.json")).unwrap()).unwrap();
    // Rational slopes see the harmonic mean sqrt(3); the irrational row
    // sees the full torus mean 2.
    assert!((summary["c_min"].as_f64().unwrap() - 3f64.sqrt()).abs() <= 1e-6);
    assert!((summary["c_max"].as_f64().unwrap() - 2.0).abs() <= 1e-8);
}

#[test]
fn every_shipped_config_validates() {
    let configs = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs");
    let mut seen = 0;
    for entry in fs::read_dir(&configs).unwrap() {
        let path = entry.unwrap().path();
        if path.extension().map_or(true, |e| e != "txt") {
            continue;
        }
        let out = bin().args(["validate", "--config"]).arg(&path).output().unwrap();
        assert!(
            out.status.success(),
            "{} failed to validate: {}",
            path.display(),
            stderr(&out)
        );
        seen += 1;
    }
    assert!(seen >= 7, "expected one sample config per experiment");
}

#[test]
fn weak_run_writes_gap_and_residual_tables() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_cfg(
        tmp.path(),
        "\
experiment = weak
forcing.kind = piecewise
forcing.breaks = 0, 0.5, 1
forcing.values = 1.2, -0.4
graph.profile = fourier
graph.nodes = 64
graph.modes = 1:0.05:0
solver.max_time = 0.02
solver.sample_interval = 0.01
weak.deltas = 0.2, 0.1, 0.05
",
    );
    let out_dir = tmp.path().join("out");
    let out = bin()
        .args(["run", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(&out_dir)
        .output()
        .unwrap();
    assert!(out.status.success(), "stderr: {}", stderr(&out));

    let gaps = fs::read_to_string(out_dir.join("gaps.csv")).unwrap();
    let lines: Vec<&str> = gaps.lines().collect();
    assert_eq!(lines[0], "delta_coarse,delta_fine,sup_distance");
    assert_eq!(lines.len(), 3);

    let residuals = fs::read_to_string(out_dir.join("residuals.csv")).unwrap();
    // Five built-in test functions.
    assert_eq!(residuals.lines().count(), 6);
    assert!(out_dir.join("snapshots.csv").is_file());
}

#[test]
fn homogenize_run_reports_the_averaged_coefficient() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_cfg(
        tmp.path(),
        "\
experiment = homogenize
forcing.kind = piecewise
forcing.breaks = 0, 0.5, 1
forcing.values = 0.5, 1.5
homogenize.cells = 1, 2
homogenize.nodes_per_cell = 16
homogenize.base_nodes = 32
graph.modes = 1:0:0.05
solver.max_time = 0.05
solver.sample_interval = 0.025
",
    );
    let out_dir = tmp.path().join("out");
    let out = bin()
        .args(["run", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(&out_dir)
        .output()
        .unwrap();
    assert!(out.status.success(), "stderr: {}", stderr(&out));

    let sweep = fs::read_to_string(out_dir.join("sweep.csv")).unwrap();
    let lines: Vec<&str> = sweep.lines().collect();
    assert_eq!(lines[0], "m,eps,n,sup_distance,final_distance,shift_defect");
    assert_eq!(lines.len(), 3);

    let summary: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out_dir.join("summary.json")).unwrap()).unwrap();
    // The square wave averages to 1 exactly.
    assert!((summary["limit_mean"].as_f64().unwrap() - 1.0).abs() <= 1e-12);
}

#[test]
fn diagnostics_run_tracks_the_gaussian_density() {
    let tmp = tempfile::tempdir().unwrap();
    // Unforced circle of radius 1/2 vanishes at t = 1/8; focus there.
    let cfg = write_cfg(
        tmp.path(),
        "\
experiment = diagnostics
forcing.kind = constant
forcing.value = 0
curve.shape = circle
curve.radius = 0.5
curve.nodes = 128
solver.max_time = 0.1
solver.sample_interval = 0.02
diagnostics.focus_time = 0.125
",
    );
    let out_dir = tmp.path().join("out");
    let out = bin()
        .args(["run", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(&out_dir)
        .output()
        .unwrap();
    assert!(out.status.success(), "stderr: {}", stderr(&out));

    let density = fs::read_to_string(out_dir.join("density.csv")).unwrap();
    let lines: Vec<&str> = density.lines().collect();
    assert_eq!(lines[0], "t,tau,z,density,rescaled");
    assert_eq!(lines.len(), 7, "six samples inside the focus window");

    let summary: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out_dir.join("summary.json")).unwrap()).unwrap();
    let checks = summary["checks"].as_array().unwrap();
    let names: Vec<&str> = checks.iter().map(|c| c["name"].as_str().unwrap()).collect();
    assert!(names.contains(&"density-step"));
    assert!(names.contains(&"density-integrated"));
    assert!(checks.iter().all(|c| c["ok"].as_bool().unwrap()));
}

#[test]
fn graph_run_reports_monotone_slope_bound() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_cfg(
        tmp.path(),
        "\
experiment = graph
forcing.kind = sin-x
forcing.amplitude = 0.5
graph.profile = fourier
graph.nodes = 64
graph.modes = 1:0.1:0; 2:0:0.05
solver.max_time = 0.02
solver.sample_interval = 0.01
",
    );
    let out_dir = tmp.path().join("out");
    let out = bin()
        .args(["run", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(&out_dir)
        .output()
        .unwrap();
    assert!(out.status.success(), "stderr: {}", stderr(&out));

    let summary: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out_dir.join("summary.json")).unwrap()).unwrap();
    let checks = summary["checks"].as_array().unwrap();
    let names: Vec<&str> = checks.iter().map(|c| c["name"].as_str().unwrap()).collect();
    assert!(names.contains(&"arclength-cap"));
    assert!(names.contains(&"ut-monotone"));
    assert!(checks.iter().all(|c| c["ok"].as_bool().unwrap()));

    let diag = fs::read_to_string(out_dir.join("diagnostics.csv")).unwrap();
    assert!(diag.starts_with("t,arclength,energy,cubic_area,max_ut,max_slope\n"));
}
