//! End-to-end tests driving the compiled binary: flag handling, file
//! layout, exit codes, and byte-level determinism of the data files.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_duet"))
}

fn write_config(dir: &Path, name: &str, text: &str) -> PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary should spawn")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("no exit code (signal?)")
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

const DYN_CONFIG: &str = r#"{
    "system": { "coupling": 0.5 },
    "bath": { "alpha": 0.05, "omega_c": 4.0, "mu": 0.5 },
    "temperature": [1.0, 5.0],
    "time": { "t_max": 20.0, "points": 81 }
}"#;

#[test]
fn dynamics_writes_trajectories_and_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), "run.json", DYN_CONFIG);
    let out_dir = dir.path().join("out");

    let out = run(&[
        "dynamics",
        "--config",
        config.to_str().unwrap(),
        "--out",
        out_dir.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "stderr: {}", stderr(&out));

    for t in ["1", "5"] {
        let csv = std::fs::read_to_string(out_dir.join(format!("trajectory_t{t}.csv"))).unwrap();
        let mut lines = csv.lines();
        assert_eq!(
            lines.next().unwrap(),
            "t,alpha_x_lab,alpha_y_lab,alpha_z,alpha_x_polaron,alpha_y_polaron"
        );
        assert_eq!(lines.count(), 81);
        // Prepared on the donor: z starts at 1, coherences at 0.
        let first = csv.lines().nth(1).unwrap();
        assert_eq!(first, "0,0,0,1,0,0");
    }

    let manifest: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out_dir.join("manifest.json")).unwrap())
            .unwrap();
    assert_eq!(manifest["command"], "dynamics");
    assert_eq!(manifest["runs"].as_array().unwrap().len(), 2);
    assert_eq!(manifest["runs"][0]["regime"], "resonant");
    let b1 = manifest["runs"][0]["dressing"].as_f64().unwrap();
    assert!((b1 - 0.428637737625968791).abs() < 1e-12);
    let files: Vec<&str> = manifest["files"]
        .as_array()
        .unwrap()
        .iter()
        .map(|f| f.as_str().unwrap())
        .collect();
    assert_eq!(
        files,
        ["trajectory_t1.csv", "trajectory_t5.csv", "manifest.json"]
    );
}

#[test]
fn repeated_runs_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), "run.json", DYN_CONFIG);
    let mut blobs = Vec::new();
    for sub in ["a", "b"] {
        let out_dir = dir.path().join(sub);
        let out = run(&[
            "dynamics",
            "--config",
            config.to_str().unwrap(),
            "--out",
            out_dir.to_str().unwrap(),
        ]);
        assert_eq!(code(&out), 0, "stderr: {}", stderr(&out));
        blobs.push((
            std::fs::read(out_dir.join("trajectory_t1.csv")).unwrap(),
            std::fs::read(out_dir.join("trajectory_t5.csv")).unwrap(),
        ));
    }
    assert_eq!(blobs[0].0, blobs[1].0);
    assert_eq!(blobs[0].1, blobs[1].1);
}

#[test]
fn regime_and_tolerance_flags_override_config() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), "run.json", DYN_CONFIG);
    let out_dir = dir.path().join("out");

    let out = run(&[
        "dynamics",
        "--config",
        config.to_str().unwrap(),
        "--out",
        out_dir.to_str().unwrap(),
        "--regime",
        "weak",
        "--tol",
        "1e-8",
    ]);
    assert_eq!(code(&out), 0, "stderr: {}", stderr(&out));
    let manifest: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out_dir.join("manifest.json")).unwrap())
            .unwrap();
    assert_eq!(manifest["runs"][0]["regime"], "weak");
    assert_eq!(manifest["config"]["tolerance"].as_f64().unwrap(), 1e-8);

    // An out-of-range tolerance is a configuration error.
    let out = run(&[
        "dynamics",
        "--config",
        config.to_str().unwrap(),
        "--out",
        out_dir.to_str().unwrap(),
        "--tol",
        "0.5",
    ]);
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("--tol"));
}

#[test]
fn configuration_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("out");
    let out_str = out_dir.to_str().unwrap();

    // Missing file.
    let out = run(&["dynamics", "--config", "/nonexistent.json", "--out", out_str]);
    assert_eq!(code(&out), 2);

    // Unparseable JSON.
    let bad = write_config(dir.path(), "bad.json", "{ not json");
    let out = run(&["dynamics", "--config", bad.to_str().unwrap(), "--out", out_str]);
    assert_eq!(code(&out), 2);

    // Unknown field.
    let unknown = write_config(
        dir.path(),
        "unknown.json",
        r#"{
            "system": { "coupling": 0.5 },
            "bath": { "alpha": 0.05, "omega_c": 4.0, "mu": 0.5 },
            "temperature": 5.0,
            "surprise": true
        }"#,
    );
    let out = run(&["dynamics", "--config", unknown.to_str().unwrap(), "--out", out_str]);
    assert_eq!(code(&out), 2);

    // Unphysical value.
    let negative = write_config(
        dir.path(),
        "negative.json",
        r#"{
            "system": { "coupling": 0.5 },
            "bath": { "alpha": 0.05, "omega_c": 4.0, "mu": 0.5 },
            "temperature": -3.0
        }"#,
    );
    let out = run(&["dynamics", "--config", negative.to_str().unwrap(), "--out", out_str]);
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("temperature"));
}

#[test]
fn crossover_sentinels_and_bias_refusal() {
    let dir = tempfile::tempdir().unwrap();
    // Coinciding sites never decohere: both methods report the coherent
    // sentinel, which is an answer, not a failure.
    let config = write_config(
        dir.path(),
        "cross.json",
        r#"{
            "system": { "coupling": 0.5 },
            "bath": { "alpha": 0.05, "omega_c": 4.0, "mu": 0.5 },
            "crossover": { "axis": "omega-c", "values": [4.0], "mu": ["infinite"] }
        }"#,
    );
    let out_dir = dir.path().join("out");
    let out = run(&[
        "crossover",
        "--config",
        config.to_str().unwrap(),
        "--out",
        out_dir.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "stderr: {}", stderr(&out));
    let csv = std::fs::read_to_string(out_dir.join("crossover.csv")).unwrap();
    let header = csv.lines().next().unwrap();
    assert!(header.starts_with("value,omega_c,mu,inv_mu,tc_full,residual_full,tc_approx"));
    let rows: Vec<&str> = csv.lines().skip(1).collect();
    assert_eq!(rows.len(), 1);
    assert_eq!(rows[0].matches("coherent-everywhere").count(), 2, "row: {}", rows[0]);

    // The boundary is undefined off resonance.
    let biased = write_config(
        dir.path(),
        "biased.json",
        r#"{
            "system": { "bias": 1.0, "coupling": 0.5 },
            "bath": { "alpha": 0.05, "omega_c": 4.0, "mu": 0.5 },
            "crossover": { "axis": "omega-c", "values": [4.0], "mu": [0.5] }
        }"#,
    );
    let out = run(&[
        "crossover",
        "--config",
        biased.to_str().unwrap(),
        "--out",
        out_dir.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("resonance"));
}

#[test]
fn bath_tables_and_consistency_file() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(
        dir.path(),
        "bath.json",
        r#"{
            "system": { "coupling": 0.5 },
            "bath": { "alpha": 0.05, "omega_c": 4.0, "mu": 0.5 },
            "temperature": 5.0,
            "time": { "t_max": 5.0, "points": 26 },
            "frequency": { "max": 4.0, "points": 17 }
        }"#,
    );
    let out_dir = dir.path().join("out");
    let out = run(&[
        "bath",
        "--config",
        config.to_str().unwrap(),
        "--out",
        out_dir.to_str().unwrap(),
        "--threads",
        "2",
    ]);
    assert_eq!(code(&out), 0, "stderr: {}", stderr(&out));

    let freq = std::fs::read_to_string(out_dir.join("bath_frequency_t5.csv")).unwrap();
    assert!(freq.starts_with(
        "omega,spectral_density,spatial_kernel,exchange_weight,gamma_xx,gamma_yy,shift_xx,shift_yy"
    ));
    assert_eq!(freq.lines().count(), 18);

    let time = std::fs::read_to_string(out_dir.join("bath_time_t5.csv")).unwrap();
    assert!(time.starts_with("tau,phi_real,phi_imag,phi_sym,phi_sym_check,phi_sym_error"));

    // The closed-form dressing and the phase at tau = 0 must agree, and the
    // tabulated symmetrized phase must match its quadrature cross-check.
    let checks = std::fs::read_to_string(out_dir.join("bath_checks.csv")).unwrap();
    let row: Vec<&str> = checks.lines().nth(1).unwrap().split(',').collect();
    let dressing_error: f64 = row[3].parse().unwrap();
    let sym_error: f64 = row[4].parse().unwrap();
    assert!(dressing_error < 1e-12, "dressing mismatch: {dressing_error}");
    assert!(sym_error < 1e-6, "phase cross-check: {sym_error}");
}

#[test]
fn sweep_reports_partial_failures_with_exit_4() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(
        dir.path(),
        "sweep.json",
        r#"{
            "system": { "coupling": 0.5 },
            "bath": { "alpha": 0.05, "omega_c": 4.0, "mu": 0.5 },
            "temperature": 5.0,
            "time": { "t_max": 10.0, "points": 41 },
            "sweep": { "alpha": [0.05, -1.0] }
        }"#,
    );
    let out_dir = dir.path().join("out");
    let out = run(&[
        "sweep",
        "--config",
        config.to_str().unwrap(),
        "--out",
        out_dir.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 4, "stderr: {}", stderr(&out));

    let csv = std::fs::read_to_string(out_dir.join("sweep.csv")).unwrap();
    let rows: Vec<&str> = csv.lines().skip(1).collect();
    assert_eq!(rows.len(), 2);
    assert!(rows[0].contains(",ok,"));
    assert!(rows[1].contains(",failed,"));
}

#[test]
fn help_and_version() {
    let out = run(&["--help"]);
    assert_eq!(code(&out), 0);
    let text = String::from_utf8_lossy(&out.stdout).into_owned();
    for sub in ["dynamics", "crossover", "bath", "sweep"] {
        assert!(text.contains(sub), "help should list {sub}");
    }
    let out = run(&["--version"]);
    assert_eq!(code(&out), 0);
}
