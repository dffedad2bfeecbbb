use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn data(rel: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data").join(rel)
}

fn pompeiu(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pompeiu")).args(args).output().expect("binary runs")
}

fn json_ok(args: &[&str]) -> Value {
    let out = pompeiu(args);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn constant_kernel_energy_is_area_squared() {
    let v = json_ok(&[
        "--shape",
        path(&data("shapes/ellipse.json")),
        "--kernel",
        path(&data("kernels/constant.json")),
        "--resolution",
        "128",
        "evaluate",
    ]);
    let area = v["area"].as_f64().unwrap();
    let f = v["spatial"]["value"].as_f64().unwrap();
    assert!((f - area * area).abs() < 1e-10 * area * area, "{f} vs {}", area * area);
    assert!(v["spectral"].is_null());
}

#[test]
fn both_energy_routes_agree_for_bessel_kernel() {
    let v = json_ok(&[
        "--shape",
        path(&data("shapes/square.json")),
        "--kernel",
        path(&data("kernels/bessel_j11.json")),
        "--resolution",
        "256",
        "evaluate",
    ]);
    assert!(v["difference"].as_f64().unwrap() < 1e-8);
}

#[test]
fn bad_inputs_exit_with_code_two() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    fs::write(&bad, "{not json").unwrap();
    let kernel = data("kernels/constant.json");
    let cases: [Vec<&str>; 4] = [
        vec!["--shape", path(&bad), "--kernel", path(&kernel), "evaluate"],
        vec!["--shape", "/nonexistent/shape.json", "--kernel", path(&kernel), "evaluate"],
        vec!["--kernel", path(&kernel), "evaluate"],
        vec!["--shape", path(&kernel), "--kernel", path(&kernel), "--resolution", "33", "evaluate"],
    ];
    for args in &cases {
        let out = pompeiu(args);
        assert_eq!(out.status.code(), Some(2), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
        assert!(!out.stderr.is_empty());
    }
    let negative = dir.path().join("neg.json");
    fs::write(&negative, r#"{"kind": "gaussian", "sigma": -1}"#).unwrap();
    let out = pompeiu(&["--shape", path(&data("shapes/disk.json")), "--kernel", path(&negative), "evaluate"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn critical_disk_flow_stops_immediately() {
    let dir = tempfile::tempdir().unwrap();
    let v = json_ok(&["--config", path(&data("configs/critical_disk_flow.json")), "--out", path(dir.path()), "flow"]);
    assert_eq!(v["steps"], 0);
    assert_eq!(v["termination"], "energy_tolerance");
    let csv = fs::read_to_string(dir.path().join("trajectory.csv")).unwrap();
    assert_eq!(csv.lines().count(), 2, "header plus one record");
    assert!(dir.path().join("final_shape.json").exists());
    assert!(dir.path().join("flow_summary.json").exists());
}

#[test]
fn short_flow_writes_frames_and_decreases_energy() {
    let dir = tempfile::tempdir().unwrap();
    let v = json_ok(&[
        "--shape",
        path(&data("shapes/square.json")),
        "--kernel",
        path(&data("kernels/bessel_j11.json")),
        "--resolution",
        "256",
        "--out",
        path(dir.path()),
        "flow",
        "--max-steps",
        "6",
        "--svg-every",
        "3",
    ]);
    assert_eq!(v["termination"], "max_steps");
    let csv = fs::read_to_string(dir.path().join("trajectory.csv")).unwrap();
    let energies: Vec<f64> =
        csv.lines().skip(1).map(|l| l.split(',').nth(1).unwrap().parse().unwrap()).collect();
    assert_eq!(energies.len(), 7);
    assert!(energies.windows(2).all(|w| w[1] < w[0]));
    let mut frames: Vec<String> = fs::read_dir(dir.path().join("frames"))
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .collect();
    frames.sort();
    assert_eq!(frames, ["frame_00000.svg", "frame_00003.svg", "frame_00006.svg"]);
    let shape: pompeiu_core::geometry::StarShape =
        serde_json::from_str(&fs::read_to_string(dir.path().join("final_shape.json")).unwrap()).unwrap();
    assert!(shape.area() > 3.0);
}

#[test]
fn invalid_flow_options_are_rejected() {
    let out = pompeiu(&[
        "--shape",
        path(&data("shapes/disk.json")),
        "--kernel",
        path(&data("kernels/bessel_j11.json")),
        "flow",
        "--dt0",
        "-1",
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn scan_detects_disk_failure_and_clears_square() {
    let dir = tempfile::tempdir().unwrap();
    let disk = json_ok(&["--config", path(&data("configs/scan_disk.json")), "--resolution", "256", "--out", path(dir.path()), "scan"]);
    assert_eq!(disk["failure"], true);
    assert_eq!(disk["confirmation"]["confirmed"], true);
    assert!((disk["argmin_lambda"].as_f64().unwrap() - 3.831_705_970_207_512).abs() < 1e-8);
    let summary: Value = serde_json::from_str(&fs::read_to_string(dir.path().join("scan_summary.json")).unwrap()).unwrap();
    assert_eq!(summary["failure"], true);
    let csv = fs::read_to_string(dir.path().join("scan.csv")).unwrap();
    assert_eq!(csv.lines().next(), Some("lambda,M_of_lambda"));
    assert_eq!(csv.lines().count(), 142);

    let square = json_ok(&["--config", path(&data("configs/scan_square.json")), "--resolution", "256", "scan"]);
    assert_eq!(square["failure"], false);
    assert!(square["confirmation"].is_null());
    assert!(square["min_value"].as_f64().unwrap() > 1e-3);
}

#[test]
fn spectrum_marks_translation_modes() {
    let v = json_ok(&["--kernel", path(&data("kernels/bessel_j11.json")), "--resolution", "256", "spectrum", "--k-max", "4"]);
    let entries = v["entries"].as_array().unwrap();
    assert_eq!(entries.len(), 9);
    for e in entries {
        let kernel_mode = e["k"] == 1;
        assert_eq!(e["kernel_mode"], kernel_mode, "{e}");
        if !kernel_mode {
            assert!(e["value"].as_f64().unwrap() > 0.0);
        }
    }
    let out = pompeiu(&["spectrum"]);
    assert_eq!(out.status.code(), Some(2), "lambda is required without a Bessel kernel");
    let out = pompeiu(&["--resolution", "64", "spectrum", "--lambda", "2", "--k-max", "17"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn potential_probes_follow_the_seed() {
    let args = |seed: &'static str| {
        [
            "--shape",
            "",
            "--kernel",
            "",
            "--resolution",
            "128",
            "--seed",
            seed,
            "potential",
            "--probes",
            "3",
            "--point",
            "0,0",
        ]
    };
    let (shape, kernel) = (data("shapes/ellipse.json"), data("kernels/bessel_j11.json"));
    let run = |seed| {
        let mut a = args(seed);
        a[1] = path(&shape);
        a[3] = path(&kernel);
        json_ok(&a)
    };
    let (a, b, c) = (run("5"), run("5"), run("6"));
    assert_eq!(a, b);
    assert_ne!(a["points"][1], c["points"][1]);
    assert_eq!(a["points"][0], c["points"][0]);
    assert_eq!(a["points"].as_array().unwrap().len(), 4);
}

#[test]
fn grad_of_critical_disk_vanishes() {
    let v = json_ok(&[
        "--shape",
        path(&data("shapes/disk.json")),
        "--kernel",
        path(&data("kernels/bessel_j11.json")),
        "--resolution",
        "128",
        "grad",
    ]);
    assert_eq!(v["method"], "spectral");
    assert!(v["sup_norm"].as_f64().unwrap() < 1e-10);
    assert_eq!(v["values"].as_array().unwrap().len(), 128);
}

#[test]
fn repeated_runs_are_byte_identical() {
    let (d1, d2) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let run = |dir: &Path| {
        pompeiu(&[
            "--shape",
            path(&data("shapes/ellipse.json")),
            "--kernel",
            path(&data("kernels/bessel_j11.json")),
            "--resolution",
            "128",
            "--out",
            path(dir),
            "flow",
            "--max-steps",
            "4",
            "--svg-every",
            "2",
        ])
    };
    let (a, b) = (run(d1.path()), run(d2.path()));
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    for name in ["trajectory.csv", "final_shape.json", "flow_summary.json", "frames/frame_00002.svg"] {
        assert_eq!(fs::read(d1.path().join(name)).unwrap(), fs::read(d2.path().join(name)).unwrap(), "{name}");
    }
}

#[test]
fn config_values_override_flags() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("run.json");
    let shape = data("shapes/disk.json");
    fs::write(
        &config,
        serde_json::json!({
            "shape": shape,
            "kernel": {"kind": "constant", "c": 2.0},
            "resolution": 64
        })
        .to_string(),
    )
    .unwrap();
    let v = json_ok(&[
        "--config",
        path(&config),
        "--kernel",
        path(&data("kernels/constant.json")),
        "--resolution",
        "512",
        "evaluate",
    ]);
    let area = v["area"].as_f64().unwrap();
    assert!((v["spatial"]["value"].as_f64().unwrap() - 2.0 * area * area).abs() < 1e-10);
    assert_eq!(v["spatial"]["n_interior"], 32 * 4);

    fs::write(&config, r#"{"shape": "nope.json", "colour": 1}"#).unwrap();
    assert_eq!(pompeiu(&["--config", path(&config), "evaluate"]).status.code(), Some(2));
}
