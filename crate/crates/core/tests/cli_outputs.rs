use rigidity_lab::cli::{evaluate, run_experiment, write_report, ExperimentConfig, ExperimentKind};
use std::collections::BTreeMap;
use std::path::Path;
use std::process::Command;

fn files(dir: &Path) -> BTreeMap<String, Vec<u8>> {
    std::fs::read_dir(dir).unwrap().map(|e| e.unwrap().path()).map(|p| (p.file_name().unwrap().to_string_lossy().into_owned(), std::fs::read(&p).unwrap())).collect()
}

fn config(kind: ExperimentKind, params: serde_json::Value, out: &Path) -> ExperimentConfig {
    ExperimentConfig { experiment: kind, seed: 11, output_dir: Some(out.to_path_buf()), parallel: false, params }
}

#[test]
fn same_config_same_bytes() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = config(ExperimentKind::Periodicity, serde_json::json!({"seeds": 4}), tmp.path());
    let (_, a) = run_experiment(&cfg).unwrap();
    let (_, b) = run_experiment(&cfg).unwrap();
    assert_ne!(a, b);
    assert_eq!(a.parent(), b.parent());
    assert!(a.starts_with(tmp.path().join("periodicity")));
    assert_eq!(files(&a), files(&b));
}

#[test]
fn parallel_cells_write_the_same_data() {
    let tmp = tempfile::tempdir().unwrap();
    let mut cfg = config(ExperimentKind::ConeWitness, serde_json::json!({"cones": 40}), tmp.path());
    let seq = evaluate(&cfg).unwrap();
    cfg.parallel = true;
    let par = evaluate(&cfg).unwrap();
    write_report(&seq, &tmp.path().join("seq")).unwrap();
    write_report(&par, &tmp.path().join("par")).unwrap();
    let (s, p) = (files(&tmp.path().join("seq")), files(&tmp.path().join("par")));
    assert_eq!(s["cones.csv"], p["cones.csv"]);
    assert_eq!(s["manifest.json"], p["manifest.json"]);
}

#[test]
fn plot_files_have_the_documented_columns() {
    let tmp = tempfile::tempdir().unwrap();
    let cases = [
        (ExperimentKind::EnGapBound, serde_json::json!({}), "en_curve.csv", "n,e_n,bound_4pow"),
        (ExperimentKind::JensenDensity, serde_json::json!({"t_max": 40.0}), "zero_density.csv", "tag,T,n_T,ratio"),
        (
            ExperimentKind::PhaseTransition,
            serde_json::json!({"rhos": [0.5], "schedule": [[0.2, 4.0], [0.1, 6.0]], "plancherel_cells": 2}),
            "mse_sweep.csv",
            "rho,h,R,mse,target_var",
        ),
    ];
    for (kind, params, file, header) in cases {
        let (report, dir) = run_experiment(&config(kind, params, tmp.path())).unwrap();
        let text = std::fs::read_to_string(dir.join(file)).unwrap();
        assert_eq!(text.lines().next().unwrap(), header, "{file}");
        let manifest: serde_json::Value = serde_json::from_slice(&std::fs::read(dir.join("manifest.json")).unwrap()).unwrap();
        let entry = manifest["files"].as_array().unwrap().iter().find(|f| f["file"] == file).unwrap();
        let names: Vec<&str> = entry["columns"].as_array().unwrap().iter().map(|c| c["name"].as_str().unwrap()).collect();
        assert_eq!(names.join(","), header);
        for a in &report.artifacts {
            assert!(dir.join(a).exists(), "{a}");
        }
    }
}

#[test]
fn period_json_schema() {
    let tmp = tempfile::tempdir().unwrap();
    let (_, dir) = run_experiment(&config(ExperimentKind::Periodicity, serde_json::json!({"seeds": 3}), tmp.path())).unwrap();
    let v: serde_json::Value = serde_json::from_slice(&std::fs::read(dir.join("period.json")).unwrap()).unwrap();
    assert_eq!(v["period"], serde_json::json!([[4], [3, 5]]));
    assert_eq!(v["failures"], serde_json::json!([0, 0]));
}

#[test]
fn binary_exit_codes() {
    let exe = env!("CARGO_BIN_EXE_rigidlab");
    let tmp = tempfile::tempdir().unwrap();
    let write = |name: &str, body: &str| {
        let p = tmp.path().join(name);
        std::fs::write(&p, body).unwrap();
        p
    };
    let bad = write("bad.json", r#"{"experiment":"phase_transition","seed":1,"params":{"rhos":[]}}"#);
    let huge = write("huge.json", r#"{"experiment":"cone_witness","seed":1,"params":{"cones":10000000}}"#);
    let good = write("good.json", r#"{"experiment":"jensen_density","seed":1,"params":{}}"#);
    let red = write("red.json", r#"{"experiment":"jensen_density","seed":1,"params":{"t_max":3.0,"refinement":0.5}}"#);
    let status = |args: &[&str]| Command::new(exe).args(args).env("RIGIDLAB_OUTPUT_DIR", tmp.path().join("out")).output().unwrap();
    assert_eq!(status(&["validate", bad.to_str().unwrap()]).status.code(), Some(2));
    assert_eq!(status(&["run", bad.to_str().unwrap()]).status.code(), Some(2));
    assert_eq!(status(&["validate", huge.to_str().unwrap()]).status.code(), Some(2));
    assert_eq!(status(&["validate", good.to_str().unwrap()]).status.code(), Some(0));
    let run = status(&["run", good.to_str().unwrap()]);
    assert_eq!(run.status.code(), Some(0), "{}", String::from_utf8_lossy(&run.stdout));
    assert!(String::from_utf8_lossy(&run.stdout).contains("AC-01 PASS"));
    assert!(tmp.path().join("out/jensen_density").is_dir());
    // three zeros on [-3, 3] cannot pin the density to 2%
    assert_eq!(status(&["run", red.to_str().unwrap()]).status.code(), Some(1));
    let list = status(&["list"]);
    let text = String::from_utf8_lossy(&list.stdout);
    for kind in ExperimentKind::ALL {
        assert!(text.contains(kind.name()));
    }
}
