use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use mono3d_core::geometry::{Cuboid3D, RotationMatrix};
use mono3d_core::io::{load_predictions, save_mask};
use mono3d_core::lifting::{CameraIntrinsics, InstanceMask};
use mono3d_kit::synth;
use nalgebra::Vector3;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_mono3d-kit"));
    c.env_remove("MONO3D_KIT_THREADS");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn fixture(name: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures/ap_fixture")
        .join(name)
        .display()
        .to_string()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn k() -> CameraIntrinsics<f64> {
    CameraIntrinsics::new(500.0, 500.0, 320.0, 240.0).unwrap()
}

fn three_boxes() -> Vec<Cuboid3D<f64>> {
    (0..3)
        .map(|i| {
            let r = RotationMatrix::from_axis_angle(&Vector3::y(), 0.3 * i as f64);
            Cuboid3D::new(Vector3::new(-0.8 + 0.8 * i as f64, 0.4, 4.0 + i as f64), Vector3::new(0.8, 0.6, 1.0), r).unwrap()
        })
        .collect()
}

fn lift_args(dir: &Path, out: &Path) -> Vec<String> {
    [
        "lift", "--manifest", s(&dir.join("manifest.json")), "--detections", s(&dir.join("detections.json")),
        "--depth-dir", s(dir), "--mask-dir", s(dir), "--output", s(out), "--quiet",
    ]
    .iter()
    .map(|a| a.to_string())
    .collect()
}

#[test]
fn help_and_usage_exit_codes() {
    assert_eq!(run(&["--help"]).status.code(), Some(0));
    assert_eq!(run(&["--version"]).status.code(), Some(0));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(run(&[]).status.code(), Some(1));
    let o = run(&["lift", "--manifest", "m", "--detections", "d", "--depth-dir", ".", "--mask-dir", ".", "-o", "x", "--eps", "0.1", "--adaptive-eps"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("cannot be used with"));
    assert_eq!(run(&["--jobs", "0", "selftest"]).status.code(), Some(1));
}

#[test]
fn selftest_passes_is_deterministic_and_detects_faults() {
    let a = run(&["selftest", "--seed", "42", "--pairs", "5"]);
    let b = run(&["selftest", "--seed", "42", "--pairs", "5"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let text = String::from_utf8_lossy(&a.stdout);
    for suite in ["iou_monte_carlo", "iou_axis_aligned", "hungarian", "obb_recovery", "dbscan"] {
        assert!(text.contains(suite), "{suite} missing from {text}");
    }
    assert_eq!(run(&["selftest", "--pairs", "5", "--inject-fault", "iou"]).status.code(), Some(3));
    assert_eq!(run(&["selftest", "--pairs", "5", "--inject-fault", "hungarian"]).status.code(), Some(3));
}

#[test]
fn lift_three_detections() {
    let dir = tempfile::tempdir().unwrap();
    synth::write_scene(dir.path(), &three_boxes(), "box", &k(), 640, 480).unwrap();
    let out = dir.path().join("preds.json");
    let o = bin().args(lift_args(dir.path(), &out)).output().unwrap();
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(o.stdout.is_empty());
    let preds = load_predictions(&out).unwrap();
    assert_eq!(preds.predictions.len(), 3);
    assert!(preds.predictions.iter().all(|p| p.cuboid.is_some() && p.reason.is_none()));
}

#[test]
fn lift_records_all_noise_failure() {
    let dir = tempfile::tempdir().unwrap();
    synth::write_scene(dir.path(), &three_boxes(), "box", &k(), 640, 480).unwrap();
    // isolated pixels 8 px (about 8 cm at this depth) apart: every point is noise
    let sparse: Vec<bool> = (0..480).flat_map(|v| (0..640).map(move |u| u % 8 == 0 && v % 8 == 0 && u > 200 && u < 440 && v > 150 && v < 330)).collect();
    save_mask(&InstanceMask::new(640, 480, sparse).unwrap(), &dir.path().join("img1_0.pgm")).unwrap();
    let out = dir.path().join("preds.json");
    let o = bin().args(lift_args(dir.path(), &out)).args(["--eps", "0.05"]).output().unwrap();
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let preds = load_predictions(&out).unwrap();
    let ok = preds.predictions.iter().filter(|p| p.cuboid.is_some()).count();
    assert_eq!(ok, 2);
    assert_eq!(preds.predictions[1].cuboid, None);
    assert!(preds.predictions[1].reason.is_some());
}

#[test]
fn lift_missing_depth_names_path() {
    let dir = tempfile::tempdir().unwrap();
    synth::write_scene(dir.path(), &three_boxes(), "box", &k(), 640, 480).unwrap();
    std::fs::remove_file(dir.path().join("img2.ovd")).unwrap();
    let o = bin().args(lift_args(dir.path(), &dir.path().join("p.json"))).output().unwrap();
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("img2.ovd"));
}

fn eval(out: &Path, extra: &[&str], preds: &str) -> Output {
    let manifest = fixture("manifest.json");
    let mut args = vec!["eval", "--manifest", &manifest, "--predictions", preds, "--out-dir", s(out), "-q"];
    args.extend_from_slice(extra);
    run(&args)
}

fn report(dir: &Path) -> serde_json::Value {
    serde_json::from_slice(&std::fs::read(dir.join("report.json")).unwrap()).unwrap()
}

#[test]
fn eval_protocols_and_outputs() {
    let tmp = tempfile::tempdir().unwrap();
    let preds = fixture("predictions.json");
    let (ta, orig) = (tmp.path().join("ta"), tmp.path().join("orig"));
    assert_eq!(eval(&ta, &[], &preds).status.code(), Some(0));
    assert_eq!(eval(&orig, &["--protocol", "original"], &preds).status.code(), Some(0));
    let (a, o) = (report(&ta), report(&orig));
    assert!(a.get("generated_at_unix").is_none());
    for (ca, co) in a["categories"].as_array().unwrap().iter().zip(o["categories"].as_array().unwrap()) {
        assert!(ca["ap3d_mean"].as_f64() >= co["ap3d_mean"].as_f64());
    }
    let csv = std::fs::read_to_string(ta.join("report.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("Category,AP2D,AP3D,AR2D,AR3D"));
    assert_eq!(lines.next(), Some("chair,66.34,53.27,66.67,53.33"));
    assert!(csv.lines().last().unwrap().starts_with("mean,"));

    let single = tmp.path().join("single");
    assert_eq!(eval(&single, &["--iou-thresholds", "0.25", "--stamp"], &preds).status.code(), Some(0));
    let r = report(&single);
    assert_eq!(r["iou_thresholds"], serde_json::json!([0.25]));
    assert_eq!(r["categories"][0]["ap3d"].as_array().unwrap().len(), 1);
    assert!(r["generated_at_unix"].as_u64().is_some());

    assert_eq!(eval(&single, &["--iou-thresholds", "0.5,0.25"], &preds).status.code(), Some(1));
}

#[test]
fn eval_empty_and_bad_predictions() {
    let tmp = tempfile::tempdir().unwrap();
    let empty = tmp.path().join("empty.json");
    std::fs::write(&empty, r#"{"version": "1.0", "predictions": []}"#).unwrap();
    let out = tmp.path().join("out");
    assert_eq!(eval(&out, &[], s(&empty)).status.code(), Some(0));
    let r = report(&out);
    assert_eq!(r["ap3d"].as_f64(), Some(0.0));
    assert_eq!(r["ar3d"].as_f64(), Some(0.0));

    let dangling = tmp.path().join("dangling.json");
    std::fs::write(
        &dangling,
        r#"{"version": "1.0", "predictions": [{"image_id": "nope", "category": "chair", "score": 0.5, "cuboid": null}]}"#,
    )
    .unwrap();
    let o = eval(&out, &[], s(&dangling));
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("/predictions/0/image_id"));

    let bad_score = tmp.path().join("bad.json");
    std::fs::write(
        &bad_score,
        r#"{"version": "1.0", "predictions": [{"image_id": "img1", "category": "chair", "score": 1.5, "cuboid": null}]}"#,
    )
    .unwrap();
    assert_eq!(eval(&out, &[], s(&bad_score)).status.code(), Some(2));
}

#[test]
fn eval_is_independent_of_thread_count() {
    let tmp = tempfile::tempdir().unwrap();
    let preds = fixture("predictions.json");
    let mut outputs: Vec<(Vec<u8>, Vec<u8>)> = Vec::new();
    for (i, jobs) in ["1", "3"].iter().enumerate() {
        let dir: PathBuf = tmp.path().join(format!("r{i}"));
        let o = bin()
            .env("MONO3D_KIT_THREADS", jobs)
            .args(["eval", "--manifest", &fixture("manifest.json"), "--predictions", &preds, "--out-dir", s(&dir)])
            .output()
            .unwrap();
        assert_eq!(o.status.code(), Some(0));
        assert!(!o.stdout.is_empty());
        outputs.push((std::fs::read(dir.join("report.json")).unwrap(), std::fs::read(dir.join("report.csv")).unwrap()));
    }
    assert_eq!(outputs[0], outputs[1]);
}

#[test]
fn convert_omni3d_writes_a_manifest() {
    let tmp = tempfile::tempdir().unwrap();
    let input = tmp.path().join("omni.json");
    std::fs::write(
        &input,
        r#"{"images": [{"id": 1, "width": 100, "height": 80, "K": [[90, 0, 50], [0, 90, 40], [0, 0, 1]]}],
            "categories": [{"id": 0, "name": "car"}],
            "annotations": [{"image_id": 1, "category_id": 0, "bbox2D_tight": [1, 2, 30, 40],
                             "center_cam": [0, 0, 10], "dimensions": [1.8, 1.5, 4.2],
                             "R_cam": [[1, 0, 0], [0, 1, 0], [0, 0, 1]], "valid3D": true, "behind_camera": false}]}"#,
    )
    .unwrap();
    let out = tmp.path().join("manifest.json");
    let o = run(&["convert-omni3d", "--input", s(&input), "--output", s(&out), "-q"]);
    assert_eq!(o.status.code(), Some(0));
    let m = mono3d_core::io::load_manifest(&out).unwrap();
    assert_eq!(m.annotations.len(), 1);
    assert_eq!(m.categories, vec!["car"]);
    assert_eq!(run(&["convert-omni3d", "--input", "/nonexistent.json", "--output", s(&out)]).status.code(), Some(2));
}
