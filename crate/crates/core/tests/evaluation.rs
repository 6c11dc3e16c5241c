use std::collections::BTreeSet;

use mono3d_core::eval::{
    disentangled_nhd, evaluate, greedy_match, target_aware_categories, DetectionRecord, EvalConfig, EvalError,
    GroundTruthRecord, ImageInfo, MatchFlag,
};
use mono3d_core::geometry::{Box2D, Cuboid3D, RotationMatrix};
use mono3d_core::io::report_json;
use mono3d_core::lifting::CameraIntrinsics;
use nalgebra::Vector3;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn k() -> CameraIntrinsics<f64> {
    CameraIntrinsics::new(500.0, 500.0, 320.0, 240.0).unwrap()
}

fn image(id: &str) -> ImageInfo<f64> {
    ImageInfo { id: id.into(), width: 640, height: 480, intrinsics: k() }
}

fn gt(image_id: &str, category: &str, cuboid: Cuboid3D<f64>) -> GroundTruthRecord<f64> {
    GroundTruthRecord {
        image_id: image_id.into(),
        category: category.into(),
        box2d: rect_of(&cuboid),
        cuboid,
        ignore: false,
    }
}

fn det(image_id: &str, category: &str, score: f64, cuboid: Cuboid3D<f64>) -> DetectionRecord<f64> {
    DetectionRecord {
        image_id: image_id.into(),
        category: category.into(),
        score,
        box2d: rect_of(&cuboid),
        cuboid,
    }
}

fn rect_of(c: &Cuboid3D<f64>) -> Box2D<f64> {
    Box2D::bounding(c.corners().iter().filter_map(|p| k().project(p))).unwrap()
}

fn cube(x: f64, z: f64) -> Cuboid3D<f64> {
    Cuboid3D::axis_aligned(Vector3::new(x, 0.0, z), Vector3::repeat(1.0)).unwrap()
}

fn random_box(rng: &mut ChaCha8Rng) -> Cuboid3D<f64> {
    let axis = Vector3::new(rng.gen_range(-0.3..0.3), 1.0, rng.gen_range(-0.3..0.3));
    Cuboid3D::new(
        Vector3::new(rng.gen_range(-1.5..1.5), rng.gen_range(-0.5..0.5), rng.gen_range(3.0..8.0)),
        Vector3::new(rng.gen_range(0.3..1.5), rng.gen_range(0.3..1.5), rng.gen_range(0.3..1.5)),
        RotationMatrix::from_axis_angle(&axis, rng.gen_range(-3.0..3.0)),
    )
    .unwrap()
}

#[test]
fn perfect_predictions_score_one() {
    let images = vec![image("a"), image("b")];
    let gts = vec![gt("a", "chair", cube(0.0, 4.0)), gt("a", "table", cube(2.0, 6.0)), gt("b", "chair", cube(-1.0, 5.0))];
    let dets: Vec<_> = gts.iter().map(|g| det(&g.image_id, &g.category, 1.0, g.cuboid)).collect();
    let r = evaluate(&images, &gts, &dets, &EvalConfig::default()).unwrap();
    assert_eq!((r.ap3d, r.ar3d, r.ap2d, r.ar2d), (1.0, 1.0, 1.0, 1.0));
    assert_eq!(r.ap3d_at_15, Some(1.0));
    assert_eq!(r.ap3d_at_50, Some(1.0));
    assert!(r.categories.iter().all(|c| c.ap3d.iter().all(|&v| v == 1.0)));
    let nhd = r.nhd.unwrap();
    assert!(nhd.overall < 1e-12 && nhd.depth < 1e-12);
    assert_eq!(r.nhd_pairs, 3);
}

#[test]
fn empty_detections_score_zero() {
    let images = vec![image("a")];
    let gts = vec![gt("a", "chair", cube(0.0, 4.0))];
    let r = evaluate(&images, &gts, &[], &EvalConfig::default()).unwrap();
    assert_eq!((r.ap3d, r.ar3d, r.ap2d, r.ar2d), (0.0, 0.0, 0.0, 0.0));
    assert_eq!(r.nhd, None);
    assert_eq!(r.categories.len(), 1);
}

#[test]
fn iou_of_three_tenths_counts_six_thresholds() {
    // unit cubes offset by s along x: IoU = (1 - s) / (1 + s) = 0.3
    let s = 0.7 / 1.3;
    let images = vec![image("a")];
    let gts = vec![gt("a", "chair", cube(0.0, 4.0))];
    let dets = vec![det("a", "chair", 0.9, cube(s, 4.0))];
    let r = evaluate(&images, &gts, &dets, &EvalConfig::default()).unwrap();
    let c = &r.categories[0];
    assert_eq!(c.ap3d, vec![1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 0.0, 0.0, 0.0, 0.0]);
    assert!((r.ap3d - 0.6).abs() < 1e-12);
    assert_eq!(r.ap3d_at_25, Some(1.0));
    assert_eq!(r.ap3d_at_50, Some(0.0));
}

#[test]
fn target_aware_category_sets() {
    let gts = vec![gt("a", "chair", cube(0.0, 4.0)), gt("a", "chair", cube(2.0, 4.0)), gt("a", "table", cube(0.0, 7.0))];
    let want: BTreeSet<String> = ["chair", "table"].iter().map(|s| s.to_string()).collect();
    assert_eq!(target_aware_categories(&gts, "a"), want);
    assert!(target_aware_categories(&gts, "b").is_empty());
}

#[test]
fn cross_image_false_positive_only_counts_in_original_protocol() {
    let images = vec![image("a"), image("b")];
    let gts = vec![gt("a", "books", cube(0.0, 4.0)), gt("b", "chair", cube(0.0, 4.0))];
    let dets = vec![
        det("a", "books", 0.5, cube(0.0, 4.0)),
        det("b", "books", 0.9, cube(0.0, 4.0)),
        det("b", "chair", 0.8, cube(0.0, 4.0)),
    ];
    let aware = evaluate(&images, &gts, &dets, &EvalConfig::default()).unwrap();
    let original = evaluate(&images, &gts, &dets, &EvalConfig { target_aware: false, ..EvalConfig::default() }).unwrap();
    let books = |r: &mono3d_core::eval::EvalReport| r.categories.iter().find(|c| c.category == "books").unwrap().ap3d_mean;
    assert_eq!(books(&aware), 1.0);
    assert!(books(&original) < 1.0);
    assert_eq!(aware.counts.detections_scored, 2);
    assert_eq!(original.counts.detections_scored, 3);
    assert_eq!(aware.protocol, "target-aware");
}

#[test]
fn target_aware_never_lowers_category_ap() {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let cats = ["chair", "table", "lamp", "sofa"];
    for _ in 0..25 {
        let images: Vec<_> = (0..6).map(|i| image(&format!("im{i}"))).collect();
        let mut gts = Vec::new();
        let mut dets = Vec::new();
        for im in &images {
            for _ in 0..rng.gen_range(0..4) {
                let c = cats[rng.gen_range(0..cats.len())];
                let b = random_box(&mut rng);
                gts.push(gt(&im.id, c, b));
                if rng.gen_bool(0.7) {
                    let moved = b.with_center(b.center() + Vector3::new(rng.gen_range(-0.1..0.1), 0.0, 0.0)).unwrap();
                    dets.push(det(&im.id, c, rng.gen_range(0.0..1.0), moved));
                }
            }
            for _ in 0..rng.gen_range(0..3) {
                let c = cats[rng.gen_range(0..cats.len())];
                dets.push(det(&im.id, c, rng.gen_range(0.0..1.0), random_box(&mut rng)));
            }
        }
        let aware = evaluate(&images, &gts, &dets, &EvalConfig::default()).unwrap();
        let original = evaluate(&images, &gts, &dets, &EvalConfig { target_aware: false, ..EvalConfig::default() }).unwrap();
        assert_eq!(aware.categories.len(), original.categories.len());
        for (a, o) in aware.categories.iter().zip(&original.categories) {
            for (x, y) in a.ap3d.iter().zip(&o.ap3d) {
                assert!(x >= y, "{}: {x} < {y}", a.category);
            }
            for (x, y) in a.ap2d.iter().zip(&o.ap2d) {
                assert!(x >= y);
            }
        }
    }
}

#[test]
fn ignore_regions_and_unannotated_categories() {
    let images = vec![image("a")];
    let mut ignored = gt("a", "chair", cube(-2.0, 6.0));
    ignored.ignore = true;
    let mut only_ignored = gt("a", "plant", cube(2.0, 6.0));
    only_ignored.ignore = true;
    let gts = vec![gt("a", "chair", cube(0.0, 4.0)), ignored, only_ignored];
    let dets = vec![
        det("a", "chair", 0.9, cube(-2.0, 6.0)),
        det("a", "chair", 0.8, cube(0.0, 4.0)),
        det("a", "plant", 0.7, cube(2.0, 6.0)),
    ];
    let r = evaluate(&images, &gts, &dets, &EvalConfig::default()).unwrap();
    assert_eq!(r.categories.len(), 1);
    assert_eq!(r.categories[0].category, "chair");
    assert_eq!(r.categories[0].num_gt, 1);
    assert_eq!(r.ap3d, 1.0);
    assert_eq!(r.counts.ground_truth_ignored, 2);
}

#[test]
fn dangling_image_reference_is_a_format_error() {
    let images = vec![image("a")];
    let gts = vec![gt("a", "chair", cube(0.0, 4.0))];
    let dets = vec![det("zz", "chair", 0.9, cube(0.0, 4.0))];
    match evaluate(&images, &gts, &dets, &EvalConfig::default()) {
        Err(EvalError::Format(e)) => {
            assert_eq!(e.location, "/predictions/0/image_id");
            assert!(e.message.contains("zz"));
        }
        other => panic!("unexpected {other:?}"),
    }
    let bad = EvalConfig { iou_thresholds: vec![0.5, 0.25], ..EvalConfig::default() };
    assert!(matches!(evaluate(&images, &gts, &[], &bad), Err(EvalError::Config(_))));
}

#[test]
fn single_threshold_report_has_one_column() {
    let images = vec![image("a")];
    let gts = vec![gt("a", "chair", cube(0.0, 4.0))];
    let cfg = EvalConfig { iou_thresholds: vec![0.25], ..EvalConfig::default() };
    let r = evaluate(&images, &gts, &[det("a", "chair", 0.4, cube(0.1, 4.0))], &cfg).unwrap();
    assert_eq!(r.iou_thresholds, vec![0.25]);
    assert_eq!(r.per_threshold.len(), 1);
    assert_eq!(r.categories[0].ap3d.len(), 1);
    assert_eq!(r.ap3d_at_25, Some(1.0));
    assert_eq!(r.ap3d_at_15, None);
}

#[test]
fn rescaled_scores_and_thread_count_leave_report_unchanged() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let images: Vec<_> = (0..4).map(|i| image(&format!("im{i}"))).collect();
    let mut gts = Vec::new();
    let mut dets = Vec::new();
    for im in &images {
        for c in ["a", "b", "c"] {
            let b = random_box(&mut rng);
            gts.push(gt(&im.id, c, b));
            let moved = b.with_center(b.center() + Vector3::new(0.0, rng.gen_range(-0.3..0.3), 0.0)).unwrap();
            dets.push(det(&im.id, c, rng.gen_range(0.05..1.0), moved));
            dets.push(det(&im.id, c, rng.gen_range(0.05..1.0), random_box(&mut rng)));
        }
    }
    let cfg = EvalConfig::default();
    let base = report_json(&evaluate(&images, &gts, &dets, &cfg).unwrap());
    let halved: Vec<_> = dets.iter().map(|d| DetectionRecord { score: d.score * 0.5, ..d.clone() }).collect();
    let r = evaluate(&images, &gts, &halved, &cfg).unwrap();
    assert_eq!(report_json(&r), base);
    for threads in [1, 3] {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
        let again = pool.install(|| evaluate(&images, &gts, &dets, &cfg).unwrap());
        assert_eq!(report_json(&again), base);
    }
}

/// Direct restatement of the greedy rule, visiting detections by counting
/// how many outrank each one.
fn greedy_reference(scores: &[f64], ov: &[Vec<f64>], ignore: &[bool], thr: f64) -> Vec<MatchFlag> {
    let n = scores.len();
    let rank = |d: usize| (0..n).filter(|&e| scores[e] > scores[d] || (scores[e] == scores[d] && e < d)).count();
    let mut by_rank = vec![0; n];
    for d in 0..n {
        by_rank[rank(d)] = d;
    }
    let mut taken = vec![false; ignore.len()];
    let mut flags = vec![MatchFlag::FalsePositive; n];
    for &d in &by_rank {
        let cands: Vec<usize> = (0..ignore.len()).filter(|&g| !ignore[g] && !taken[g] && ov[d][g] >= thr).collect();
        if let Some(&g) = cands.iter().find(|&&g| cands.iter().all(|&h| ov[d][h] <= ov[d][g])) {
            taken[g] = true;
            flags[d] = MatchFlag::TruePositive;
        } else if (0..ignore.len()).any(|g| ignore[g] && ov[d][g] >= thr) {
            flags[d] = MatchFlag::Ignored;
        }
    }
    flags
}

#[test]
fn greedy_matching_matches_reference_on_small_cases() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for _ in 0..2000 {
        let scores: Vec<f64> = (0..3).map(|_| rng.gen_range(0..4) as f64 / 4.0).collect();
        let ov: Vec<Vec<f64>> = (0..3).map(|_| (0..2).map(|_| rng.gen_range(0..5) as f64 / 8.0).collect()).collect();
        let ignore: Vec<bool> = (0..2).map(|_| rng.gen_bool(0.25)).collect();
        let got = greedy_match(&scores, &ov, &ignore, 0.25);
        assert_eq!(got.det_flags, greedy_reference(&scores, &ov, &ignore, 0.25));
    }
}

#[test]
fn disentangled_components_isolate_one_group() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for _ in 0..50 {
        let g = random_box(&mut rng);
        let (u, v) = k().project(g.center()).unwrap();
        let z = g.center().z;
        let preds = [
            g.with_center(k().unproject_pixel(u + rng.gen_range(5.0..30.0), v - rng.gen_range(5.0..30.0), z)).unwrap(),
            g.with_center(g.center() * (rng.gen_range(1.1..1.6) * z) / z).unwrap(),
            g.with_dims(g.dims() * rng.gen_range(1.1..1.5)).unwrap(),
            g.with_rotation(RotationMatrix::from_axis_angle(&Vector3::y(), rng.gen_range(0.2..1.0)) * *g.rotation()),
        ];
        for (group, p) in preds.iter().enumerate() {
            let b = disentangled_nhd(p, &g, &k()).unwrap();
            let parts = [b.xy, b.depth, b.size, b.pose];
            for (i, &val) in parts.iter().enumerate() {
                if i == group {
                    assert!(val > 1e-6, "group {group} own component {val}");
                } else {
                    assert!(val.abs() <= 1e-9, "group {group} leaked into {i}: {val}");
                }
            }
            assert!(b.overall > 1e-6);
        }
        let zero = disentangled_nhd(&g, &g, &k()).unwrap();
        assert!([zero.overall, zero.xy, zero.depth, zero.size, zero.pose].iter().all(|v| v.abs() <= 1e-9));
    }
}
