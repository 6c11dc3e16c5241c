use std::collections::{BTreeMap, BTreeSet, HashMap};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::ap::{average_precision, ScoredFlag};
use super::matching::{clears, greedy_match, overlap_table, MatchFlag, Overlap};
use super::nhd::{disentangled_nhd, mean_breakdown, NhdBreakdown};
use super::{DetectionRecord, GroundTruthRecord, ImageInfo};
use crate::error::FormatError;
use crate::scalar::Real;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error(transparent)]
    Format(#[from] FormatError),
    #[error("invalid evaluation config: {0}")]
    Config(String),
}

/// `i / 20` for `i` in `1..=10`: 0.05, 0.10, ..., 0.50.
pub fn default_iou3d_thresholds() -> Vec<f64> {
    (1..=10).map(|i| i as f64 / 20.0).collect()
}

/// `i / 20` for `i` in `10..=19`: 0.50, 0.55, ..., 0.95.
pub fn default_iou2d_thresholds() -> Vec<f64> {
    (10..=19).map(|i| i as f64 / 20.0).collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvalConfig {
    pub iou_thresholds: Vec<f64>,
    pub iou2d_thresholds: Vec<f64>,
    /// Drop, per image, detections of categories without ground truth in
    /// that image.
    pub target_aware: bool,
    /// Minimum 2D IoU between a detection and a ground truth for the pair
    /// to enter the NHD averages.
    pub nhd_gate_iou2d: f64,
    pub easy_categories: BTreeSet<String>,
    pub hard_categories: BTreeSet<String>,
    pub recall_interp_points: usize,
}

impl Default for EvalConfig {
    fn default() -> Self {
        Self {
            iou_thresholds: default_iou3d_thresholds(),
            iou2d_thresholds: default_iou2d_thresholds(),
            target_aware: true,
            nhd_gate_iou2d: 0.5,
            easy_categories: BTreeSet::new(),
            hard_categories: BTreeSet::new(),
            recall_interp_points: 101,
        }
    }
}

fn check_thresholds(name: &str, ts: &[f64]) -> Result<(), EvalError> {
    if ts.is_empty() {
        return Err(EvalError::Config(format!("{name} is empty")));
    }
    for (i, &t) in ts.iter().enumerate() {
        if !(t > 0.0 && t <= 1.0) {
            return Err(EvalError::Config(format!("{name}[{i}] = {t} is outside (0, 1]")));
        }
        if i > 0 && t <= ts[i - 1] {
            return Err(EvalError::Config(format!("{name} must be strictly increasing")));
        }
    }
    Ok(())
}

impl EvalConfig {
    pub fn validate(&self) -> Result<(), EvalError> {
        check_thresholds("iou_thresholds", &self.iou_thresholds)?;
        check_thresholds("iou2d_thresholds", &self.iou2d_thresholds)?;
        if !(0.0..=1.0).contains(&self.nhd_gate_iou2d) {
            return Err(EvalError::Config("nhd_gate_iou2d must lie in [0, 1]".into()));
        }
        if self.recall_interp_points < 2 {
            return Err(EvalError::Config("recall_interp_points must be >= 2".into()));
        }
        Ok(())
    }

    fn threshold_index(&self, t: f64) -> Option<usize> {
        self.iou_thresholds.iter().position(|&x| (x - t).abs() < 1e-9)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CategoryReport {
    pub category: String,
    pub num_gt: usize,
    pub num_detections: usize,
    /// AP₃D at each of `iou_thresholds`.
    pub ap3d: Vec<f64>,
    pub ar3d: Vec<f64>,
    /// AP₂D at each of `iou2d_thresholds`.
    pub ap2d: Vec<f64>,
    pub ar2d: Vec<f64>,
    pub ap3d_mean: f64,
    pub ar3d_mean: f64,
    pub ap2d_mean: f64,
    pub ar2d_mean: f64,
    pub nhd_pairs: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ThresholdSummary {
    pub threshold: f64,
    pub ap3d: f64,
    pub ar3d: f64,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Counts {
    pub images: usize,
    pub ground_truth: usize,
    pub ground_truth_ignored: usize,
    pub detections: usize,
    /// Detections left after protocol filtering that belong to an evaluated
    /// category.
    pub detections_scored: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub protocol: String,
    pub iou_thresholds: Vec<f64>,
    pub iou2d_thresholds: Vec<f64>,
    pub recall_interp_points: usize,
    /// Unweighted means over the categories listed in `categories`.
    pub ap3d: f64,
    pub ar3d: f64,
    pub ap2d: f64,
    pub ar2d: f64,
    pub ap3d_at_15: Option<f64>,
    pub ap3d_at_25: Option<f64>,
    pub ap3d_at_50: Option<f64>,
    pub ap3d_easy: Option<f64>,
    pub ap3d_hard: Option<f64>,
    pub per_threshold: Vec<ThresholdSummary>,
    pub nhd: Option<NhdBreakdown<f64>>,
    pub nhd_pairs: usize,
    pub nhd_skipped: usize,
    pub counts: Counts,
    pub categories: Vec<CategoryReport>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub generated_at_unix: Option<u64>,
}

/// Categories with at least one ground-truth record (ignore regions
/// included) in `image_id`.
pub fn target_aware_categories<T: Real>(gts: &[GroundTruthRecord<T>], image_id: &str) -> BTreeSet<String> {
    gts.iter()
        .filter(|g| g.image_id == image_id)
        .map(|g| g.category.clone())
        .collect()
}

type Group<'a, T> = (Vec<&'a DetectionRecord<T>>, Vec<&'a GroundTruthRecord<T>>);

struct CategoryOutcome {
    report: CategoryReport,
    nhd: Vec<NhdBreakdown<f64>>,
    nhd_skipped: usize,
}

fn mean(v: &[f64]) -> f64 {
    if v.is_empty() {
        0.0
    } else {
        v.iter().sum::<f64>() / v.len() as f64
    }
}

fn evaluate_category<T: Real>(
    category: &str,
    groups: &BTreeMap<usize, Group<'_, T>>,
    images: &[ImageInfo<T>],
    config: &EvalConfig,
) -> CategoryOutcome {
    let t3: Vec<T> = config.iou_thresholds.iter().map(|&t| T::lit(t)).collect();
    let t2: Vec<T> = config.iou2d_thresholds.iter().map(|&t| T::lit(t)).collect();
    let mut flags3: Vec<Vec<ScoredFlag<T>>> = vec![Vec::new(); t3.len()];
    let mut flags2: Vec<Vec<ScoredFlag<T>>> = vec![Vec::new(); t2.len()];
    let mut matched3 = vec![0usize; t3.len()];
    let mut matched2 = vec![0usize; t2.len()];
    let mut n_gt = 0usize;
    let mut n_det = 0usize;
    let mut nhd = Vec::new();
    let mut nhd_skipped = 0usize;
    let gate = T::lit(config.nhd_gate_iou2d);

    for (&img, (dets, gts)) in groups {
        n_gt += gts.iter().filter(|g| !g.ignore).count();
        n_det += dets.len();
        let scores: Vec<T> = dets.iter().map(|d| d.score).collect();
        let ignore: Vec<bool> = gts.iter().map(|g| g.ignore).collect();
        let ov3 = overlap_table(dets, gts, Overlap::Box3D);
        let ov2 = overlap_table(dets, gts, Overlap::Box2D);

        let run = |ov: &Vec<Vec<T>>, thresholds: &[T], flags: &mut [Vec<ScoredFlag<T>>], matched: &mut [usize]| {
            for (ti, &thr) in thresholds.iter().enumerate() {
                let r = greedy_match(&scores, ov, &ignore, thr);
                matched[ti] += r.matched_count();
                for (d, flag) in r.det_flags.iter().enumerate() {
                    if *flag != MatchFlag::Ignored {
                        flags[ti].push(ScoredFlag {
                            score: scores[d],
                            tp: *flag == MatchFlag::TruePositive,
                        });
                    }
                }
            }
        };
        run(&ov3, &t3, &mut flags3, &mut matched3);
        run(&ov2, &t2, &mut flags2, &mut matched2);

        let k = &images[img].intrinsics;
        for (d, det) in dets.iter().enumerate() {
            let mut best: Option<(usize, T)> = None;
            for (g, gt) in gts.iter().enumerate() {
                if gt.ignore {
                    continue;
                }
                if best.is_none_or(|(_, b)| ov2[d][g] > b) {
                    best = Some((g, ov2[d][g]));
                }
            }
            if let Some((g, iou)) = best {
                if clears(iou, gate) {
                    match disentangled_nhd(&det.cuboid, &gts[g].cuboid, k) {
                        Ok(b) => nhd.push(b.to_f64()),
                        Err(_) => nhd_skipped += 1,
                    }
                }
            }
        }
    }

    let points = config.recall_interp_points;
    let ap = |flags: &[Vec<ScoredFlag<T>>]| -> Vec<f64> {
        flags
            .iter()
            .map(|f| average_precision(f, n_gt, points).map_or(0.0, |v| v.to_f64_lossy()))
            .collect()
    };
    let ar = |matched: &[usize]| -> Vec<f64> {
        matched
            .iter()
            .map(|&m| if n_gt == 0 { 0.0 } else { m as f64 / n_gt as f64 })
            .collect()
    };
    let (ap3d, ap2d, ar3d, ar2d) = (ap(&flags3), ap(&flags2), ar(&matched3), ar(&matched2));
    CategoryOutcome {
        report: CategoryReport {
            category: category.to_string(),
            num_gt: n_gt,
            num_detections: n_det,
            ap3d_mean: mean(&ap3d),
            ar3d_mean: mean(&ar3d),
            ap2d_mean: mean(&ap2d),
            ar2d_mean: mean(&ar2d),
            ap3d,
            ar3d,
            ap2d,
            ar2d,
            nhd_pairs: nhd.len(),
        },
        nhd,
        nhd_skipped,
    }
}

/// Scores `dets` against `gts` over every configured threshold.
///
/// Categories are those with at least one non-ignore ground truth; they are
/// reported in lexicographic order. Detections of other categories are not
/// scored. Output is a pure function of the inputs.
pub fn evaluate<T: Real>(
    images: &[ImageInfo<T>],
    gts: &[GroundTruthRecord<T>],
    dets: &[DetectionRecord<T>],
    config: &EvalConfig,
) -> Result<EvalReport, EvalError> {
    config.validate()?;
    let index: HashMap<&str, usize> = images.iter().enumerate().map(|(i, im)| (im.id.as_str(), i)).collect();
    let lookup = |id: &str, loc: String| {
        index
            .get(id)
            .copied()
            .ok_or_else(|| FormatError::new(loc, format!("unknown image id {id:?}")))
    };
    let gt_img: Vec<usize> = gts
        .iter()
        .enumerate()
        .map(|(i, g)| lookup(&g.image_id, format!("/annotations/{i}/image_id")))
        .collect::<Result<_, _>>()?;
    let det_img: Vec<usize> = dets
        .iter()
        .enumerate()
        .map(|(i, d)| lookup(&d.image_id, format!("/predictions/{i}/image_id")))
        .collect::<Result<_, _>>()?;

    let mut present: Vec<BTreeSet<&str>> = vec![BTreeSet::new(); images.len()];
    for (g, &img) in gts.iter().zip(&gt_img) {
        present[img].insert(g.category.as_str());
    }
    let categories: BTreeSet<&str> = gts.iter().filter(|g| !g.ignore).map(|g| g.category.as_str()).collect();

    let mut grouped: BTreeMap<&str, BTreeMap<usize, Group<'_, T>>> = BTreeMap::new();
    for (g, &img) in gts.iter().zip(&gt_img) {
        if categories.contains(g.category.as_str()) {
            grouped.entry(g.category.as_str()).or_default().entry(img).or_default().1.push(g);
        }
    }
    let mut scored = 0usize;
    for (d, &img) in dets.iter().zip(&det_img) {
        let cat = d.category.as_str();
        if !categories.contains(cat) || (config.target_aware && !present[img].contains(cat)) {
            continue;
        }
        scored += 1;
        grouped.entry(cat).or_default().entry(img).or_default().0.push(d);
    }

    let work: Vec<(&str, &BTreeMap<usize, Group<'_, T>>)> = grouped.iter().map(|(c, g)| (*c, g)).collect();
    let outcomes: Vec<CategoryOutcome> = work
        .par_iter()
        .map(|(cat, groups)| evaluate_category(cat, groups, images, config))
        .collect();

    let reports: Vec<CategoryReport> = outcomes.iter().map(|o| o.report.clone()).collect();
    let all_nhd: Vec<NhdBreakdown<f64>> = outcomes.iter().flat_map(|o| o.nhd.iter().copied()).collect();
    let nhd_skipped = outcomes.iter().map(|o| o.nhd_skipped).sum();

    let per_threshold = config
        .iou_thresholds
        .iter()
        .enumerate()
        .map(|(i, &t)| ThresholdSummary {
            threshold: t,
            ap3d: mean(&reports.iter().map(|r| r.ap3d[i]).collect::<Vec<_>>()),
            ar3d: mean(&reports.iter().map(|r| r.ar3d[i]).collect::<Vec<_>>()),
        })
        .collect::<Vec<_>>();
    let column = |t: f64| config.threshold_index(t).map(|i| per_threshold[i].ap3d);
    let subset = |set: &BTreeSet<String>| {
        let v: Vec<f64> = reports
            .iter()
            .filter(|r| set.contains(&r.category))
            .map(|r| r.ap3d_mean)
            .collect();
        (!v.is_empty()).then(|| mean(&v))
    };
    let means = |f: fn(&CategoryReport) -> f64| mean(&reports.iter().map(f).collect::<Vec<_>>());

    Ok(EvalReport {
        protocol: if config.target_aware { "target-aware" } else { "original" }.to_string(),
        iou_thresholds: config.iou_thresholds.clone(),
        iou2d_thresholds: config.iou2d_thresholds.clone(),
        recall_interp_points: config.recall_interp_points,
        ap3d: means(|r| r.ap3d_mean),
        ar3d: means(|r| r.ar3d_mean),
        ap2d: means(|r| r.ap2d_mean),
        ar2d: means(|r| r.ar2d_mean),
        ap3d_at_15: column(0.15),
        ap3d_at_25: column(0.25),
        ap3d_at_50: column(0.50),
        ap3d_easy: subset(&config.easy_categories),
        ap3d_hard: subset(&config.hard_categories),
        per_threshold,
        nhd: mean_breakdown(&all_nhd),
        nhd_pairs: all_nhd.len(),
        nhd_skipped,
        counts: Counts {
            images: images.len(),
            ground_truth: gts.len(),
            ground_truth_ignored: gts.iter().filter(|g| g.ignore).count(),
            detections: dets.len(),
            detections_scored: scored,
        },
        categories: reports,
        generated_at_unix: None,
    })
}
