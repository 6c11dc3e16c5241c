//! Greedy score-ordered matching of detections to ground truth within one
//! image and category.

use super::{DetectionRecord, GroundTruthRecord};
use crate::geometry::iou3d;
use crate::scalar::Real;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Overlap {
    /// Axis-aligned rectangle IoU of the 2D boxes.
    Box2D,
    /// Oriented cuboid IoU.
    Box3D,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MatchFlag {
    TruePositive,
    FalsePositive,
    /// Matched an ignore region: neither TP nor FP.
    Ignored,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MatchResult {
    /// One flag per detection, in input order.
    pub det_flags: Vec<MatchFlag>,
    /// Whether each ground truth was claimed by a true positive.
    pub gt_matched: Vec<bool>,
}

impl MatchResult {
    pub fn matched_count(&self) -> usize {
        self.gt_matched.iter().filter(|&&m| m).count()
    }
}

/// Whether `overlap` clears `threshold`. A slack of [`Real::TOLERANCE`]
/// lets overlaps that equal the threshold analytically still count.
#[inline]
pub fn clears<T: Real>(overlap: T, threshold: T) -> bool {
    overlap >= threshold - T::tol()
}

/// Detection indices sorted by descending score, ties by input order.
pub fn score_order<T: Real>(scores: &[T]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| {
        scores[b]
            .partial_cmp(&scores[a])
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(a.cmp(&b))
    });
    order
}

/// Core greedy matcher over a precomputed `overlaps[det][gt]` table.
///
/// Detections are visited by descending score. Each takes the unmatched,
/// non-ignore ground truth with the highest overlap clearing `threshold`
/// (first index on ties). Failing that, a detection clearing the threshold
/// against an ignore region is flagged [`MatchFlag::Ignored`]; otherwise it
/// is a false positive.
pub fn greedy_match<T: Real>(
    scores: &[T],
    overlaps: &[Vec<T>],
    gt_ignore: &[bool],
    threshold: T,
) -> MatchResult {
    let mut det_flags = vec![MatchFlag::FalsePositive; scores.len()];
    let mut gt_matched = vec![false; gt_ignore.len()];
    for d in score_order(scores) {
        let row = &overlaps[d];
        let mut best: Option<(usize, T)> = None;
        for (g, &ov) in row.iter().enumerate() {
            if gt_ignore[g] || gt_matched[g] || !clears(ov, threshold) {
                continue;
            }
            if best.is_none_or(|(_, b)| ov > b) {
                best = Some((g, ov));
            }
        }
        if let Some((g, _)) = best {
            gt_matched[g] = true;
            det_flags[d] = MatchFlag::TruePositive;
        } else if row
            .iter()
            .zip(gt_ignore)
            .any(|(&ov, &ign)| ign && clears(ov, threshold))
        {
            det_flags[d] = MatchFlag::Ignored;
        }
    }
    MatchResult {
        det_flags,
        gt_matched,
    }
}

pub fn overlap_table<T: Real>(
    dets: &[&DetectionRecord<T>],
    gts: &[&GroundTruthRecord<T>],
    kind: Overlap,
) -> Vec<Vec<T>> {
    dets.iter()
        .map(|d| {
            gts.iter()
                .map(|g| match kind {
                    Overlap::Box2D => d.box2d.iou(&g.box2d),
                    Overlap::Box3D => iou3d(&d.cuboid, &g.cuboid),
                })
                .collect()
        })
        .collect()
}

/// Matches detections to ground truth that share one image and category.
pub fn match_detections<T: Real>(
    dets: &[&DetectionRecord<T>],
    gts: &[&GroundTruthRecord<T>],
    threshold: T,
    kind: Overlap,
) -> MatchResult {
    let scores: Vec<T> = dets.iter().map(|d| d.score).collect();
    let ignore: Vec<bool> = gts.iter().map(|g| g.ignore).collect();
    greedy_match(&scores, &overlap_table(dets, gts, kind), &ignore, threshold)
}
