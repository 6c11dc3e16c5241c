//! Detection scoring: greedy matching, interpolated AP/AR over IoU
//! threshold sweeps, target-aware category filtering and corner-based NHD.

mod ap;
mod hungarian;
mod matching;
mod nhd;
mod records;
mod report;

pub use ap::{average_precision, ScoredFlag};
pub use hungarian::{hungarian_assign, Assignment, AssignmentError};
pub use matching::{clears, greedy_match, match_detections, overlap_table, score_order, MatchFlag, MatchResult, Overlap};
pub use nhd::{
    disentangled_box, disentangled_nhd, mean_breakdown, nhd, NhdBreakdown, VariableGroup, NHD_CORNER_NORMALIZER,
};
pub use records::{DetectionRecord, GroundTruthRecord, ImageInfo};
pub use report::{
    default_iou2d_thresholds, default_iou3d_thresholds, evaluate, target_aware_categories, CategoryReport, Counts,
    EvalConfig, EvalError, EvalReport, ThresholdSummary,
};
