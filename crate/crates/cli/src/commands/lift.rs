use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use mono3d_core::geometry::Box2D;
use mono3d_core::io::{load_depth, load_intrinsics, load_manifest, load_mask, parse_json, save_predictions, Prediction, PredictionSet};
use mono3d_core::lifting::{lift_detection, DepthMap, LiftParams};
use mono3d_core::FormatError;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cli::LiftArgs;
use crate::{CliError, Ui};

/// Input of `lift`: one entry per 2D detection.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DetectionsFile {
    pub version: String,
    pub detections: Vec<Detection2D>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Detection2D {
    pub image_id: String,
    pub category: String,
    pub score: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub box2d: Option<[f64; 4]>,
    /// Mask file name, relative to the mask directory.
    pub mask: String,
    /// Depth file name relative to the depth directory; `<image_id>.ovd`
    /// when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub depth: Option<String>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct LiftSummary {
    pub total: usize,
    pub lifted: usize,
    pub failed: usize,
}

fn lift_params(a: &LiftArgs) -> Result<LiftParams<f64>, CliError> {
    let params = LiftParams {
        dbscan_eps: a.eps.unwrap_or(LiftParams::<f64>::default().dbscan_eps),
        dbscan_min_pts: a.min_pts,
        adaptive_eps: a.adaptive_eps,
        min_points: a.min_points,
        max_points: a.max_points,
    };
    params.validate().map_err(|e| CliError::Usage(e.to_string()))?;
    Ok(params)
}

fn data_error(path: &Path, e: FormatError) -> CliError {
    CliError::Data(e.in_file(path).to_string())
}

/// Lifts every detection; failed lifts are kept with a null cuboid and a
/// reason code. Fails (after writing the output) when detections exist but
/// none could be lifted.
pub fn cmd_lift(a: &LiftArgs, ui: Ui) -> Result<LiftSummary, CliError> {
    let params = lift_params(a)?;
    let manifest = load_manifest(&a.manifest)?;
    let bytes = std::fs::read(&a.detections).map_err(|e| CliError::Data(format!("{}: {e}", a.detections.display())))?;
    let input: DetectionsFile = parse_json(&bytes).map_err(|e| data_error(&a.detections, e))?;
    let override_k = a.intrinsics.as_deref().map(load_intrinsics).transpose()?;
    let images = manifest.image_index();

    for (i, d) in input.detections.iter().enumerate() {
        if !images.contains_key(d.image_id.as_str()) {
            let e = FormatError::new(format!("/detections/{i}/image_id"), format!("unknown image id {:?}", d.image_id));
            return Err(data_error(&a.detections, e));
        }
        if !(0.0..=1.0).contains(&d.score) {
            let e = FormatError::new(format!("/detections/{i}/score"), format!("score {} is outside [0, 1]", d.score));
            return Err(data_error(&a.detections, e));
        }
        if let Some(b) = d.box2d {
            if b.iter().any(|v| !v.is_finite()) || b[2] < 0.0 || b[3] < 0.0 {
                let e = FormatError::new(format!("/detections/{i}/box2d"), "box2d needs finite values and w, h >= 0");
                return Err(data_error(&a.detections, e));
            }
        }
    }

    let depth_path = |d: &Detection2D| -> PathBuf {
        a.depth_dir.join(d.depth.clone().unwrap_or_else(|| format!("{}.ovd", d.image_id)))
    };
    let mut unique: BTreeMap<PathBuf, usize> = BTreeMap::new();
    for d in &input.detections {
        let next = unique.len();
        unique.entry(depth_path(d)).or_insert(next);
    }
    let paths: Vec<(&PathBuf, usize)> = unique.iter().map(|(p, &i)| (p, i)).collect();
    let mut loaded: Vec<(usize, Result<DepthMap<f64>, CliError>)> = paths
        .par_iter()
        .map(|(p, i)| (*i, load_depth::<f64>(p).map_err(CliError::from)))
        .collect();
    loaded.sort_by_key(|(i, _)| *i);
    let depths: Vec<DepthMap<f64>> = loaded.into_iter().map(|(_, r)| r).collect::<Result<_, _>>()?;
    ui.progress(format!("loaded {} depth maps", depths.len()));

    let results: Vec<Result<Prediction, CliError>> = input
        .detections
        .par_iter()
        .map(|d| {
            let mask = load_mask(&a.mask_dir.join(&d.mask))?;
            let depth = &depths[unique[&depth_path(d)]];
            let k = override_k.unwrap_or(images[d.image_id.as_str()].intrinsics);
            let (cuboid, reason) = match lift_detection(depth, &mask, &k, &params) {
                Ok(c) => (Some(c), None),
                Err(e) => (None, Some(e.code().to_string())),
            };
            Ok(Prediction {
                image_id: d.image_id.clone(),
                category: d.category.clone(),
                score: d.score,
                box2d: d.box2d.map(|b| Box2D::new(b[0], b[1], b[2], b[3])),
                cuboid,
                reason,
            })
        })
        .collect();
    let predictions: Vec<Prediction> = results.into_iter().collect::<Result<_, _>>()?;

    let lifted = predictions.iter().filter(|p| p.cuboid.is_some()).count();
    let summary = LiftSummary {
        total: predictions.len(),
        lifted,
        failed: predictions.len() - lifted,
    };
    for p in predictions.iter().filter(|p| p.cuboid.is_none()) {
        ui.progress(format!(
            "lift failed for {} / {}: {}",
            p.image_id,
            p.category,
            p.reason.as_deref().unwrap_or("unknown")
        ));
    }
    save_predictions(&PredictionSet { predictions, ..PredictionSet::default() }, &a.output)?;
    if summary.total > 0 && summary.lifted == 0 {
        return Err(CliError::Data("no detection could be lifted".into()));
    }
    Ok(summary)
}
