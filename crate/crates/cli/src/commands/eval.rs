use mono3d_core::eval::{default_iou2d_thresholds, default_iou3d_thresholds, evaluate, EvalConfig, EvalError, EvalReport};
use mono3d_core::io::{load_manifest, load_predictions, save_report};

use crate::cli::{EvalArgs, Protocol};
use crate::{CliError, Ui};

pub fn eval_config(a: &EvalArgs) -> Result<EvalConfig, CliError> {
    let cfg = EvalConfig {
        iou_thresholds: a.iou_thresholds.clone().unwrap_or_else(default_iou3d_thresholds),
        iou2d_thresholds: a.iou2d_thresholds.clone().unwrap_or_else(default_iou2d_thresholds),
        target_aware: a.protocol == Protocol::TargetAware,
        nhd_gate_iou2d: a.nhd_gate,
        easy_categories: a.easy.iter().cloned().collect(),
        hard_categories: a.hard.iter().cloned().collect(),
        recall_interp_points: a.recall_points,
    };
    cfg.validate().map_err(|e| CliError::Usage(e.to_string()))?;
    Ok(cfg)
}

/// Evaluates and writes `report.json` and `report.csv` into `out_dir`.
pub fn cmd_eval(a: &EvalArgs, ui: Ui) -> Result<EvalReport, CliError> {
    let cfg = eval_config(a)?;
    let manifest = load_manifest(&a.manifest)?;
    let predictions = load_predictions(&a.predictions)?;
    let dets = predictions
        .to_detections(&manifest.images)
        .map_err(|e| CliError::Data(e.in_file(&a.predictions).to_string()))?;
    ui.progress(format!(
        "scoring {} detections ({} failed lifts skipped) against {} annotations",
        dets.len(),
        predictions.predictions.len() - dets.len(),
        manifest.annotations.len()
    ));
    let mut report = evaluate(&manifest.images, &manifest.annotations, &dets, &cfg).map_err(|e| match e {
        EvalError::Format(f) => CliError::Data(f.in_file(&a.predictions).to_string()),
        EvalError::Config(m) => CliError::Usage(m),
    })?;
    if a.stamp {
        let now = std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0);
        report.generated_at_unix = Some(now);
    }
    std::fs::create_dir_all(&a.out_dir).map_err(|e| CliError::Data(format!("{}: {e}", a.out_dir.display())))?;
    save_report(&report, &a.out_dir.join("report.json"), &a.out_dir.join("report.csv"))?;
    Ok(report)
}
