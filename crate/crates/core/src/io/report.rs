use std::path::Path;

use super::codec::to_pretty_json;
use super::{write_file, IoError};
use crate::eval::EvalReport;

pub fn report_json(report: &EvalReport) -> Vec<u8> {
    to_pretty_json(report)
}

/// Per-category table with AP/AR in percent (two decimals), followed by a
/// `mean` row over the listed categories.
pub fn report_csv(report: &EvalReport) -> Vec<u8> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let pct = |v: f64| format!("{:.2}", 100.0 * v);
    w.write_record(["Category", "AP2D", "AP3D", "AR2D", "AR3D"]).expect("in-memory CSV");
    for c in &report.categories {
        w.write_record([
            c.category.clone(),
            pct(c.ap2d_mean),
            pct(c.ap3d_mean),
            pct(c.ar2d_mean),
            pct(c.ar3d_mean),
        ])
        .expect("in-memory CSV");
    }
    w.write_record([
        "mean".to_string(),
        pct(report.ap2d),
        pct(report.ap3d),
        pct(report.ar2d),
        pct(report.ar3d),
    ])
    .expect("in-memory CSV");
    w.into_inner().expect("in-memory CSV")
}

/// Writes the JSON report and the CSV table.
pub fn save_report(report: &EvalReport, json_path: &Path, csv_path: &Path) -> Result<(), IoError> {
    write_file(json_path, &report_json(report))?;
    write_file(csv_path, &report_csv(report))
}
