//! File formats: JSON manifests, prediction sets, reports and intrinsics;
//! the binary `OVD1` depth format and binary PGM masks.
//!
//! Every loader returns a [`FormatError`] locating the failure (a JSON
//! pointer for JSON documents, a byte offset for binary files) instead of
//! panicking, whatever the input bytes.

mod codec;
mod manifest;
mod omni3d;
mod predictions;
mod raster;
mod report;

pub use codec::{parse_json, CuboidJson};
pub use manifest::{load_manifest, parse_manifest, save_manifest, DatasetManifest, MANIFEST_VERSION};
pub use omni3d::{convert_omni3d, parse_omni3d, ConversionStats};
pub use predictions::{
    load_predictions, parse_predictions, projected_box, save_predictions, Prediction, PredictionSet,
    PREDICTIONS_VERSION,
};
pub use raster::{
    decode_depth, decode_mask, encode_depth, encode_mask, load_depth, load_intrinsics, load_mask, save_depth,
    save_mask, DEPTH_MAGIC,
};
pub use report::{report_csv, report_json, save_report};

use std::path::Path;

use crate::error::FormatError;

#[derive(Debug, thiserror::Error)]
pub enum IoError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Format(#[from] FormatError),
}

impl IoError {
    pub fn io(path: &Path, source: std::io::Error) -> Self {
        IoError::Io {
            path: path.display().to_string(),
            source,
        }
    }
}

pub(crate) fn read_file(path: &Path) -> Result<Vec<u8>, IoError> {
    std::fs::read(path).map_err(|e| IoError::io(path, e))
}

pub(crate) fn write_file(path: &Path, bytes: &[u8]) -> Result<(), IoError> {
    std::fs::write(path, bytes).map_err(|e| IoError::io(path, e))
}
