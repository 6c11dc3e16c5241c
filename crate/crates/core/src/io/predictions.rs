use std::path::Path;

use serde::{Deserialize, Serialize};

use super::codec::{box_from_json, box_to_json, parse_json, to_pretty_json, CuboidJson};
use super::manifest::check_version;
use super::{read_file, write_file, IoError};
use crate::error::FormatError;
use crate::eval::{DetectionRecord, ImageInfo};
use crate::geometry::{Box2D, Cuboid3D};

pub const PREDICTIONS_VERSION: &str = "1.0";

/// One predicted object. A `None` cuboid marks a failed lift, explained by
/// `reason`.
#[derive(Clone, Debug, PartialEq)]
pub struct Prediction {
    pub image_id: String,
    pub category: String,
    pub score: f64,
    pub box2d: Option<Box2D<f64>>,
    pub cuboid: Option<Cuboid3D<f64>>,
    pub reason: Option<String>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PredictionSet {
    pub version: String,
    pub predictions: Vec<Prediction>,
}

impl Default for PredictionSet {
    fn default() -> Self {
        Self {
            version: PREDICTIONS_VERSION.to_string(),
            predictions: Vec::new(),
        }
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PredictionFile {
    version: String,
    predictions: Vec<PredictionJson>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PredictionJson {
    image_id: String,
    category: String,
    score: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    box2d: Option<[f64; 4]>,
    cuboid: Option<CuboidJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    reason: Option<String>,
}

pub fn parse_predictions(bytes: &[u8]) -> Result<PredictionSet, FormatError> {
    let file: PredictionFile = parse_json(bytes)?;
    check_version(&file.version, PREDICTIONS_VERSION)?;
    let mut predictions = Vec::with_capacity(file.predictions.len());
    for (i, p) in file.predictions.into_iter().enumerate() {
        let at = format!("/predictions/{i}");
        if p.image_id.is_empty() {
            return Err(FormatError::new(format!("{at}/image_id"), "image id must be non-empty"));
        }
        if p.category.is_empty() {
            return Err(FormatError::new(format!("{at}/category"), "category must be non-empty"));
        }
        if !(0.0..=1.0).contains(&p.score) {
            return Err(FormatError::new(
                format!("{at}/score"),
                format!("score {} is outside [0, 1]", p.score),
            ));
        }
        let box2d = match &p.box2d {
            Some(b) => Some(box_from_json(b, &format!("{at}/box2d"))?),
            None => None,
        };
        let cuboid = match &p.cuboid {
            Some(c) => Some(c.to_cuboid(&format!("{at}/cuboid"))?),
            None => None,
        };
        predictions.push(Prediction {
            image_id: p.image_id,
            category: p.category,
            score: p.score,
            box2d,
            cuboid,
            reason: p.reason,
        });
    }
    Ok(PredictionSet {
        version: file.version,
        predictions,
    })
}

pub fn load_predictions(path: &Path) -> Result<PredictionSet, IoError> {
    let bytes = read_file(path)?;
    parse_predictions(&bytes).map_err(|e| e.in_file(path).into())
}

impl PredictionSet {
    pub fn to_json(&self) -> Vec<u8> {
        let file = PredictionFile {
            version: self.version.clone(),
            predictions: self
                .predictions
                .iter()
                .map(|p| PredictionJson {
                    image_id: p.image_id.clone(),
                    category: p.category.clone(),
                    score: p.score,
                    box2d: p.box2d.as_ref().map(box_to_json),
                    cuboid: p.cuboid.as_ref().map(CuboidJson::from_cuboid),
                    reason: p.reason.clone(),
                })
                .collect(),
        };
        to_pretty_json(&file)
    }

    /// Scorable detections: failed lifts are dropped and a missing 2D box is
    /// replaced by the projection of the cuboid corners, clipped to the
    /// image. Dangling image ids are reported by their position in this set.
    pub fn to_detections(&self, images: &[ImageInfo<f64>]) -> Result<Vec<DetectionRecord<f64>>, FormatError> {
        let mut out = Vec::with_capacity(self.predictions.len());
        for (i, p) in self.predictions.iter().enumerate() {
            let Some(image) = images.iter().find(|im| im.id == p.image_id) else {
                return Err(FormatError::new(
                    format!("/predictions/{i}/image_id"),
                    format!("unknown image id {:?}", p.image_id),
                ));
            };
            let Some(cuboid) = p.cuboid else { continue };
            let box2d = p.box2d.unwrap_or_else(|| projected_box(&cuboid, image));
            out.push(DetectionRecord {
                image_id: p.image_id.clone(),
                category: p.category.clone(),
                score: p.score,
                box2d,
                cuboid,
            });
        }
        Ok(out)
    }
}

/// Bounding rectangle of the projected corners that lie in front of the
/// camera, clipped to the image; empty when no corner is visible.
pub fn projected_box(cuboid: &Cuboid3D<f64>, image: &ImageInfo<f64>) -> Box2D<f64> {
    let corners = cuboid.corners();
    let pts = corners.iter().filter_map(|c| image.intrinsics.project(c));
    Box2D::bounding(pts)
        .map(|b| b.clamp_to(image.width as f64, image.height as f64))
        .unwrap_or(Box2D::new(0.0, 0.0, 0.0, 0.0))
}

pub fn save_predictions(set: &PredictionSet, path: &Path) -> Result<(), IoError> {
    write_file(path, &set.to_json())
}
