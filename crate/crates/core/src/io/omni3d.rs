//! Best-effort import of the public Omni3D JSON release.
//!
//! Field mapping:
//! - `images[].id` (integer or string) becomes the image id, `K` (3×3,
//!   row-major nested lists) the intrinsics, `width`/`height` as is.
//! - `categories[]` `{id, name}` pairs become the category list, in file
//!   order; annotations refer to them by `category_id`.
//! - `bbox2D_tight` (x1, y1, x2, y2), falling back to `bbox2D_proj` when
//!   the tight box holds negative sentinels, becomes the `(x, y, w, h)`
//!   2D box.
//! - `center_cam`, `dimensions` (w, h, l) and `R_cam` form the cuboid.
//! - `ignore` is set when `valid3D` is false, `behind_camera` is true, or
//!   the record's own `ignore` flag is set.
//!
//! Annotations with an unknown category, no usable 2D box or invalid 3D
//! geometry are skipped and counted.

use std::collections::{BTreeMap, HashSet};

use nalgebra::Vector3;
use serde::Deserialize;

use super::codec::{decode_rotation, parse_json};
use super::manifest::{DatasetManifest, MANIFEST_VERSION};
use crate::error::FormatError;
use crate::eval::{GroundTruthRecord, ImageInfo};
use crate::geometry::{Box2D, Cuboid3D};
use crate::lifting::CameraIntrinsics;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct ConversionStats {
    pub images: usize,
    pub annotations: usize,
    pub ignored: usize,
    pub skipped: usize,
}

#[derive(Deserialize, Clone, PartialEq, Eq, PartialOrd, Ord)]
#[serde(untagged)]
enum Id {
    Int(i64),
    Str(String),
}

impl Id {
    fn text(&self) -> String {
        match self {
            Id::Int(i) => i.to_string(),
            Id::Str(s) => s.clone(),
        }
    }
}

#[derive(Deserialize)]
struct OmniFile {
    images: Vec<OmniImage>,
    categories: Vec<OmniCategory>,
    #[serde(default)]
    annotations: Vec<OmniAnnotation>,
}

#[derive(Deserialize)]
struct OmniImage {
    id: Id,
    width: u32,
    height: u32,
    #[serde(rename = "K")]
    k: [[f64; 3]; 3],
}

#[derive(Deserialize)]
struct OmniCategory {
    id: Id,
    name: String,
}

#[derive(Deserialize)]
struct OmniAnnotation {
    image_id: Id,
    category_id: Id,
    #[serde(rename = "bbox2D_tight", default)]
    bbox2d_tight: Option<[f64; 4]>,
    #[serde(rename = "bbox2D_proj", default)]
    bbox2d_proj: Option<[f64; 4]>,
    center_cam: [f64; 3],
    dimensions: [f64; 3],
    #[serde(rename = "R_cam")]
    r_cam: [[f64; 3]; 3],
    #[serde(rename = "valid3D", default = "yes")]
    valid3d: bool,
    #[serde(default)]
    behind_camera: bool,
    #[serde(default)]
    ignore: bool,
}

fn yes() -> bool {
    true
}

fn usable_box(b: &Option<[f64; 4]>) -> Option<Box2D<f64>> {
    let [x1, y1, x2, y2] = (*b)?;
    let finite = [x1, y1, x2, y2].iter().all(|v| v.is_finite() && *v >= 0.0);
    (finite && x2 >= x1 && y2 >= y1).then(|| Box2D::new(x1, y1, x2 - x1, y2 - y1))
}

pub fn parse_omni3d(bytes: &[u8]) -> Result<(DatasetManifest, ConversionStats), FormatError> {
    let file: OmniFile = parse_json(bytes)?;
    let mut stats = ConversionStats::default();

    let mut images = Vec::with_capacity(file.images.len());
    let mut image_ids = HashSet::new();
    for (i, im) in file.images.iter().enumerate() {
        let at = format!("/images/{i}");
        let id = im.id.text();
        if !image_ids.insert(id.clone()) {
            return Err(FormatError::new(format!("{at}/id"), format!("duplicate image id {id:?}")));
        }
        let k = CameraIntrinsics::new(im.k[0][0], im.k[1][1], im.k[0][2], im.k[1][2])
            .map_err(|e| FormatError::new(format!("{at}/K"), e.to_string()))?;
        if im.width == 0 || im.height == 0 {
            return Err(FormatError::new(at, "width and height must be positive"));
        }
        images.push(ImageInfo {
            id,
            width: im.width,
            height: im.height,
            intrinsics: k,
        });
    }
    stats.images = images.len();

    let mut names: BTreeMap<Id, String> = BTreeMap::new();
    let mut categories = Vec::new();
    for (i, c) in file.categories.iter().enumerate() {
        if c.name.is_empty() {
            return Err(FormatError::new(format!("/categories/{i}/name"), "category name must be non-empty"));
        }
        if names.insert(c.id.clone(), c.name.clone()).is_some() {
            return Err(FormatError::new(format!("/categories/{i}/id"), "duplicate category id"));
        }
        if !categories.contains(&c.name) {
            categories.push(c.name.clone());
        }
    }

    let mut annotations = Vec::new();
    for (i, a) in file.annotations.iter().enumerate() {
        let image_id = a.image_id.text();
        if !image_ids.contains(&image_id) {
            return Err(FormatError::new(
                format!("/annotations/{i}/image_id"),
                format!("unknown image id {image_id:?}"),
            ));
        }
        let Some(category) = names.get(&a.category_id) else {
            stats.skipped += 1;
            continue;
        };
        let Some(box2d) = usable_box(&a.bbox2d_tight).or_else(|| usable_box(&a.bbox2d_proj)) else {
            stats.skipped += 1;
            continue;
        };
        let rot: [f64; 9] = std::array::from_fn(|k| a.r_cam[k / 3][k % 3]);
        let cuboid = decode_rotation(&rot).ok().and_then(|r| {
            if a.center_cam.iter().any(|v| !v.is_finite()) {
                return None;
            }
            Cuboid3D::new(Vector3::from(a.center_cam), Vector3::from(a.dimensions), r).ok()
        });
        let Some(cuboid) = cuboid else {
            stats.skipped += 1;
            continue;
        };
        let ignore = !a.valid3d || a.behind_camera || a.ignore;
        stats.ignored += ignore as usize;
        annotations.push(GroundTruthRecord {
            image_id,
            category: category.clone(),
            box2d,
            cuboid,
            ignore,
        });
    }
    stats.annotations = annotations.len();

    Ok((
        DatasetManifest {
            version: MANIFEST_VERSION.to_string(),
            images,
            categories,
            annotations,
        },
        stats,
    ))
}

pub fn convert_omni3d(
    input: &std::path::Path,
) -> Result<(DatasetManifest, ConversionStats), super::IoError> {
    let bytes = super::read_file(input)?;
    parse_omni3d(&bytes).map_err(|e| e.in_file(input).into())
}
