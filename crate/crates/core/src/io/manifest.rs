use std::collections::{HashMap, HashSet};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::codec::{box_from_json, box_to_json, parse_json, to_pretty_json, CuboidJson};
use super::{read_file, write_file, IoError};
use crate::error::FormatError;
use crate::eval::{GroundTruthRecord, ImageInfo};
use crate::lifting::CameraIntrinsics;

pub const MANIFEST_VERSION: &str = "1.0";

/// A validated dataset: images with intrinsics, the category vocabulary and
/// the ground-truth annotations.
#[derive(Clone, Debug, PartialEq)]
pub struct DatasetManifest {
    pub version: String,
    pub images: Vec<ImageInfo<f64>>,
    pub categories: Vec<String>,
    pub annotations: Vec<GroundTruthRecord<f64>>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ManifestFile {
    version: String,
    images: Vec<ImageJson>,
    categories: Vec<String>,
    annotations: Vec<AnnotationJson>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ImageJson {
    id: String,
    width: u32,
    height: u32,
    intrinsics: CameraIntrinsics<f64>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct AnnotationJson {
    image_id: String,
    category: String,
    box2d: [f64; 4],
    cuboid: CuboidJson,
    #[serde(default)]
    ignore: bool,
}

pub(crate) fn check_version(version: &str, expected: &str) -> Result<(), FormatError> {
    let major = |s: &str| s.split('.').next().unwrap_or("").to_string();
    if major(version) != major(expected) {
        return Err(FormatError::new(
            "/version",
            format!("unsupported version {version:?}, expected {expected}"),
        ));
    }
    Ok(())
}

pub fn parse_manifest(bytes: &[u8]) -> Result<DatasetManifest, FormatError> {
    let file: ManifestFile = parse_json(bytes)?;
    check_version(&file.version, MANIFEST_VERSION)?;

    let mut images = Vec::with_capacity(file.images.len());
    let mut ids = HashSet::new();
    for (i, im) in file.images.into_iter().enumerate() {
        let at = format!("/images/{i}");
        if im.id.is_empty() {
            return Err(FormatError::new(format!("{at}/id"), "image id must be non-empty"));
        }
        if !ids.insert(im.id.clone()) {
            return Err(FormatError::new(format!("{at}/id"), format!("duplicate image id {:?}", im.id)));
        }
        if im.width == 0 || im.height == 0 {
            return Err(FormatError::new(at, "width and height must be positive"));
        }
        im.intrinsics
            .validate()
            .map_err(|e| FormatError::new(format!("{at}/intrinsics"), e.to_string()))?;
        images.push(ImageInfo {
            id: im.id,
            width: im.width,
            height: im.height,
            intrinsics: im.intrinsics,
        });
    }

    let mut cats = HashSet::new();
    for (i, c) in file.categories.iter().enumerate() {
        if c.is_empty() {
            return Err(FormatError::new(format!("/categories/{i}"), "category must be non-empty"));
        }
        if !cats.insert(c.as_str()) {
            return Err(FormatError::new(format!("/categories/{i}"), format!("duplicate category {c:?}")));
        }
    }

    let mut annotations = Vec::with_capacity(file.annotations.len());
    for (i, a) in file.annotations.into_iter().enumerate() {
        let at = format!("/annotations/{i}");
        if !ids.contains(&a.image_id) {
            return Err(FormatError::new(
                format!("{at}/image_id"),
                format!("unknown image id {:?}", a.image_id),
            ));
        }
        if !cats.contains(a.category.as_str()) {
            return Err(FormatError::new(
                format!("{at}/category"),
                format!("category {:?} is not listed in /categories", a.category),
            ));
        }
        annotations.push(GroundTruthRecord {
            box2d: box_from_json(&a.box2d, &format!("{at}/box2d"))?,
            cuboid: a.cuboid.to_cuboid(&format!("{at}/cuboid"))?,
            image_id: a.image_id,
            category: a.category,
            ignore: a.ignore,
        });
    }

    Ok(DatasetManifest {
        version: file.version,
        images,
        categories: file.categories,
        annotations,
    })
}

pub fn load_manifest(path: &Path) -> Result<DatasetManifest, IoError> {
    let bytes = read_file(path)?;
    parse_manifest(&bytes).map_err(|e| e.in_file(path).into())
}

impl DatasetManifest {
    pub fn to_json(&self) -> Vec<u8> {
        let file = ManifestFile {
            version: self.version.clone(),
            images: self
                .images
                .iter()
                .map(|im| ImageJson {
                    id: im.id.clone(),
                    width: im.width,
                    height: im.height,
                    intrinsics: im.intrinsics,
                })
                .collect(),
            categories: self.categories.clone(),
            annotations: self
                .annotations
                .iter()
                .map(|a| AnnotationJson {
                    image_id: a.image_id.clone(),
                    category: a.category.clone(),
                    box2d: box_to_json(&a.box2d),
                    cuboid: CuboidJson::from_cuboid(&a.cuboid),
                    ignore: a.ignore,
                })
                .collect(),
        };
        to_pretty_json(&file)
    }

    pub fn image(&self, id: &str) -> Option<&ImageInfo<f64>> {
        self.images.iter().find(|im| im.id == id)
    }

    pub fn image_index(&self) -> HashMap<&str, &ImageInfo<f64>> {
        self.images.iter().map(|im| (im.id.as_str(), im)).collect()
    }
}

pub fn save_manifest(manifest: &DatasetManifest, path: &Path) -> Result<(), IoError> {
    write_file(path, &manifest.to_json())
}
