//! Synthetic depth rendering of cuboids, for self-tests and fixtures.

use std::path::Path;

use mono3d_core::eval::{GroundTruthRecord, ImageInfo};
use mono3d_core::geometry::{Box2D, Cuboid3D};
use mono3d_core::io::{save_depth, save_manifest, save_mask, DatasetManifest, IoError, MANIFEST_VERSION};
use mono3d_core::lifting::{CameraIntrinsics, DepthMap, InstanceMask};
use nalgebra::Vector3;

use crate::commands::{Detection2D, DetectionsFile};

/// Ray-casts `c` through every pixel center. Hit pixels get the depth `z`
/// of the first surface point and a set mask bit; the rest get depth 0.
pub fn render_cuboid(c: &Cuboid3D<f64>, k: &CameraIntrinsics<f64>, width: usize, height: usize) -> (DepthMap<f64>, InstanceMask) {
    let rt = c.rotation().transpose();
    let origin = &rt * (-c.center());
    let half = c.dims() * 0.5;
    let mut depth = vec![0.0; width * height];
    let mut mask = vec![false; width * height];
    for v in 0..height {
        for u in 0..width {
            // ray p(t) = t * dir with dir.z = 1, so t is the depth
            let dir = Vector3::new((u as f64 - k.cx) / k.fx, (v as f64 - k.cy) / k.fy, 1.0);
            let d = &rt * dir;
            let (mut t0, mut t1) = (f64::NEG_INFINITY, f64::INFINITY);
            for a in 0..3 {
                if d[a].abs() < 1e-15 {
                    if origin[a].abs() > half[a] {
                        t0 = f64::INFINITY;
                    }
                    continue;
                }
                let (ta, tb) = ((-half[a] - origin[a]) / d[a], (half[a] - origin[a]) / d[a]);
                t0 = t0.max(ta.min(tb));
                t1 = t1.min(ta.max(tb));
            }
            if t0 <= t1 && t0 > 0.0 {
                depth[v * width + u] = t0;
                mask[v * width + u] = true;
            }
        }
    }
    (
        DepthMap::new(width, height, depth).expect("sized buffer"),
        InstanceMask::new(width, height, mask).expect("sized buffer"),
    )
}

/// Writes a lift-ready scene to `dir`, one image per cuboid: `img{i}.ovd`,
/// `img{i}_0.pgm`, a `manifest.json` annotating each cuboid as `category`
/// and a `detections.json` with one detection per image.
pub fn write_scene(
    dir: &Path,
    cuboids: &[Cuboid3D<f64>],
    category: &str,
    k: &CameraIntrinsics<f64>,
    width: usize,
    height: usize,
) -> Result<(), IoError> {
    let mut detections = Vec::new();
    let mut annotations = Vec::new();
    let mut images = Vec::new();
    for (i, c) in cuboids.iter().enumerate() {
        let id = format!("img{i}");
        let (depth, mask) = render_cuboid(c, k, width, height);
        save_depth(&depth, &dir.join(format!("{id}.ovd")))?;
        save_mask(&mask, &dir.join(format!("{id}_0.pgm")))?;
        let b = Box2D::bounding(c.corners().iter().filter_map(|p| k.project(p)))
            .unwrap_or(Box2D::new(0.0, 0.0, 0.0, 0.0))
            .clamp_to(width as f64, height as f64);
        detections.push(Detection2D {
            image_id: id.clone(),
            category: category.to_string(),
            score: 1.0 - 0.5 * i as f64 / cuboids.len() as f64,
            box2d: Some([b.x, b.y, b.w, b.h]),
            mask: format!("{id}_0.pgm"),
            depth: None,
        });
        annotations.push(GroundTruthRecord {
            image_id: id.clone(),
            category: category.to_string(),
            box2d: b,
            cuboid: *c,
            ignore: false,
        });
        images.push(ImageInfo {
            id,
            width: width as u32,
            height: height as u32,
            intrinsics: *k,
        });
    }
    let manifest = DatasetManifest {
        version: MANIFEST_VERSION.to_string(),
        images,
        categories: vec![category.to_string()],
        annotations,
    };
    save_manifest(&manifest, &dir.join("manifest.json"))?;
    let file = DetectionsFile {
        version: "1.0".into(),
        detections,
    };
    let mut json = serde_json::to_vec_pretty(&file).expect("in-memory JSON serialization");
    json.push(b'\n');
    std::fs::write(dir.join("detections.json"), json).map_err(|e| IoError::io(&dir.join("detections.json"), e))
}
