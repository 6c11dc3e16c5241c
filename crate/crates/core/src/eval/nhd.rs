//! Normalized Hungarian Distance between cuboid corner sets, and its
//! per-attribute breakdown.
//!
//! NHD is the minimum total Euclidean distance over one-to-one assignments
//! of the 8 predicted corners to the 8 ground-truth corners, divided by
//! [`NHD_CORNER_NORMALIZER`] times the ground-truth space diagonal
//! `sqrt(w² + h² + l²)`. The result is unitless and scale-invariant.
//!
//! The disentangled variants replace every attribute group of the
//! prediction except one with ground truth and score the result against
//! ground truth. Groups are the projected center `(u, v)`, the depth `z`,
//! the dimensions and the rotation. Center groups are swapped through the
//! pinhole model, so substituting both reproduces the predicted center.

use serde::{Deserialize, Serialize};

use super::hungarian::hungarian_assign;
use crate::geometry::{Cuboid3D, GeometryError};
use crate::lifting::CameraIntrinsics;
use crate::scalar::Real;

/// Multiplier on the ground-truth diagonal in the NHD denominator (one
/// diagonal per corner).
pub const NHD_CORNER_NORMALIZER: f64 = 8.0;

pub fn nhd<T: Real>(pred: &Cuboid3D<T>, gt: &Cuboid3D<T>) -> T {
    let p = pred.corners();
    let g = gt.corners();
    let cost: Vec<Vec<T>> = p
        .iter()
        .map(|a| g.iter().map(|b| (a - b).norm()).collect())
        .collect();
    let assignment = hungarian_assign(&cost).expect("8x8 corner distances are finite");
    assignment.cost / (T::lit(NHD_CORNER_NORMALIZER) * gt.diagonal())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum VariableGroup {
    /// Projected 2D center `(u, v)`.
    Xy,
    /// Center depth `z`.
    Depth,
    /// Dimensions `(w, h, l)`.
    Size,
    /// Rotation.
    Pose,
}

impl VariableGroup {
    pub const ALL: [VariableGroup; 4] = [Self::Xy, Self::Depth, Self::Size, Self::Pose];
}

/// Ground truth with only `group` taken from the prediction.
pub fn disentangled_box<T: Real>(
    pred: &Cuboid3D<T>,
    gt: &Cuboid3D<T>,
    group: VariableGroup,
    k: &CameraIntrinsics<T>,
) -> Result<Cuboid3D<T>, GeometryError> {
    match group {
        VariableGroup::Xy => {
            let (u, v) = k.project(pred.center()).ok_or(GeometryError::DegenerateRay)?;
            if gt.center().z <= T::tol() {
                return Err(GeometryError::DegenerateRay);
            }
            gt.with_center(k.unproject_pixel(u, v, gt.center().z))
        }
        VariableGroup::Depth => {
            let (u, v) = k.project(gt.center()).ok_or(GeometryError::DegenerateRay)?;
            if pred.center().z <= T::tol() {
                return Err(GeometryError::DegenerateRay);
            }
            gt.with_center(k.unproject_pixel(u, v, pred.center().z))
        }
        VariableGroup::Size => gt.with_dims(*pred.dims()),
        VariableGroup::Pose => Ok(gt.with_rotation(*pred.rotation())),
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct NhdBreakdown<T> {
    pub overall: T,
    pub xy: T,
    pub depth: T,
    pub size: T,
    pub pose: T,
}

impl<T: Real> NhdBreakdown<T> {
    pub fn get(&self, group: VariableGroup) -> T {
        match group {
            VariableGroup::Xy => self.xy,
            VariableGroup::Depth => self.depth,
            VariableGroup::Size => self.size,
            VariableGroup::Pose => self.pose,
        }
    }

    pub fn to_f64(&self) -> NhdBreakdown<f64> {
        NhdBreakdown {
            overall: self.overall.to_f64_lossy(),
            xy: self.xy.to_f64_lossy(),
            depth: self.depth.to_f64_lossy(),
            size: self.size.to_f64_lossy(),
            pose: self.pose.to_f64_lossy(),
        }
    }
}

pub fn disentangled_nhd<T: Real>(
    pred: &Cuboid3D<T>,
    gt: &Cuboid3D<T>,
    k: &CameraIntrinsics<T>,
) -> Result<NhdBreakdown<T>, GeometryError> {
    let part = |g| disentangled_box(pred, gt, g, k).map(|b| nhd(&b, gt));
    Ok(NhdBreakdown {
        overall: nhd(pred, gt),
        xy: part(VariableGroup::Xy)?,
        depth: part(VariableGroup::Depth)?,
        size: part(VariableGroup::Size)?,
        pose: part(VariableGroup::Pose)?,
    })
}

/// Componentwise mean; `None` for an empty slice.
pub fn mean_breakdown(items: &[NhdBreakdown<f64>]) -> Option<NhdBreakdown<f64>> {
    if items.is_empty() {
        return None;
    }
    let n = items.len() as f64;
    let sum = items.iter().fold(NhdBreakdown::<f64>::default(), |acc, b| NhdBreakdown {
        overall: acc.overall + b.overall,
        xy: acc.xy + b.xy,
        depth: acc.depth + b.depth,
        size: acc.size + b.size,
        pose: acc.pose + b.pose,
    });
    Some(NhdBreakdown {
        overall: sum.overall / n,
        xy: sum.xy / n,
        depth: sum.depth / n,
        size: sum.size / n,
        pose: sum.pose / n,
    })
}
