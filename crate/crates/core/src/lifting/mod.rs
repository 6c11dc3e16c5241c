//! Training-free lifting of a 2D detection to a 3D box: unproject the
//! masked depth pixels, drop outliers with DBSCAN, fit a PCA box.

mod camera;
mod dbscan;
mod pca;

pub use camera::{unproject, CameraIntrinsics, DepthMap, InstanceMask, PointCloud};
pub use dbscan::{dbscan, median_nn_distance, select_primary_cluster, Clustering, Label};
pub use pca::{fit_obb_pca, principal_axes, FLAT_THICKNESS, MIN_EXTENT};

use thiserror::Error;

use crate::geometry::Cuboid3D;
use crate::scalar::Real;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LiftError {
    #[error("no masked pixel has a valid depth")]
    EmptyCloud,
    #[error("every point was classified as noise")]
    AllNoise,
    #[error("point cloud spans fewer than two dimensions")]
    DegenerateCloud,
    #[error("primary cluster has {got} points, fewer than the required {need}")]
    TooFewPoints { got: usize, need: usize },
    #[error("size mismatch: expected {expected:?} (width, height), got {got} values")]
    DimensionMismatch { expected: (usize, usize), got: usize },
    #[error("camera intrinsics need finite values and positive focal lengths")]
    InvalidIntrinsics,
    #[error("invalid parameters: {0}")]
    InvalidParams(&'static str),
}

impl LiftError {
    /// Short machine-readable reason, used when recording failed lifts.
    pub fn code(&self) -> &'static str {
        match self {
            LiftError::EmptyCloud => "empty_cloud",
            LiftError::AllNoise => "all_noise",
            LiftError::DegenerateCloud => "degenerate_cloud",
            LiftError::TooFewPoints { .. } => "too_few_points",
            LiftError::DimensionMismatch { .. } => "dimension_mismatch",
            LiftError::InvalidIntrinsics => "invalid_intrinsics",
            LiftError::InvalidParams(_) => "invalid_params",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LiftParams<T: Real> {
    /// Neighbourhood radius in meters. Ignored when `adaptive_eps` is set.
    pub dbscan_eps: T,
    pub dbscan_min_pts: usize,
    /// Use twice the median nearest-neighbour spacing of the cloud as eps.
    pub adaptive_eps: bool,
    /// Minimum size of the kept cluster for a fit to be attempted.
    pub min_points: usize,
    /// Clouds larger than this are strided down before clustering.
    pub max_points: usize,
}

impl<T: Real> Default for LiftParams<T> {
    fn default() -> Self {
        Self {
            dbscan_eps: T::lit(0.05),
            dbscan_min_pts: 10,
            adaptive_eps: false,
            min_points: 10,
            max_points: 20_000,
        }
    }
}

impl<T: Real> LiftParams<T> {
    pub fn validate(&self) -> Result<(), LiftError> {
        if !(self.dbscan_eps.is_finite() && self.dbscan_eps > T::zero()) {
            return Err(LiftError::InvalidParams("dbscan_eps must be > 0"));
        }
        if self.dbscan_min_pts < 1 {
            return Err(LiftError::InvalidParams("dbscan_min_pts must be >= 1"));
        }
        if self.min_points < 4 {
            return Err(LiftError::InvalidParams("min_points must be >= 4"));
        }
        if self.max_points < self.min_points {
            return Err(LiftError::InvalidParams("max_points must be >= min_points"));
        }
        Ok(())
    }
}

/// Intermediate products of one lift, kept for diagnostics.
#[derive(Clone, Debug)]
pub struct LiftOutcome<T: Real> {
    pub cuboid: Cuboid3D<T>,
    pub eps: T,
    pub unprojected: usize,
    pub clustered: usize,
    pub kept: usize,
}

/// unproject → stride to `max_points` → DBSCAN → largest cluster → PCA box.
pub fn lift_detection<T: Real>(
    depth: &DepthMap<T>,
    mask: &InstanceMask,
    k: &CameraIntrinsics<T>,
    params: &LiftParams<T>,
) -> Result<Cuboid3D<T>, LiftError> {
    lift_detection_detailed(depth, mask, k, params).map(|o| o.cuboid)
}

pub fn lift_detection_detailed<T: Real>(
    depth: &DepthMap<T>,
    mask: &InstanceMask,
    k: &CameraIntrinsics<T>,
    params: &LiftParams<T>,
) -> Result<LiftOutcome<T>, LiftError> {
    params.validate()?;
    let full = unproject(depth, mask, k)?;
    let cloud = full.strided(params.max_points);
    let eps = if params.adaptive_eps {
        median_nn_distance(&cloud)
            .map(|m| m * T::lit(2.0))
            .filter(|e| *e > T::zero())
            .unwrap_or(params.dbscan_eps)
    } else {
        params.dbscan_eps
    };
    let clustering = dbscan(&cloud, eps, params.dbscan_min_pts)?;
    let primary = select_primary_cluster(&clustering, &cloud)?;
    if primary.len() < params.min_points {
        return Err(LiftError::TooFewPoints {
            got: primary.len(),
            need: params.min_points,
        });
    }
    let cuboid = fit_obb_pca(&primary)?;
    Ok(LiftOutcome {
        cuboid,
        eps,
        unprojected: full.len(),
        clustered: cloud.len(),
        kept: primary.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn k() -> CameraIntrinsics<f64> {
        CameraIntrinsics::new(100.0, 100.0, 20.0, 15.0).unwrap()
    }

    #[test]
    fn fronto_parallel_plane() {
        let (w, h) = (40, 30);
        let depth = DepthMap::new(w, h, vec![2.0; w * h]).unwrap();
        let mask = InstanceMask::new(w, h, vec![true; w * h]).unwrap();
        let params = LiftParams { dbscan_eps: 0.05, ..Default::default() };
        let c = lift_detection(&depth, &mask, &k(), &params).unwrap();
        assert!(c.center().z >= 2.0 - 1e-9 && c.center().z <= 2.0 + 1e-3);
        let thin = c.dims().iter().filter(|d| (**d - FLAT_THICKNESS).abs() < 1e-12).count();
        assert_eq!(thin, 1);
        // 40 x 30 pixels at 2 m with f = 100 px: 0.78 m x 0.58 m
        let mut d: Vec<f64> = c.dims().iter().copied().collect();
        d.sort_by(|a, b| b.partial_cmp(a).unwrap());
        assert!((d[0] - 0.78).abs() < 1e-9 && (d[1] - 0.58).abs() < 1e-9);
    }

    #[test]
    fn all_invalid_depth() {
        let depth = DepthMap::new(4, 4, vec![f64::NAN; 16]).unwrap();
        let mask = InstanceMask::new(4, 4, vec![true; 16]).unwrap();
        assert_eq!(
            lift_detection(&depth, &mask, &k(), &LiftParams::default()),
            Err(LiftError::EmptyCloud)
        );
    }

    #[test]
    fn sparse_mask_is_all_noise() {
        let (w, h) = (40, 30);
        let depth = DepthMap::new(w, h, vec![2.0; w * h]).unwrap();
        let data = (0..w * h).map(|i| i % 97 == 0).collect();
        let mask = InstanceMask::new(w, h, data).unwrap();
        assert_eq!(
            lift_detection(&depth, &mask, &k(), &LiftParams::default()),
            Err(LiftError::AllNoise)
        );
    }

    #[test]
    fn params_are_validated() {
        let bad = LiftParams::<f64> { min_points: 3, ..Default::default() };
        assert!(bad.validate().is_err());
        let bad = LiftParams::<f64> { dbscan_eps: -1.0, ..Default::default() };
        assert!(bad.validate().is_err());
        assert!(LiftParams::<f64>::default().validate().is_ok());
    }

    #[test]
    fn adaptive_eps_tracks_pixel_spacing() {
        let (w, h) = (40, 30);
        let depth = DepthMap::new(w, h, vec![2.0; w * h]).unwrap();
        let mask = InstanceMask::new(w, h, vec![true; w * h]).unwrap();
        let params = LiftParams { adaptive_eps: true, dbscan_eps: 1e-6, dbscan_min_pts: 5, ..Default::default() };
        let out = lift_detection_detailed(&depth, &mask, &k(), &params).unwrap();
        // neighbouring pixels are 2 / 100 = 0.02 m apart
        assert!((out.eps - 0.04).abs() < 1e-12);
        assert_eq!(out.kept, w * h);
    }

    #[test]
    fn striding_keeps_result_deterministic() {
        let (w, h) = (60, 50);
        let depth = DepthMap::new(w, h, (0..w * h).map(|i| 2.0 + (i % w) as f64 * 0.01).collect()).unwrap();
        let mask = InstanceMask::new(w, h, vec![true; w * h]).unwrap();
        let params = LiftParams { max_points: 500, dbscan_eps: 0.2, ..Default::default() };
        let a = lift_detection_detailed(&depth, &mask, &k(), &params).unwrap();
        let b = lift_detection_detailed(&depth, &mask, &k(), &params).unwrap();
        assert!(a.clustered <= 500);
        assert_eq!(a.cuboid, b.cuboid);
    }
}
