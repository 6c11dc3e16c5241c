use nalgebra::{Matrix3, Vector3};
use serde::{Deserialize, Serialize};

use super::LiftError;
use crate::scalar::Real;

/// Pinhole intrinsics in pixels. Pixel `(u, v)` is column `u`, row `v`,
/// with integer coordinates at pixel centers.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CameraIntrinsics<T: Real> {
    pub fx: T,
    pub fy: T,
    pub cx: T,
    pub cy: T,
}

impl<T: Real> CameraIntrinsics<T> {
    pub fn new(fx: T, fy: T, cx: T, cy: T) -> Result<Self, LiftError> {
        let k = Self { fx, fy, cx, cy };
        k.validate()?;
        Ok(k)
    }

    pub fn validate(&self) -> Result<(), LiftError> {
        let finite = [self.fx, self.fy, self.cx, self.cy].iter().all(|v| v.is_finite());
        if !finite || self.fx <= T::zero() || self.fy <= T::zero() {
            return Err(LiftError::InvalidIntrinsics);
        }
        Ok(())
    }

    pub fn matrix(&self) -> Matrix3<T> {
        let (z, o) = (T::zero(), T::one());
        Matrix3::new(self.fx, z, self.cx, z, self.fy, self.cy, z, z, o)
    }

    /// Camera-frame point at depth `z` seen through pixel `(u, v)`:
    /// `z · K⁻¹ · [u v 1]ᵀ`.
    #[inline]
    pub fn unproject_pixel(&self, u: T, v: T, z: T) -> Vector3<T> {
        Vector3::new((u - self.cx) * z / self.fx, (v - self.cy) * z / self.fy, z)
    }

    /// Pixel coordinates of a camera-frame point, or `None` when the point
    /// does not lie in front of the camera.
    #[inline]
    pub fn project(&self, p: &Vector3<T>) -> Option<(T, T)> {
        if p.z <= T::tol() {
            return None;
        }
        Some((self.fx * p.x / p.z + self.cx, self.fy * p.y / p.z + self.cy))
    }
}

/// Row-major metric depth image. Non-positive or non-finite entries are
/// invalid.
#[derive(Clone, Debug, PartialEq)]
pub struct DepthMap<T: Real> {
    width: usize,
    height: usize,
    data: Vec<T>,
}

impl<T: Real> DepthMap<T> {
    pub fn new(width: usize, height: usize, data: Vec<T>) -> Result<Self, LiftError> {
        if width.checked_mul(height) != Some(data.len()) {
            return Err(LiftError::DimensionMismatch {
                expected: (width, height),
                got: data.len(),
            });
        }
        Ok(Self { width, height, data })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn data(&self) -> &[T] {
        &self.data
    }

    #[inline]
    pub fn get(&self, u: usize, v: usize) -> T {
        self.data[v * self.width + u]
    }

    /// Depth at `(u, v)` if it is usable.
    #[inline]
    pub fn valid(&self, u: usize, v: usize) -> Option<T> {
        let d = self.get(u, v);
        (d.is_finite() && d > T::zero()).then_some(d)
    }
}

/// Row-major binary foreground mask.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InstanceMask {
    width: usize,
    height: usize,
    data: Vec<bool>,
}

impl InstanceMask {
    pub fn new(width: usize, height: usize, data: Vec<bool>) -> Result<Self, LiftError> {
        if width.checked_mul(height) != Some(data.len()) {
            return Err(LiftError::DimensionMismatch {
                expected: (width, height),
                got: data.len(),
            });
        }
        Ok(Self { width, height, data })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn data(&self) -> &[bool] {
        &self.data
    }

    #[inline]
    pub fn get(&self, u: usize, v: usize) -> bool {
        self.data[v * self.width + u]
    }

    pub fn count(&self) -> usize {
        self.data.iter().filter(|&&b| b).count()
    }
}

/// Camera-frame points in meters.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct PointCloud<T: Real> {
    pub points: Vec<Vector3<T>>,
}

impl<T: Real> PointCloud<T> {
    pub fn new(points: Vec<Vector3<T>>) -> Self {
        Self { points }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn centroid(&self) -> Option<Vector3<T>> {
        if self.points.is_empty() {
            return None;
        }
        let sum = self.points.iter().fold(Vector3::zeros(), |acc, p| acc + p);
        Some(sum / T::lit(self.points.len() as f64))
    }

    /// Every `stride`-th point such that at most `max_points` remain.
    pub fn strided(&self, max_points: usize) -> Self {
        if max_points == 0 || self.points.len() <= max_points {
            return self.clone();
        }
        let stride = self.points.len().div_ceil(max_points);
        Self::new(self.points.iter().step_by(stride).copied().collect())
    }
}

/// One point per masked pixel with valid depth, in row-major pixel order.
pub fn unproject<T: Real>(
    depth: &DepthMap<T>,
    mask: &InstanceMask,
    k: &CameraIntrinsics<T>,
) -> Result<PointCloud<T>, LiftError> {
    if depth.width != mask.width || depth.height != mask.height {
        return Err(LiftError::DimensionMismatch {
            expected: (depth.width, depth.height),
            got: mask.data.len(),
        });
    }
    k.validate()?;
    let mut points = Vec::new();
    for v in 0..depth.height {
        for u in 0..depth.width {
            if !mask.get(u, v) {
                continue;
            }
            if let Some(d) = depth.valid(u, v) {
                points.push(k.unproject_pixel(T::lit(u as f64), T::lit(v as f64), d));
            }
        }
    }
    if points.is_empty() {
        return Err(LiftError::EmptyCloud);
    }
    Ok(PointCloud::new(points))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn k() -> CameraIntrinsics<f64> {
        CameraIntrinsics::new(500.0, 480.0, 2.0, 1.0).unwrap()
    }

    #[test]
    fn principal_point_maps_to_axis() {
        let p = k().unproject_pixel(2.0, 1.0, 1.0);
        assert_eq!(p, Vector3::new(0.0, 0.0, 1.0));
    }

    #[test]
    fn unit_tangent_pixel() {
        let k = k();
        let p = k.unproject_pixel(k.cx + k.fx, k.cy, 2.0);
        assert_eq!(p, Vector3::new(2.0, 0.0, 2.0));
    }

    #[test]
    fn skips_unmasked_and_invalid_depth() {
        let depth = DepthMap::new(3, 2, vec![1.0, f64::NAN, 2.0, -1.0, 0.0, 3.0]).unwrap();
        let mask = InstanceMask::new(3, 2, vec![true, true, false, true, true, true]).unwrap();
        let pc = unproject(&depth, &mask, &k()).unwrap();
        assert_eq!(pc.len(), 2);
        assert_eq!(pc.points[0].z, 1.0);
        assert_eq!(pc.points[1].z, 3.0);
    }

    #[test]
    fn all_invalid_depth_is_empty_cloud() {
        let depth = DepthMap::new(2, 1, vec![0.0, f64::INFINITY]).unwrap();
        let mask = InstanceMask::new(2, 1, vec![true, true]).unwrap();
        assert_eq!(unproject(&depth, &mask, &k()), Err(LiftError::EmptyCloud));
    }

    #[test]
    fn mismatched_sizes_rejected() {
        let depth = DepthMap::new(2, 1, vec![1.0, 1.0]).unwrap();
        let mask = InstanceMask::new(1, 2, vec![true, true]).unwrap();
        assert!(matches!(
            unproject(&depth, &mask, &k()),
            Err(LiftError::DimensionMismatch { .. })
        ));
        assert!(DepthMap::new(2, 2, vec![1.0f64; 3]).is_err());
    }

    #[test]
    fn invalid_intrinsics() {
        assert!(CameraIntrinsics::new(0.0, 1.0, 0.0, 0.0).is_err());
        assert!(CameraIntrinsics::new(1.0, f64::NAN, 0.0, 0.0).is_err());
    }

    #[test]
    fn stride_caps_point_count() {
        let pc = PointCloud::new((0..10).map(|i| Vector3::new(i as f64, 0.0, 1.0)).collect());
        let s = pc.strided(4);
        assert_eq!(s.len(), 4);
        assert_eq!(s.points[1].x, 3.0);
        assert_eq!(pc.strided(20).len(), 10);
    }

    proptest! {
        #[test]
        fn reprojection_round_trip(
            fx in 100.0f64..2000.0, fy in 100.0f64..2000.0,
            cx in 0.0f64..640.0, cy in 0.0f64..480.0,
            u in 0usize..640, v in 0usize..480, d in 0.1f64..80.0,
        ) {
            let k = CameraIntrinsics::new(fx, fy, cx, cy).unwrap();
            let p = k.unproject_pixel(u as f64, v as f64, d);
            let (pu, pv) = k.project(&p).unwrap();
            prop_assert!((pu - u as f64).abs() < 1e-6);
            prop_assert!((pv - v as f64).abs() < 1e-6);
            prop_assert!((p.z - d).abs() < 1e-12);
        }
    }
}
