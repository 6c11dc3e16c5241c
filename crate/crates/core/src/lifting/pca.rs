use nalgebra::{Matrix3, SymmetricEigen, Vector3};

use super::{LiftError, PointCloud};
use crate::geometry::{Cuboid3D, RotationMatrix};
use crate::scalar::Real;

/// Extent below which an eigen-axis counts as flat.
pub const MIN_EXTENT: f64 = 1e-6;
/// Thickness assigned to a flat axis.
pub const FLAT_THICKNESS: f64 = 1e-3;

/// Principal axes of the cloud, sorted by descending variance, as the
/// columns of a proper rotation.
///
/// Each axis is flipped so that its largest-magnitude component is
/// positive; if that leaves a left-handed frame, the third axis is negated.
pub fn principal_axes<T: Real>(pc: &PointCloud<T>) -> Result<(Vector3<T>, RotationMatrix<T>), LiftError> {
    let mean = pc.centroid().ok_or(LiftError::EmptyCloud)?;
    let mut cov = Matrix3::zeros();
    for p in &pc.points {
        let d = p - mean;
        cov += d * d.transpose();
    }
    cov /= T::lit(pc.len() as f64);
    if cov.iter().any(|v| !v.is_finite()) {
        return Err(LiftError::DegenerateCloud);
    }

    let eig = SymmetricEigen::new(cov);
    let mut order = [0usize, 1, 2];
    order.sort_by(|&a, &b| {
        eig.eigenvalues[b]
            .partial_cmp(&eig.eigenvalues[a])
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(a.cmp(&b))
    });
    let mut axes: [Vector3<T>; 3] = order.map(|i| eig.eigenvectors.column(i).into_owned());
    for axis in &mut axes {
        let mut lead = 0;
        for k in 1..3 {
            if axis[k].abs() > axis[lead].abs() {
                lead = k;
            }
        }
        if axis[lead] < T::zero() {
            *axis = -*axis;
        }
    }
    let mut m = Matrix3::from_columns(&axes);
    if m.determinant() < T::zero() {
        m.set_column(2, &-axes[2]);
    }
    let rot = match RotationMatrix::try_from_matrix(m) {
        Ok(r) => r,
        Err(_) => RotationMatrix::nearest(m).map_err(|_| LiftError::DegenerateCloud)?,
    };
    Ok((mean, rot))
}

/// Oriented box from PCA: axes from the covariance eigenvectors, extents
/// and center from the min/max of the points in that basis. Flat axes
/// (extent under [`MIN_EXTENT`]) get [`FLAT_THICKNESS`]; fewer than two
/// non-flat axes is an error.
pub fn fit_obb_pca<T: Real>(pc: &PointCloud<T>) -> Result<Cuboid3D<T>, LiftError> {
    if pc.is_empty() {
        return Err(LiftError::EmptyCloud);
    }
    if pc.points.iter().any(|p| p.iter().any(|v| !v.is_finite())) {
        return Err(LiftError::DegenerateCloud);
    }
    let (mean, rot) = principal_axes(pc)?;
    let mut lo = Vector3::repeat(T::max_value().unwrap_or_else(T::one));
    let mut hi = -lo;
    for p in &pc.points {
        let q = rot.matrix().tr_mul(&(p - mean));
        lo = lo.inf(&q);
        hi = hi.sup(&q);
    }
    let extent = hi - lo;
    let min_extent = T::lit(MIN_EXTENT);
    let spanned = extent.iter().filter(|&&e| e >= min_extent).count();
    if spanned < 2 {
        return Err(LiftError::DegenerateCloud);
    }
    let dims = extent.map(|e| if e < min_extent { T::lit(FLAT_THICKNESS) } else { e });
    let mid = (lo + hi) * T::lit(0.5);
    let center = mean + rot.matrix() * mid;
    Cuboid3D::new(center, dims, rot).map_err(|_| LiftError::DegenerateCloud)
}
