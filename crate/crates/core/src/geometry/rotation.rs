//! Rotations: validated 3×3 matrices, the continuous 6D parameterization and
//! allocentric/egocentric conversion.

use std::ops::Mul;

use nalgebra::{Matrix3, Vector3};

use super::GeometryError;
use crate::scalar::Real;

/// Cross-product norm below which the two 6D vectors count as parallel.
const MIN_6D_CROSS: f64 = 1e-12;

/// Proper orthonormal 3×3 matrix (an element of SO(3)).
///
/// Columns are the rotated basis vectors, so `R * v_local = v_camera`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RotationMatrix<T: Real>(Matrix3<T>);

impl<T: Real> RotationMatrix<T> {
    pub fn identity() -> Self {
        Self(Matrix3::identity())
    }

    /// Validates `m` against the orthonormality and determinant invariants
    /// at [`Real::TOLERANCE`].
    pub fn try_from_matrix(m: Matrix3<T>) -> Result<Self, GeometryError> {
        Self::try_from_matrix_with_tol(m, T::tol())
    }

    pub fn try_from_matrix_with_tol(m: Matrix3<T>, tol: T) -> Result<Self, GeometryError> {
        if m.iter().any(|v| !v.is_finite()) {
            return Err(GeometryError::NonFinite("rotation matrix"));
        }
        let err = orthonormality_error(&m);
        let det = m.determinant();
        if err > tol || (det - T::one()).abs() > tol {
            return Err(GeometryError::NotARotation {
                orthonormality: err.to_f64_lossy(),
                det: det.to_f64_lossy(),
            });
        }
        Ok(Self(m))
    }

    /// Projects an approximately orthonormal matrix onto SO(3) (polar
    /// decomposition via SVD). Fails if the nearest orthogonal matrix is a
    /// reflection.
    pub fn nearest(m: Matrix3<T>) -> Result<Self, GeometryError> {
        if m.iter().any(|v| !v.is_finite()) {
            return Err(GeometryError::NonFinite("rotation matrix"));
        }
        let det = m.determinant();
        if det <= T::zero() {
            return Err(GeometryError::NotARotation {
                orthonormality: orthonormality_error(&m).to_f64_lossy(),
                det: det.to_f64_lossy(),
            });
        }
        let svd = m.svd(true, true);
        let (u, v_t) = match (svd.u, svd.v_t) {
            (Some(u), Some(v_t)) => (u, v_t),
            _ => return Err(GeometryError::NonFinite("rotation matrix")),
        };
        Ok(Self(u * v_t))
    }

    /// Rotation of `angle` radians about `axis` (normalized internally).
    pub fn from_axis_angle(axis: &Vector3<T>, angle: T) -> Self {
        let unit = nalgebra::Unit::new_normalize(*axis);
        Self(*nalgebra::Rotation3::from_axis_angle(&unit, angle).matrix())
    }

    pub fn matrix(&self) -> &Matrix3<T> {
        &self.0
    }

    pub fn transpose(&self) -> Self {
        Self(self.0.transpose())
    }

    /// Local basis axis `i` (column `i`) expressed in the parent frame.
    pub fn axis(&self, i: usize) -> Vector3<T> {
        self.0.column(i).into_owned()
    }

    pub fn to_6d(&self) -> Rotation6D<T> {
        rotation_to_6d(self)
    }
}

impl<T: Real> Mul for RotationMatrix<T> {
    type Output = RotationMatrix<T>;

    fn mul(self, rhs: Self) -> Self {
        Self(self.0 * rhs.0)
    }
}

impl<T: Real> Mul<Vector3<T>> for &RotationMatrix<T> {
    type Output = Vector3<T>;

    fn mul(self, rhs: Vector3<T>) -> Vector3<T> {
        self.0 * rhs
    }
}

/// Largest elementwise deviation of `mᵀm` from the identity.
pub fn orthonormality_error<T: Real>(m: &Matrix3<T>) -> T {
    let d = m.transpose() * m - Matrix3::identity();
    d.iter().fold(T::zero(), |acc, v| acc.max(v.abs()))
}

/// Continuous 6D rotation parameterization: the first two columns of a
/// rotation matrix, stacked.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Rotation6D<T: Real>(pub [T; 6]);

impl<T: Real> Rotation6D<T> {
    pub fn new(v: [T; 6]) -> Self {
        Self(v)
    }

    pub fn first(&self) -> Vector3<T> {
        Vector3::new(self.0[0], self.0[1], self.0[2])
    }

    pub fn second(&self) -> Vector3<T> {
        Vector3::new(self.0[3], self.0[4], self.0[5])
    }

    pub fn to_matrix(&self) -> Result<RotationMatrix<T>, GeometryError> {
        rotation_from_6d(self)
    }
}

/// Gram–Schmidt on the two 3-vectors; the third column is their cross
/// product.
pub fn rotation_from_6d<T: Real>(v: &Rotation6D<T>) -> Result<RotationMatrix<T>, GeometryError> {
    let a1 = v.first();
    let a2 = v.second();
    if a1.iter().chain(a2.iter()).any(|x| !x.is_finite()) {
        return Err(GeometryError::NonFinite("6D rotation"));
    }
    let min_cross = T::lit(MIN_6D_CROSS);
    let n1 = a1.norm();
    if n1 <= min_cross {
        return Err(GeometryError::DegenerateRotation);
    }
    let b1 = a1 / n1;
    if b1.cross(&a2).norm() <= min_cross {
        return Err(GeometryError::DegenerateRotation);
    }
    let b2 = (a2 - b1 * b1.dot(&a2)).normalize();
    let b3 = b1.cross(&b2);
    Ok(RotationMatrix(Matrix3::from_columns(&[b1, b2, b3])))
}

pub fn rotation_to_6d<T: Real>(r: &RotationMatrix<T>) -> Rotation6D<T> {
    let m = r.matrix();
    Rotation6D([m[(0, 0)], m[(1, 0)], m[(2, 0)], m[(0, 1)], m[(1, 1)], m[(2, 1)]])
}

/// Minimal rotation taking the optical axis `(0, 0, 1)` onto the ray
/// through `center`.
pub fn viewing_rotation<T: Real>(center: &Vector3<T>) -> Result<RotationMatrix<T>, GeometryError> {
    let norm = center.norm();
    if !norm.is_finite() {
        return Err(GeometryError::NonFinite("center"));
    }
    if norm <= T::tol() {
        return Err(GeometryError::DegenerateRay);
    }
    let ray = center / norm;
    let z = Vector3::z();
    let axis = z.cross(&ray);
    let sin = axis.norm();
    let cos = z.dot(&ray);
    if sin <= T::lit(1e-15) {
        if cos > T::zero() {
            return Ok(RotationMatrix::identity());
        }
        // antiparallel: any half-turn about an axis orthogonal to z
        return Ok(RotationMatrix::from_axis_angle(&Vector3::x(), T::pi()));
    }
    Ok(RotationMatrix::from_axis_angle(&axis, sin.atan2(cos)))
}

/// `R_ego = R_view · R_allo`.
pub fn allocentric_to_egocentric<T: Real>(
    r_allo: &RotationMatrix<T>,
    center: &Vector3<T>,
) -> Result<RotationMatrix<T>, GeometryError> {
    Ok(viewing_rotation(center)? * *r_allo)
}

/// `R_allo = R_viewᵀ · R_ego`.
pub fn egocentric_to_allocentric<T: Real>(
    r_ego: &RotationMatrix<T>,
    center: &Vector3<T>,
) -> Result<RotationMatrix<T>, GeometryError> {
    Ok(viewing_rotation(center)?.transpose() * *r_ego)
}
