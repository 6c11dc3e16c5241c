use nalgebra::Vector3;

use super::{GeometryError, RotationMatrix};
use crate::scalar::Real;

/// Oriented 3D box in the camera frame (+x right, +y down, +z forward).
///
/// `dims` are full extents `(w, h, l)` along the box's local x, y and z
/// axes, which are the columns of `rot`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Cuboid3D<T: Real> {
    center: Vector3<T>,
    dims: Vector3<T>,
    rot: RotationMatrix<T>,
}

impl<T: Real> Cuboid3D<T> {
    pub fn new(
        center: Vector3<T>,
        dims: Vector3<T>,
        rot: RotationMatrix<T>,
    ) -> Result<Self, GeometryError> {
        if center.iter().any(|v| !v.is_finite()) {
            return Err(GeometryError::NonFinite("cuboid center"));
        }
        if dims.iter().any(|v| !v.is_finite() || *v <= T::zero()) {
            return Err(GeometryError::InvalidDims(dims.map(|v| v.to_f64_lossy()).into()));
        }
        Ok(Self { center, dims, rot })
    }

    /// Identity-rotation box.
    pub fn axis_aligned(center: Vector3<T>, dims: Vector3<T>) -> Result<Self, GeometryError> {
        Self::new(center, dims, RotationMatrix::identity())
    }

    pub fn center(&self) -> &Vector3<T> {
        &self.center
    }

    pub fn dims(&self) -> &Vector3<T> {
        &self.dims
    }

    pub fn rotation(&self) -> &RotationMatrix<T> {
        &self.rot
    }

    pub fn with_center(mut self, center: Vector3<T>) -> Result<Self, GeometryError> {
        if center.iter().any(|v| !v.is_finite()) {
            return Err(GeometryError::NonFinite("cuboid center"));
        }
        self.center = center;
        Ok(self)
    }

    pub fn with_dims(self, dims: Vector3<T>) -> Result<Self, GeometryError> {
        Self::new(self.center, dims, self.rot)
    }

    pub fn with_rotation(mut self, rot: RotationMatrix<T>) -> Self {
        self.rot = rot;
        self
    }

    pub fn volume(&self) -> T {
        cuboid_volume(self)
    }

    pub fn corners(&self) -> CornerSet<T> {
        cuboid_corners(self)
    }

    /// Length of the space diagonal, `sqrt(w² + h² + l²)`.
    pub fn diagonal(&self) -> T {
        self.dims.norm()
    }

    /// Point expressed in the box's local frame (origin at the center).
    pub fn to_local(&self, p: &Vector3<T>) -> Vector3<T> {
        self.rot.matrix().tr_mul(&(p - self.center))
    }

    /// Whether `p` lies inside the box grown by `inflate` on every side.
    pub fn contains(&self, p: &Vector3<T>, inflate: T) -> bool {
        let local = self.to_local(p);
        let half = T::lit(0.5);
        (0..3).all(|i| local[i].abs() <= self.dims[i] * half + inflate)
    }

    /// Applies the rigid transform `x ↦ R·x + t` to the box.
    pub fn transformed(&self, r: &RotationMatrix<T>, t: &Vector3<T>) -> Self {
        Self {
            center: r * self.center + t,
            dims: self.dims,
            rot: *r * self.rot,
        }
    }
}

/// The 8 corners of a cuboid in canonical order.
///
/// Corner `i` takes the local offset `(±w/2, ±h/2, ±l/2)` where bit 2 of `i`
/// selects the sign of x, bit 1 the sign of y and bit 0 the sign of z
/// (bit clear = negative). Corner 0 is `(-,-,-)`, corner 7 is `(+,+,+)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CornerSet<T: Real>(pub [Vector3<T>; 8]);

impl<T: Real> CornerSet<T> {
    pub fn centroid(&self) -> Vector3<T> {
        self.0.iter().fold(Vector3::zeros(), |acc, p| acc + p) / T::lit(8.0)
    }

    pub fn iter(&self) -> impl Iterator<Item = &Vector3<T>> {
        self.0.iter()
    }
}

/// Sign (`-1` or `+1`) of local axis `axis` for canonical corner `index`.
#[inline]
pub fn corner_sign(index: usize, axis: usize) -> i8 {
    if index >> (2 - axis) & 1 == 1 {
        1
    } else {
        -1
    }
}

pub fn cuboid_corners<T: Real>(c: &Cuboid3D<T>) -> CornerSet<T> {
    let half = c.dims * T::lit(0.5);
    let corners = std::array::from_fn(|i| {
        let local = Vector3::from_fn(|axis, _| half[axis] * T::lit(corner_sign(i, axis) as f64));
        c.rot.matrix() * local + c.center
    });
    CornerSet(corners)
}

pub fn cuboid_volume<T: Real>(c: &Cuboid3D<T>) -> T {
    c.dims.x * c.dims.y * c.dims.z
}

/// Symmetric Chamfer distance: mean nearest-neighbour distance from `a`
/// into `b` plus the same from `b` into `a`.
pub fn chamfer_corner_distance<T: Real>(a: &CornerSet<T>, b: &CornerSet<T>) -> T {
    directed_mean_nn(a, b) + directed_mean_nn(b, a)
}

fn directed_mean_nn<T: Real>(from: &CornerSet<T>, into: &CornerSet<T>) -> T {
    let total = from.iter().fold(T::zero(), |acc, p| {
        let nearest = into
            .iter()
            .map(|q| (p - q).norm())
            .fold(T::max_value().unwrap_or_else(T::one), |m, d| m.min(d));
        acc + nearest
    });
    total / T::lit(from.0.len() as f64)
}
