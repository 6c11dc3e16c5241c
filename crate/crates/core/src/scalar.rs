//! Scalar abstraction shared by the geometry, lifting and metric code.

use nalgebra::RealField;
use num_traits::ToPrimitive;

/// Floating point scalar the toolkit is generic over: `f32` or `f64`.
///
/// Everything numeric goes through nalgebra's [`RealField`]; `ToPrimitive`
/// is only used to report values as `f64`.
pub trait Real: RealField + Copy + ToPrimitive + Default {
    /// Absolute tolerance for structural checks (orthonormality, plane
    /// side tests, containment). Scaled to the precision of the type.
    const TOLERANCE: f64;

    #[inline]
    fn lit(v: f64) -> Self {
        nalgebra::convert(v)
    }

    #[inline]
    fn tol() -> Self {
        Self::lit(Self::TOLERANCE)
    }

    #[inline]
    fn to_f64_lossy(self) -> f64 {
        ToPrimitive::to_f64(&self).unwrap_or(f64::NAN)
    }
}

impl Real for f64 {
    const TOLERANCE: f64 = 1e-9;
}

impl Real for f32 {
    const TOLERANCE: f64 = 1e-5;
}
