use nalgebra::{Matrix3, Vector3};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::FormatError;
use crate::geometry::{Box2D, Cuboid3D, GeometryError, RotationMatrix};

/// Deviation from orthonormality up to which a stored rotation is kept
/// verbatim (so saved files reload bit-exactly).
const ROT_EXACT_TOL: f64 = 1e-9;
/// Deviation up to which a stored rotation is projected onto SO(3).
const ROT_REPAIR_TOL: f64 = 1e-6;

/// Parses `bytes` as JSON into `T`, locating type errors by JSON pointer.
pub fn parse_json<T: DeserializeOwned>(bytes: &[u8]) -> Result<T, FormatError> {
    let de = &mut serde_json::Deserializer::from_slice(bytes);
    let value = serde_path_to_error::deserialize(de).map_err(|e| {
        let pointer = pointer_from_path(e.path());
        FormatError::new(pointer, e.into_inner().to_string())
    })?;
    Ok(value)
}

fn pointer_from_path(path: &serde_path_to_error::Path) -> String {
    use serde_path_to_error::Segment;
    let mut out = String::new();
    for seg in path.iter() {
        match seg {
            Segment::Seq { index } => out.push_str(&format!("/{index}")),
            Segment::Map { key } => {
                out.push('/');
                out.push_str(&key.replace('~', "~0").replace('/', "~1"));
            }
            Segment::Enum { variant } => out.push_str(&format!("/{variant}")),
            Segment::Unknown => out.push_str("/?"),
        }
    }
    out
}

/// On-disk cuboid: center and full extents in meters, rotation as 9
/// row-major entries.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CuboidJson {
    pub center: [f64; 3],
    pub dims: [f64; 3],
    pub rot: [f64; 9],
}

impl CuboidJson {
    pub fn from_cuboid(c: &Cuboid3D<f64>) -> Self {
        let m = c.rotation().matrix();
        let mut rot = [0.0; 9];
        for r in 0..3 {
            for k in 0..3 {
                rot[3 * r + k] = m[(r, k)];
            }
        }
        Self {
            center: [c.center().x, c.center().y, c.center().z],
            dims: [c.dims().x, c.dims().y, c.dims().z],
            rot,
        }
    }

    /// Validates and converts; `at` is the JSON pointer of this object.
    pub fn to_cuboid(&self, at: &str) -> Result<Cuboid3D<f64>, FormatError> {
        let rot = decode_rotation(&self.rot).map_err(|m| FormatError::new(format!("{at}/rot"), m))?;
        if self.center.iter().any(|v| !v.is_finite()) {
            return Err(FormatError::new(format!("{at}/center"), "center must be finite"));
        }
        Cuboid3D::new(Vector3::from(self.center), Vector3::from(self.dims), rot).map_err(|e| {
            let field = match e {
                GeometryError::InvalidDims(_) => "dims",
                _ => "center",
            };
            FormatError::new(format!("{at}/{field}"), e.to_string())
        })
    }
}

/// Row-major 9-vector to a rotation. Matrices within 1e-9 of orthonormal
/// are kept as stored, those within 1e-6 are re-orthonormalized, anything
/// else (including reflections) is rejected.
pub(crate) fn decode_rotation(rot: &[f64; 9]) -> Result<RotationMatrix<f64>, String> {
    if rot.iter().any(|v| !v.is_finite()) {
        return Err("rotation entries must be finite".into());
    }
    let m = Matrix3::from_row_slice(rot);
    let det = m.determinant();
    if det < 0.0 {
        return Err(format!("improper rotation (determinant {det:.6})"));
    }
    if let Ok(r) = RotationMatrix::try_from_matrix_with_tol(m, ROT_EXACT_TOL) {
        return Ok(r);
    }
    match RotationMatrix::try_from_matrix_with_tol(m, ROT_REPAIR_TOL) {
        Ok(_) => RotationMatrix::nearest(m).map_err(|e| e.to_string()),
        Err(e) => Err(format!("not a rotation matrix within {ROT_REPAIR_TOL:e}: {e}")),
    }
}

pub(crate) fn box_to_json(b: &Box2D<f64>) -> [f64; 4] {
    [b.x, b.y, b.w, b.h]
}

pub(crate) fn box_from_json(v: &[f64; 4], at: &str) -> Result<Box2D<f64>, FormatError> {
    if v.iter().any(|x| !x.is_finite()) {
        return Err(FormatError::new(at, "box2d entries must be finite"));
    }
    if v[2] < 0.0 || v[3] < 0.0 {
        return Err(FormatError::new(at, "box2d width and height must be >= 0"));
    }
    Ok(Box2D::new(v[0], v[1], v[2], v[3]))
}

pub(crate) fn to_pretty_json<T: Serialize>(value: &T) -> Vec<u8> {
    let mut out = serde_json::to_vec_pretty(value).expect("in-memory JSON serialization");
    out.push(b'\n');
    out
}
