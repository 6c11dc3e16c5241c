//! Oriented cuboids, rotations, 3D IoU and corner-set distances.

mod cuboid;
mod iou;
mod rect;
mod rotation;

pub use cuboid::{
    chamfer_corner_distance, corner_sign, cuboid_corners, cuboid_volume, CornerSet, Cuboid3D,
};
pub use iou::{intersection_volume, iou3d};
pub use rect::Box2D;
pub use rotation::{
    allocentric_to_egocentric, egocentric_to_allocentric, orthonormality_error, rotation_from_6d,
    rotation_to_6d, viewing_rotation, Rotation6D, RotationMatrix,
};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeometryError {
    #[error("degenerate 6D rotation: the two vectors are zero or parallel")]
    DegenerateRotation,
    #[error("degenerate viewing ray: point lies at the camera center or behind the image plane")]
    DegenerateRay,
    #[error("matrix is not a proper rotation (orthonormality error {orthonormality:.3e}, det {det:.6})")]
    NotARotation { orthonormality: f64, det: f64 },
    #[error("cuboid dimensions must be finite and strictly positive, got {0:?}")]
    InvalidDims([f64; 3]),
    #[error("non-finite value in {0}")]
    NonFinite(&'static str),
}
