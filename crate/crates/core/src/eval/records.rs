use crate::geometry::{Box2D, Cuboid3D};
use crate::lifting::CameraIntrinsics;
use crate::scalar::Real;

/// One predicted object.
#[derive(Clone, Debug, PartialEq)]
pub struct DetectionRecord<T: Real> {
    pub image_id: String,
    pub category: String,
    pub score: T,
    pub box2d: Box2D<T>,
    pub cuboid: Cuboid3D<T>,
}

/// One annotated object. `ignore` marks regions that may absorb detections
/// without counting toward recall or precision.
#[derive(Clone, Debug, PartialEq)]
pub struct GroundTruthRecord<T: Real> {
    pub image_id: String,
    pub category: String,
    pub box2d: Box2D<T>,
    pub cuboid: Cuboid3D<T>,
    pub ignore: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ImageInfo<T: Real> {
    pub id: String,
    pub width: u32,
    pub height: u32,
    pub intrinsics: CameraIntrinsics<T>,
}
