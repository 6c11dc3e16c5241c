//! Training-free monocular 3D box lifting and the matching evaluation
//! stack: cuboid geometry, depth-to-box lifting, AP/AR/NHD scoring and the
//! file formats that connect them.
//!
//! Numeric code is generic over [`scalar::Real`] (`f32` or `f64`). The
//! aliases below fix the scalar to `f64`; the `*F32` variants use `f32`.

pub mod error;
pub mod eval;
pub mod io;
pub mod geometry;
pub mod lifting;
pub mod scalar;

pub use error::FormatError;
pub use scalar::Real;

pub type Cuboid = geometry::Cuboid3D<f64>;
pub type Rotation = geometry::RotationMatrix<f64>;
pub type Rect = geometry::Box2D<f64>;
pub type Intrinsics = lifting::CameraIntrinsics<f64>;
pub type Depth = lifting::DepthMap<f64>;
pub type Cloud = lifting::PointCloud<f64>;
pub type Params = lifting::LiftParams<f64>;
pub type Detection = eval::DetectionRecord<f64>;
pub type GroundTruth = eval::GroundTruthRecord<f64>;
pub type Image = eval::ImageInfo<f64>;

pub type CuboidF32 = geometry::Cuboid3D<f32>;
pub type RotationF32 = geometry::RotationMatrix<f32>;
pub type RectF32 = geometry::Box2D<f32>;
pub type IntrinsicsF32 = lifting::CameraIntrinsics<f32>;
pub type DepthF32 = lifting::DepthMap<f32>;
pub type CloudF32 = lifting::PointCloud<f32>;
pub type ParamsF32 = lifting::LiftParams<f32>;
