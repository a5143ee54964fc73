//! Reprojection of equirectangular spherical panoramas into revolvable
//! square or rectangular overhead views.
//!
//! The pipeline has two independent halves. A rendering half walks every
//! output pixel backward: square/rectangle coordinates through a disc
//! rectifier, the rectified point through the inverse of a blended
//! azimuthal projection to the sphere, an aspect rotation, and finally a
//! bilinear fetch from the source panorama. A metric half measures the
//! conformal and equiareal distortion of that mapping and searches for the
//! blend parameter that minimizes a saliency-weighted mix of the two.
//!
//! The blend parameter `beta` moves the projection between a stereographic
//! character (`beta` near 0, shapes preserved, sizes exaggerated) and the
//! Lambert azimuthal equal-area character (`beta = 1`, sizes preserved,
//! shapes sheared near the rim). An analogous blend between Mercator and
//! the cylindrical equal-area family lives in [`cylindrical`].

pub mod aspect;
pub mod azimuthal;
pub mod cylindrical;
pub mod distortion;
pub mod elliptic;
pub mod equirect;
mod error;
pub mod rectify;
pub mod render;
pub mod synth;

pub use aspect::{apply_aspect, rotation_from_spec, AspectSpec, Rotation3};
pub use azimuthal::{BlendBeta, DiscPoint, EllipseAxes, GeoCoord, BETA_MIN};
pub use distortion::{optimize_beta, total_error, DistortionField, OptimizerConfig};
pub use equirect::{read_image, write_image, EquirectImage, Interpolation, OutputImage};
pub use error::{Error, Result};
pub use rectify::{Rectifier, RectifierKind, SquarePoint};
pub use render::{pixel_to_plane, project, ProjectionConfig};
