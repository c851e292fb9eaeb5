//! Bézier splines on triangle meshes under the geodesic metric.
//!
//! The crate traces, evaluates and edits manifold Bézier curves with two
//! subdivision schemes, recursive De Casteljau (RDC) and open-uniform
//! Lane-Riesenfeld (OLR), built on locally shortest geodesic paths.
//!
//! Everything is generic over the scalar type; the aliases at the crate root
//! fix it to `f64`.

pub mod editing;
pub mod error;
pub mod geodesics;
pub mod harness;
pub mod mesh;
pub mod scalar;
pub mod splines;
pub mod vector;

pub use error::{Error, Result};
pub use scalar::Scalar;
pub use vector::{Vec2, Vec3};

pub type Mesh = mesh::TriangleMesh<f64>;
pub type MeshPoint = mesh::MeshPoint<f64>;
pub type DualGraph = mesh::DualGraph<f64>;
pub type GeodesicPath = geodesics::GeodesicPath<f64>;
pub type Surface = geodesics::Surface<f64>;
pub type TangentVector = geodesics::TangentVector<f64>;
pub type ControlPolygon = splines::ControlPolygon<f64>;
pub type TracedCurve = splines::TracedCurve<f64>;
pub type Spline = editing::Spline<f64>;
