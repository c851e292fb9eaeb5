//! Normal coordinates around a center point and the whole-spline
//! transforms built on them.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geodesics::Surface;
use crate::mesh::MeshPoint;
use crate::scalar::Scalar;
use crate::vector::Vec2;

use super::Spline;

/// Polar coordinates in the center's tangent frame.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Polar<T> {
    pub angle: T,
    pub radius: T,
}

/// A discrete exponential map: points as (angle, radius) about a center.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormalChart<T> {
    pub center: MeshPoint<T>,
    pub entries: Vec<Polar<T>>,
}

/// Normal coordinates of `points` about `center`: the radius is the
/// geodesic distance and the angle the initial direction of the shortest
/// path.
pub fn log_chart<T: Scalar>(surface: &Surface<T>, center: &MeshPoint<T>, points: &[MeshPoint<T>]) -> Result<NormalChart<T>> {
    let center = surface.mesh().check_point(center)?;
    let entries = points
        .iter()
        .map(|p| {
            let path = surface.shortest_path(&center, p)?;
            if path.length <= T::zero() {
                return Ok(Polar {
                    angle: T::zero(),
                    radius: T::zero(),
                });
            }
            let dir = surface.change_face(surface.start_tangent(&path), path.start.face, center.face)?;
            Ok(Polar {
                angle: dir.angle(),
                radius: path.length,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(NormalChart { center, entries })
}

/// Points of a chart, by straightest geodesics from the center.
pub fn exp_chart<T: Scalar>(surface: &Surface<T>, chart: &NormalChart<T>) -> Result<Vec<MeshPoint<T>>> {
    chart
        .entries
        .iter()
        .map(|e| {
            if e.radius <= T::zero() {
                return Ok(chart.center);
            }
            Ok(surface
                .straightest_geodesic(&chart.center, Vec2::from_angle(e.angle), e.radius)?
                .end)
        })
        .collect()
}

/// A linear map applied in normal coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "lowercase")]
pub enum Transform<T> {
    /// Counter-clockwise in the center's frame, radians.
    Rotate { angle: T },
    Scale { factor: T },
    /// Moves the center to `to`.
    Translate { to: MeshPoint<T> },
}

/// Applies `op` to every control point of `spline` in normal coordinates
/// about `center`. Continuity flags are kept and smooth anchors are
/// re-aligned afterwards.
pub fn transform_spline<T: Scalar>(
    surface: &Surface<T>,
    spline: &Spline<T>,
    center: &MeshPoint<T>,
    op: Transform<T>,
) -> Result<Spline<T>> {
    let center = surface.mesh().check_point(center)?;
    let identity = match op {
        Transform::Rotate { angle } => angle == T::zero(),
        Transform::Scale { factor } => {
            if !(factor > T::zero()) {
                return Err(Error::InvalidParameter(format!("scale factor must be positive, got {}", factor.f64())));
            }
            factor == T::one()
        }
        Transform::Translate { to } => surface.mesh().check_point(&to)? == center,
    };
    if identity {
        return Ok(spline.clone());
    }
    let mut chart = log_chart(surface, &center, &spline.control_points())?;
    match op {
        Transform::Rotate { angle } => {
            for e in &mut chart.entries {
                e.angle = e.angle + angle;
            }
        }
        Transform::Scale { factor } => {
            for e in &mut chart.entries {
                e.radius = e.radius * factor;
            }
        }
        Transform::Translate { to } => {
            // directions keep their meaning after transport: frame angles
            // turn with the transported x axis
            let psi = surface.transport_angle(&center, &to)?;
            for e in &mut chart.entries {
                e.angle = e.angle + psi;
            }
            chart.center = surface.mesh().check_point(&to)?;
        }
    }
    let points = exp_chart(surface, &chart)?;
    let mut out = spline.with_points(surface, &points)?;
    out.enforce_smooth(surface)?;
    Ok(out)
}
