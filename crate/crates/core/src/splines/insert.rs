//! Point insertion: split a curve at `t` into two curves of the same degree
//! whose union is (nearly) the input curve.

use crate::error::{Error, Result};
use crate::geodesics::Surface;
use crate::mesh::MeshPoint;
use crate::scalar::Scalar;

use super::convert::segment_to_bezier;
use super::web::connect;
use super::{olr, rdc, split_at, ControlPolygon, TraceMode};

/// Extensions longer than this many polygon lengths are refused.
const EXTENSION_LIMIT: f64 = 10.0;

fn check(polygon: &ControlPolygon<impl Scalar>, t: f64) -> Result<()> {
    if polygon.degree() < 2 {
        return Err(Error::UnsupportedDegree(polygon.degree()));
    }
    if !(t > 0.0 && t < 1.0) {
        return Err(Error::InvalidParameter(format!("insertion parameter {t} outside (0, 1)")));
    }
    Ok(())
}

/// Inserts a point at `t` into a curve traced by recursive bisection.
pub fn rdc_insert<T: Scalar>(
    surface: &Surface<T>,
    polygon: &ControlPolygon<T>,
    t: T,
    mode: TraceMode,
) -> Result<(ControlPolygon<T>, ControlPolygon<T>)> {
    check(polygon, t.f64())?;
    if polygon.degree() == 2 {
        // three averages at t are already exact
        return split_at(surface, polygon, t);
    }
    let (leaf, a, b, tie) = rdc::descend(surface, polygon, t, mode, true)?;
    let (left, mut right) = split_at(surface, &leaf, (t - a) / (b - a))?;
    let mut b = b;
    if tie {
        let (leaf, ra, rb, _) = rdc::descend(surface, polygon, t, mode, false)?;
        right = split_at(surface, &leaf, (t - ra) / (rb - ra))?.1;
        b = rb;
    }
    let left = rebuild_left(surface, polygon, t, left, a)?;
    let right = rebuild_left(surface, &polygon.reversed(), T::one() - t, right.reversed(), T::one() - b)?.reversed();
    Ok((left, right))
}

/// Inserts a point at `t` into a curve traced by refinement. The junction
/// is the de Boor point at `t`.
pub fn olr_insert<T: Scalar>(
    surface: &Surface<T>,
    polygon: &ControlPolygon<T>,
    t: T,
    mode: TraceMode,
) -> Result<(ControlPolygon<T>, ControlPolygon<T>)> {
    check(polygon, t.f64())?;
    let (leaf, tie) = olr::descend(surface, polygon, t, mode, true)?;
    let junction = olr::leaf_eval(surface, &leaf, t)?;
    if polygon.degree() == 2 {
        return quadratic(surface, polygon, t, junction);
    }
    let halves = |leaf: &olr::ExpansionNode<T>| -> Result<(ControlPolygon<T>, ControlPolygon<T>, T, T)> {
        let bez = segment_to_bezier(surface, &leaf.polygon, &leaf.local_knots(leaf.polygon.degree()))?;
        let (a, b) = leaf.interval();
        let (l, r) = split_at(surface, &bez, (t - a) / (b - a))?;
        Ok((l, r, a, b))
    };
    let (left, mut right, a, mut b) = halves(&leaf)?;
    if tie {
        let (leaf, _) = olr::descend(surface, polygon, t, mode, false)?;
        let (_, r, _, rb) = halves(&leaf)?;
        right = r;
        b = rb;
    }
    let left = with_last(surface, &left, junction)?;
    let right = with_last(surface, &right.reversed(), junction)?;
    let left = rebuild_left(surface, polygon, t, left, a)?;
    let right = rebuild_left(surface, &polygon.reversed(), T::one() - t, right, T::one() - b)?.reversed();
    Ok((left, right))
}

/// Quadratic insertion with a given junction: each side keeps the point at
/// `t` on its outer control segment.
fn quadratic<T: Scalar>(
    surface: &Surface<T>,
    polygon: &ControlPolygon<T>,
    t: T,
    junction: MeshPoint<T>,
) -> Result<(ControlPolygon<T>, ControlPolygon<T>)> {
    let mesh = surface.mesh();
    let side = |p: &ControlPolygon<T>, t: T| -> Result<ControlPolygon<T>> {
        let s0 = p.segments()[0].subpath(mesh, T::zero(), t);
        let rest = p.segments()[0].subpath(mesh, t, T::one());
        let s1 = connect(surface, &s0.end, &junction, &[rest, p.segments()[1].clone()])?;
        Ok(ControlPolygon::from_parts(vec![p.first(), s0.end, junction], vec![s0, s1]))
    };
    Ok((side(polygon, t)?, side(&polygon.reversed(), T::one() - t)?.reversed()))
}

/// The polygon with its last point moved to `p`.
fn with_last<T: Scalar>(surface: &Surface<T>, polygon: &ControlPolygon<T>, p: MeshPoint<T>) -> Result<ControlPolygon<T>> {
    if polygon.last() == p {
        return Ok(polygon.clone());
    }
    let (mut points, mut segments) = polygon.clone().into_parts();
    let k = points.len() - 1;
    let old = segments[k - 1].clone();
    let tail = surface.shortest_path(&points[k], &p)?;
    segments[k - 1] = connect(surface, &points[k - 1], &p, &[old, tail])?;
    points[k] = p;
    Ok(ControlPolygon::from_parts(points, segments))
}

/// Left polygon over `[0, t]` from the left half of a leaf over `[a, t]`.
/// The first interior point lies on the first control segment of `root`;
/// the last interior point extends the leaf's last segment backwards; any
/// points in between come from a direct split of the root.
fn rebuild_left<T: Scalar>(
    surface: &Surface<T>,
    root: &ControlPolygon<T>,
    t: T,
    leaf_left: ControlPolygon<T>,
    a: T,
) -> Result<ControlPolygon<T>> {
    if a <= T::zero() {
        return Ok(leaf_left);
    }
    let mesh = surface.mesh();
    let k = root.degree();
    let junction = leaf_left.last();
    let first = root.segments()[0].subpath(mesh, T::zero(), t);

    // extension beyond the leaf's second-to-last point, away from the junction
    let back = leaf_left.segments()[k - 1].reversed();
    let delta = back.length * a / (t - a);
    let limit = T::of(EXTENSION_LIMIT) * root.length();
    if delta > limit {
        return Err(Error::ExtensionUnstable {
            required: delta.f64(),
            limit: limit.f64(),
        });
    }
    let dir = surface.end_tangent(&back);
    let ext = if dir.norm() > T::zero() {
        surface.straightest_geodesic(&back.end, dir, delta)?
    } else {
        crate::geodesics::GeodesicPath::trivial(back.end)
    };
    let pre_last = ext.end;
    let last_seg = connect(surface, &pre_last, &junction, &[ext.reversed(), back.reversed()])?;

    // interior points and routes follow a direct split of the root, so the
    // new segments stay near the original curve on non-simple surfaces
    let direct = split_at(surface, root, t)?.0;
    let mut points = vec![root.first(), first.end];
    points.extend_from_slice(&direct.points()[2..k - 1]);
    points.push(pre_last);
    points.push(junction);
    let d = direct.points();
    let mut segments = vec![first];
    for i in 1..k - 1 {
        let mut guide = Vec::new();
        if points[i] != d[i] {
            guide.push(surface.shortest_path(&points[i], &d[i])?);
        }
        guide.push(direct.segments()[i].clone());
        if points[i + 1] != d[i + 1] {
            guide.push(surface.shortest_path(&d[i + 1], &points[i + 1])?);
        }
        segments.push(connect(surface, &points[i], &points[i + 1], &guide)?);
    }
    segments.push(last_seg);
    Ok(ControlPolygon::from_parts(points, segments))
}
