//! Recursive De Casteljau subdivision.

use crate::error::Result;
use crate::geodesics::Surface;
use crate::mesh::MeshPoint;
use crate::scalar::Scalar;

use super::web::Web;
use super::{chain_polygons, decasteljau_eval, ControlPolygon, Scheme, TraceMode, TracedCurve};

/// Splits a polygon at `t` into the polygons of the two sub-curves. They
/// share the apex point exactly, and every new segment is a piece of a path
/// built during the split.
pub fn split_at<T: Scalar>(
    surface: &Surface<T>,
    polygon: &ControlPolygon<T>,
    t: T,
) -> Result<(ControlPolygon<T>, ControlPolygon<T>)> {
    let k = polygon.degree();
    let mut web = Web::from_polygon(surface, polygon.points(), polygon.segments());
    let mut row: Vec<usize> = (0..=k).collect();
    let mut left = vec![0];
    let mut right = vec![k];
    while row.len() > 1 {
        row = (0..row.len() - 1)
            .map(|i| web.average(row[i], row[i + 1], t))
            .collect::<Result<_>>()?;
        left.push(row[0]);
        right.push(row[row.len() - 1]);
    }
    right.reverse();
    Ok((
        ControlPolygon::from_web(&mut web, &left)?,
        ControlPolygon::from_web(&mut web, &right)?,
    ))
}

/// One bisection step.
pub fn rdc_split<T: Scalar>(
    surface: &Surface<T>,
    polygon: &ControlPolygon<T>,
) -> Result<(ControlPolygon<T>, ControlPolygon<T>)> {
    split_at(surface, polygon, T::half())
}

/// Leaf polygons of the bisection tree in curve order, with their intervals.
pub(crate) fn leaves<T: Scalar>(
    surface: &Surface<T>,
    polygon: &ControlPolygon<T>,
    mode: TraceMode,
) -> Result<Vec<ControlPolygon<T>>> {
    let mut out = Vec::new();
    // depth-first, right child pushed first so leaves pop left to right
    let mut stack = vec![(polygon.clone(), 0u32)];
    while let Some((p, depth)) = stack.pop() {
        if mode.stops(surface, depth, &p)? {
            out.push(p);
            continue;
        }
        let (l, r) = rdc_split(surface, &p)?;
        stack.push((r, depth + 1));
        stack.push((l, depth + 1));
    }
    Ok(out)
}

/// Traces the curve by recursive bisection.
pub fn rdc_trace<T: Scalar>(surface: &Surface<T>, polygon: &ControlPolygon<T>, mode: TraceMode) -> Result<TracedCurve<T>> {
    let (nodes, segments) = chain_polygons(leaves(surface, polygon, mode)?);
    Ok(TracedCurve::new(surface.mesh(), nodes, segments, Scheme::Rdc, mode))
}

/// Descends to the leaf containing `t`. Returns the leaf, its interval and
/// whether `t` fell on a split point on the way (ties go to `prefer_left`).
pub(crate) fn descend<T: Scalar>(
    surface: &Surface<T>,
    polygon: &ControlPolygon<T>,
    t: T,
    mode: TraceMode,
    prefer_left: bool,
) -> Result<(ControlPolygon<T>, T, T, bool)> {
    let (mut a, mut b) = (T::zero(), T::one());
    let mut p = polygon.clone();
    let mut depth = 0;
    let mut tie = false;
    while !mode.stops(surface, depth, &p)? {
        let mid = (a + b) * T::half();
        let (l, r) = rdc_split(surface, &p)?;
        tie |= t == mid;
        if t < mid || (t == mid && prefer_left) {
            p = l;
            b = mid;
        } else {
            p = r;
            a = mid;
        }
        depth += 1;
    }
    Ok((p, a, b, tie))
}

/// Evaluates the curve at `t` by descending the bisection tree and running
/// De Casteljau on the leaf.
pub fn rdc_point_eval<T: Scalar>(
    surface: &Surface<T>,
    polygon: &ControlPolygon<T>,
    t: T,
    mode: TraceMode,
) -> Result<MeshPoint<T>> {
    if t <= T::zero() {
        return Ok(polygon.first());
    }
    if t >= T::one() {
        return Ok(polygon.last());
    }
    let (leaf, a, b, _) = descend(surface, polygon, t, mode, true)?;
    decasteljau_eval(surface, &leaf, (t - a) / (b - a))
}
