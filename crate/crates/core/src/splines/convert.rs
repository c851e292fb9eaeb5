//! B-spline segment to Bézier conversion.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geodesics::Surface;
use crate::scalar::Scalar;

use super::euclid::span_to_bezier;
use super::web::Web;
use super::ControlPolygon;

/// Knot layout around a cubic segment.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KnotCase {
    /// Equally spaced simple knots.
    Uniform,
    /// First segment of an open vector: `0 0 0 0 1 2 3 ...`.
    OpenNonuniform,
}

/// Bézier polygon of the cubic B-spline segment with control points
/// `points`, realized as pairwise averages.
pub fn bspline_to_bezier<T: Scalar>(
    surface: &Surface<T>,
    points: &ControlPolygon<T>,
    case: KnotCase,
) -> Result<ControlPolygon<T>> {
    if points.degree() != 3 {
        return Err(Error::UnsupportedDegree(points.degree()));
    }
    let mut web = Web::from_polygon(surface, points.points(), points.segments());
    let third = T::one() / T::of(3.0);
    let ids = match case {
        KnotCase::Uniform => {
            let q1 = web.average(1, 2, third)?;
            let q2 = web.average(1, 2, T::one() - third)?;
            let a = web.average(0, 1, T::one() - third)?;
            let q0 = web.average(a, q1, T::half())?;
            let b = web.average(2, 3, third)?;
            let q3 = web.average(q2, b, T::half())?;
            [q0, q1, q2, q3]
        }
        KnotCase::OpenNonuniform => {
            let q2 = web.average(1, 2, T::half())?;
            let b = web.average(2, 3, third)?;
            let q3 = web.average(q2, b, T::half())?;
            [0, 1, q2, q3]
        }
    };
    ControlPolygon::from_web(&mut web, &ids)
}

/// Bézier polygon of a B-spline segment given its `k + 1` control points and
/// `2k` local knots (the segment spans `knots[k - 1] .. knots[k]`).
pub(crate) fn segment_to_bezier<T: Scalar>(
    surface: &Surface<T>,
    points: &ControlPolygon<T>,
    knots: &[T],
) -> Result<ControlPolygon<T>> {
    let k = points.degree();
    if k == 3 {
        let gaps: Vec<T> = knots.windows(2).map(|w| w[1] - w[0]).collect();
        let unit = knots[k] - knots[k - 1];
        let same = |x: T, y: T| (x - y).abs() <= T::geom_eps() * (T::one() + unit);
        if gaps.iter().all(|&g| same(g, unit)) {
            return bspline_to_bezier(surface, points, KnotCase::Uniform);
        }
        let open = [T::zero(), T::zero(), unit, unit, unit];
        if gaps.iter().zip(open).all(|(&g, o)| same(g, o)) {
            return bspline_to_bezier(surface, points, KnotCase::OpenNonuniform);
        }
        if gaps.iter().rev().zip(open).all(|(&g, o)| same(g, o)) {
            return Ok(bspline_to_bezier(surface, &points.reversed(), KnotCase::OpenNonuniform)?.reversed());
        }
    }
    generic(surface, points, knots)
}

/// Any knot layout: conversion weights from knot insertion, each row
/// realized as running averages.
fn generic<T: Scalar>(surface: &Surface<T>, points: &ControlPolygon<T>, knots: &[T]) -> Result<ControlPolygon<T>> {
    let k = points.degree();
    let mut padded = vec![knots[0]];
    padded.extend_from_slice(knots);
    padded.push(knots[knots.len() - 1]);
    let mut columns = Vec::with_capacity(k + 1);
    for c in 0..=k {
        let mut e = vec![T::zero(); k + 1];
        e[c] = T::one();
        columns.push(span_to_bezier(&e, &padded, k, k));
    }
    let mut web = Web::from_polygon(surface, points.points(), points.segments());
    let mut ids = Vec::with_capacity(k + 1);
    for i in 0..=k {
        let mut acc: Option<(usize, T)> = None;
        for (c, col) in columns.iter().enumerate() {
            let w = col[i];
            if w <= T::geom_eps() {
                continue;
            }
            acc = Some(match acc {
                None => (c, w),
                Some((x, total)) => (web.average(x, c, w / (total + w))?, total + w),
            });
        }
        ids.push(acc.map(|a| a.0).unwrap_or(i));
    }
    ControlPolygon::from_web(&mut web, &ids)
}
