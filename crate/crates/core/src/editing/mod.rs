//! Spline editing: anchors and handles, smooth anchors, whole-spline
//! transforms in normal coordinates and SVG import.
//!
//! A spline is a chain of cubic control polygons. Anchor `i` is the first
//! point of segment `i` (and the last point of segment `i - 1`); its handles
//! are the neighbouring control points on either side.

mod chart;
mod svg;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geodesics::{GeodesicPath, Surface};
use crate::mesh::MeshPoint;
use crate::scalar::Scalar;
use crate::splines::{insert, trace, ControlPolygon, ModeSpec, Scheme, TraceMode, TracedCurve};
use crate::vector::Vec2;

pub use chart::{exp_chart, log_chart, transform_spline, NormalChart, Polar, Transform};
pub use svg::{svg_import, SvgImport};

/// How the two handles of an anchor relate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Continuity {
    /// Handles move independently.
    Corner,
    /// Handles stay on opposite sides of one geodesic through the anchor.
    Smooth,
}

/// Which handle of an anchor.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    /// The handle on the segment ending at the anchor.
    In,
    /// The handle on the segment starting at the anchor.
    Out,
}

impl Side {
    pub fn opposite(self) -> Self {
        match self {
            Side::In => Side::Out,
            Side::Out => Side::In,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Handle {
    pub anchor: usize,
    pub side: Side,
}

/// A chain of cubic curves.
#[derive(Debug, Clone)]
pub struct Spline<T> {
    segments: Vec<ControlPolygon<T>>,
    continuity: Vec<Continuity>,
    closed: bool,
    pub scheme: Scheme,
    pub mode: TraceMode,
}

impl<T: Scalar> Spline<T> {
    /// A spline from cubic segments that share their junction points. All
    /// anchors start as corners.
    pub fn new(segments: Vec<ControlPolygon<T>>, scheme: Scheme, mode: TraceMode) -> Result<Self> {
        if segments.is_empty() {
            return Err(Error::InvalidParameter("a spline needs at least one segment".into()));
        }
        for (i, s) in segments.iter().enumerate() {
            if s.degree() != 3 {
                return Err(Error::UnsupportedDegree(s.degree()));
            }
            if i > 0 && segments[i - 1].last() != s.first() {
                return Err(Error::InvalidParameter(format!("segment {i} does not start where segment {} ends", i - 1)));
            }
        }
        let n = segments.len();
        Ok(Self {
            segments,
            continuity: vec![Continuity::Corner; n + 1],
            closed: false,
            scheme,
            mode,
        })
    }

    /// A spline through `3n + 1` control points.
    pub fn from_points(surface: &Surface<T>, points: &[MeshPoint<T>], scheme: Scheme, mode: TraceMode) -> Result<Self> {
        if points.len() < 4 || (points.len() - 1) % 3 != 0 {
            return Err(Error::InvalidParameter(format!(
                "a cubic spline needs 3n + 1 control points, got {}",
                points.len()
            )));
        }
        let segments = points
            .windows(4)
            .step_by(3)
            .map(|w| ControlPolygon::new(surface, w))
            .collect::<Result<Vec<_>>>()?;
        Self::new(segments, scheme, mode)
    }

    /// Marks the spline closed. Its first and last anchors must coincide.
    pub fn close(mut self) -> Result<Self> {
        if self.anchor(0) != self.anchor(self.num_segments()) {
            return Err(Error::InvalidParameter("first and last anchors differ".into()));
        }
        self.closed = true;
        let c = self.continuity[0];
        let n = self.num_segments();
        self.continuity[n] = c;
        Ok(self)
    }

    pub fn is_closed(&self) -> bool {
        self.closed
    }

    pub fn segments(&self) -> &[ControlPolygon<T>] {
        &self.segments
    }

    pub fn num_segments(&self) -> usize {
        self.segments.len()
    }

    pub fn num_anchors(&self) -> usize {
        self.segments.len() + 1
    }

    /// All control points, junctions once.
    pub fn control_points(&self) -> Vec<MeshPoint<T>> {
        let mut out = vec![self.segments[0].first()];
        for s in &self.segments {
            out.extend_from_slice(&s.points()[1..]);
        }
        out
    }

    pub fn anchor(&self, i: usize) -> MeshPoint<T> {
        if i < self.segments.len() {
            self.segments[i].first()
        } else {
            self.segments[i - 1].last()
        }
    }

    pub fn continuity(&self, i: usize) -> Continuity {
        self.continuity[i]
    }

    /// Whether a handle exists: end anchors of an open spline have one.
    pub fn has_handle(&self, h: Handle) -> bool {
        h.anchor < self.num_anchors()
            && match h.side {
                Side::In => h.anchor > 0,
                Side::Out => h.anchor < self.segments.len(),
            }
    }

    pub fn handle(&self, h: Handle) -> Result<MeshPoint<T>> {
        let (seg, idx) = self.handle_slot(h)?;
        Ok(self.segments[seg].points()[idx])
    }

    /// Geodesic from the anchor to the handle.
    pub fn handle_path(&self, h: Handle) -> Result<GeodesicPath<T>> {
        let (seg, _) = self.handle_slot(h)?;
        let s = &self.segments[seg].segments();
        Ok(match h.side {
            Side::Out => s[0].clone(),
            Side::In => s[2].reversed(),
        })
    }

    fn handle_slot(&self, h: Handle) -> Result<(usize, usize)> {
        if !self.has_handle(h) {
            return Err(Error::InvalidParameter(format!("no {:?} handle at anchor {}", h.side, h.anchor)));
        }
        Ok(match h.side {
            Side::Out => (h.anchor, 1),
            Side::In => (h.anchor - 1, 2),
        })
    }

    /// The anchors that are the same point as `i`: both ends of a closed
    /// spline.
    fn twins(&self, i: usize) -> Vec<usize> {
        let n = self.segments.len();
        if self.closed && (i == 0 || i == n) {
            vec![0, n]
        } else {
            vec![i]
        }
    }

    /// The handle on the other side of the same anchor, if there is one.
    fn opposite(&self, h: Handle) -> Option<Handle> {
        let n = self.segments.len();
        let side = h.side.opposite();
        let o = Handle { anchor: h.anchor, side };
        if self.has_handle(o) {
            return Some(o);
        }
        if self.closed {
            let anchor = if h.anchor == 0 { n } else { 0 };
            let o = Handle { anchor, side };
            if (h.anchor == 0 || h.anchor == n) && self.has_handle(o) {
                return Some(o);
            }
        }
        None
    }

    /// Handles sharing anchor `i` (and its twin on a closed spline).
    fn handles_of(&self, i: usize) -> Vec<Handle> {
        self.twins(i)
            .into_iter()
            .flat_map(|a| [Handle { anchor: a, side: Side::In }, Handle { anchor: a, side: Side::Out }])
            .filter(|&h| self.has_handle(h))
            .collect()
    }

    /// Replaces a handle point; `path` runs from the anchor to it.
    fn set_handle(&mut self, surface: &Surface<T>, h: Handle, path: GeodesicPath<T>) -> Result<()> {
        let (seg, idx) = self.handle_slot(h)?;
        let mut pts = self.segments[seg].points().to_vec();
        pts[idx] = path.end;
        let old = self.segments[seg].segments();
        let middle = surface.shortest_path(&pts[1], &pts[2])?;
        let segs = match h.side {
            Side::Out => vec![path, middle, old[2].clone()],
            Side::In => vec![old[0].clone(), middle, path.reversed()],
        };
        self.segments[seg] = ControlPolygon::from_parts(pts, segs);
        Ok(())
    }

    /// Sets an anchor's continuity. Making an anchor smooth re-traces its
    /// in-handle opposite the out-handle.
    pub fn set_continuity(&mut self, surface: &Surface<T>, i: usize, c: Continuity) -> Result<()> {
        if i >= self.num_anchors() {
            return Err(Error::InvalidParameter(format!("no anchor {i}")));
        }
        for a in self.twins(i) {
            self.continuity[a] = c;
        }
        if c == Continuity::Smooth {
            let hs = self.handles_of(i);
            if let Some(&out) = hs.iter().find(|h| h.side == Side::Out) {
                self.mirror(surface, out)?;
            }
        }
        Ok(())
    }

    /// Re-traces the handle opposite `h` along the reversed tangent of `h`,
    /// keeping its length.
    fn mirror(&mut self, surface: &Surface<T>, h: Handle) -> Result<()> {
        let Some(o) = self.opposite(h) else {
            return Ok(());
        };
        let path = self.handle_path(h)?;
        let dir = surface.start_tangent(&path);
        if dir.norm() <= T::zero() {
            return Ok(());
        }
        let len = self.handle_path(o)?.length;
        let anchor = self.anchor(o.anchor);
        let dir = surface.change_face(-dir, path.start.face, anchor.face)?;
        let ray = surface.straightest_geodesic(&anchor, dir, len)?;
        self.set_handle(surface, o, ray)
    }

    /// Moves anchor `i` to `to`. Both handles follow: their directions are
    /// transported from the old to the new position and re-traced as
    /// straightest geodesics of the same lengths.
    pub fn move_anchor(&mut self, surface: &Surface<T>, i: usize, to: MeshPoint<T>) -> Result<()> {
        if i >= self.num_anchors() {
            return Err(Error::InvalidParameter(format!("no anchor {i}")));
        }
        let to = surface.mesh().check_point(&to)?;
        let from = self.anchor(i);
        if from == to {
            return Ok(());
        }
        let moved = surface.shortest_path(&from, &to)?;
        let mut rays = Vec::new();
        for h in self.handles_of(i) {
            let path = self.handle_path(h)?;
            let first = moved.strip[0];
            let last = *moved.strip.last().expect("non-empty strip");
            let dir = surface.change_face(surface.start_tangent(&path), path.start.face, first)?;
            let dir = surface.transport_along(dir, &moved)?;
            let dir = surface.change_face(dir, last, to.face)?;
            rays.push((h, surface.straightest_geodesic(&to, dir, path.length)?));
        }
        // anchors first, so the handle segments start at the new point
        for a in self.twins(i) {
            if a < self.segments.len() {
                self.replace_point(surface, a, 0, to)?;
            }
            if a > 0 {
                self.replace_point(surface, a - 1, 3, to)?;
            }
        }
        for (h, ray) in rays {
            self.set_handle(surface, h, ray)?;
        }
        Ok(())
    }

    fn replace_point(&mut self, surface: &Surface<T>, seg: usize, idx: usize, p: MeshPoint<T>) -> Result<()> {
        let mut pts = self.segments[seg].points().to_vec();
        pts[idx] = p;
        self.segments[seg] = ControlPolygon::new(surface, &pts)?;
        Ok(())
    }

    /// Moves a handle to `to`. If its anchor is smooth, the opposite handle
    /// is re-traced along the reversed tangent, keeping its own length.
    pub fn move_handle(&mut self, surface: &Surface<T>, h: Handle, to: MeshPoint<T>) -> Result<()> {
        self.handle_slot(h)?;
        let to = surface.mesh().check_point(&to)?;
        let path = surface.shortest_path(&self.anchor(h.anchor), &to)?;
        self.set_handle(surface, h, path)?;
        if self.continuity[h.anchor] == Continuity::Smooth {
            self.mirror(surface, h)?;
        }
        Ok(())
    }

    /// Removes interior anchor `i`, merging its two segments into one cubic
    /// that keeps the outer handles.
    pub fn delete_anchor(&mut self, surface: &Surface<T>, i: usize) -> Result<()> {
        let n = self.segments.len();
        if i == 0 || i >= n {
            return Err(Error::InvalidParameter(format!("anchor {i} is not an interior anchor")));
        }
        let (a, b) = (&self.segments[i - 1], &self.segments[i]);
        let pts = [a.points()[0], a.points()[1], b.points()[2], b.points()[3]];
        let middle = surface.shortest_path(&pts[1], &pts[2])?;
        let merged = ControlPolygon::from_parts(
            pts.to_vec(),
            vec![a.segments()[0].clone(), middle, b.segments()[2].clone()],
        );
        self.segments.splice(i - 1..=i, [merged]);
        self.continuity.remove(i);
        Ok(())
    }

    /// Splits segment `seg` at `t`; the new anchor is a corner.
    pub fn insert_anchor(&mut self, surface: &Surface<T>, seg: usize, t: T) -> Result<usize> {
        if seg >= self.segments.len() {
            return Err(Error::InvalidParameter(format!("no segment {seg}")));
        }
        let (l, r) = insert(surface, &self.segments[seg], t, self.scheme, self.mode)?;
        self.segments.splice(seg..=seg, [l, r]);
        self.continuity.insert(seg + 1, Continuity::Corner);
        Ok(seg + 1)
    }

    /// Traces every segment, in parallel.
    pub fn trace(&self, surface: &Surface<T>) -> Result<Vec<TracedCurve<T>>> {
        self.segments
            .par_iter()
            .map(|s| trace(surface, s, self.scheme, self.mode))
            .collect()
    }

    /// Angle between the reversed in-tangent and the out-tangent at anchor
    /// `i`, in the anchor's frame. Zero means the handles are opposed.
    pub fn handle_misalignment(&self, surface: &Surface<T>, i: usize) -> Result<Option<T>> {
        let hs = self.handles_of(i);
        let (Some(&hin), Some(&hout)) = (
            hs.iter().find(|h| h.side == Side::In),
            hs.iter().find(|h| h.side == Side::Out),
        ) else {
            return Ok(None);
        };
        let anchor = self.anchor(i);
        let tan = |h: Handle| -> Result<Vec2<T>> {
            let p = self.handle_path(h)?;
            surface.change_face(surface.start_tangent(&p), p.start.face, anchor.face)
        };
        let (a, b) = (tan(hin)?, tan(hout)?);
        if a.norm() <= T::zero() || b.norm() <= T::zero() {
            return Ok(None);
        }
        Ok(Some((-a).angle_to(b).abs()))
    }

    /// Re-traces the in-handle of every smooth anchor opposite its
    /// out-handle.
    pub(crate) fn enforce_smooth(&mut self, surface: &Surface<T>) -> Result<()> {
        for i in 0..self.num_anchors() {
            if self.continuity[i] == Continuity::Smooth {
                let out = Handle { anchor: i, side: Side::Out };
                if self.has_handle(out) {
                    self.mirror(surface, out)?;
                }
            }
        }
        Ok(())
    }

    /// Rebuilds the spline through new control points, keeping flags.
    pub(crate) fn with_points(&self, surface: &Surface<T>, points: &[MeshPoint<T>]) -> Result<Self> {
        let mut s = Self::from_points(surface, points, self.scheme, self.mode)?;
        s.continuity = self.continuity.clone();
        s.closed = self.closed;
        Ok(s)
    }
}

/// A spline as stored on disk.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SplineDoc {
    pub scheme: Scheme,
    #[serde(flatten)]
    pub mode: ModeSpec,
    #[serde(default)]
    pub closed: bool,
    /// `3n + 1` control points; every third is an anchor.
    pub control_points: Vec<MeshPoint<f64>>,
    pub continuity: Vec<Continuity>,
}

impl SplineDoc {
    pub fn from_spline<T: Scalar>(s: &Spline<T>) -> Self {
        Self {
            scheme: s.scheme,
            mode: s.mode.into(),
            closed: s.closed,
            control_points: s
                .control_points()
                .iter()
                .map(|p| MeshPoint::new(p.face, p.alpha.f64(), p.beta.f64()))
                .collect(),
            continuity: s.continuity.clone(),
        }
    }

    pub fn to_spline<T: Scalar>(&self, surface: &Surface<T>) -> Result<Spline<T>> {
        let pts: Vec<MeshPoint<T>> = self
            .control_points
            .iter()
            .map(|p| MeshPoint::new(p.face, T::of(p.alpha), T::of(p.beta)))
            .collect();
        let mut s = Spline::from_points(surface, &pts, self.scheme, self.mode.into())?;
        if self.continuity.len() != s.num_anchors() {
            return Err(Error::InvalidParameter(format!(
                "{} continuity flags for {} anchors",
                self.continuity.len(),
                s.num_anchors()
            )));
        }
        s.continuity = self.continuity.clone();
        if self.closed {
            s = s.close()?;
        }
        Ok(s)
    }
}
