//! Bézier curves on a surface: direct De Casteljau evaluation, the two
//! subdivision schemes (recursive De Casteljau and open-uniform
//! Lane-Riesenfeld), point evaluation and insertion, B-spline to Bézier
//! conversion and degree elevation.

mod convert;
pub mod euclid;
mod insert;
mod io;
mod olr;
mod rdc;
mod web;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geodesics::{GeodesicPath, PathExport, Surface};
use crate::mesh::{MeshPoint, TriangleMesh};
use crate::scalar::Scalar;
use crate::vector::Vec3;

pub use convert::{bspline_to_bezier, KnotCase};
pub use insert::{olr_insert, rdc_insert};
pub use io::{CurveExport, ModeSpec, SplineFile};
pub use olr::{deboor_eval, olr_point_eval, olr_subdivide, olr_trace, refinement_row, ExpansionNode};
pub use rdc::{rdc_point_eval, rdc_split, rdc_trace, split_at};

use web::Web;

/// Hard cap on subdivision depth in adaptive mode.
pub const MAX_DEPTH: u32 = 24;

/// Which subdivision scheme produced a curve.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scheme {
    Rdc,
    Olr,
}

/// How far to subdivide.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "lowercase")]
pub enum TraceMode {
    /// A fixed number of levels.
    Uniform { depth: u32 },
    /// Stop a branch once every turning angle is below `theta` (radians)
    /// and no segment is longer than the longest mesh edge.
    Adaptive { theta: f64 },
}

impl TraceMode {
    pub fn adaptive_degrees(theta: f64) -> Self {
        TraceMode::Adaptive {
            theta: theta.to_radians(),
        }
    }

    /// Whether a node at `depth` holding `polygon` is a leaf.
    pub(crate) fn stops<T: Scalar>(&self, surface: &Surface<T>, depth: u32, polygon: &ControlPolygon<T>) -> Result<bool> {
        match *self {
            TraceMode::Uniform { depth: d } => Ok(depth >= d),
            TraceMode::Adaptive { theta } => {
                if depth >= MAX_DEPTH {
                    return Ok(true);
                }
                Ok(is_flat(surface, &polygon.segments, T::of(theta), surface.mesh().longest_edge())?)
            }
        }
    }
}

/// Recursion depth so that segments of length `len` shrink below `delta`.
pub fn uniform_depth(len: f64, delta: f64) -> u32 {
    if len <= delta || delta <= 0.0 {
        return 0;
    }
    (len / delta).log2().ceil() as u32
}

/// Control points joined by geodesic segments.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ControlPolygon<T> {
    points: Vec<MeshPoint<T>>,
    segments: Vec<GeodesicPath<T>>,
    max_seg_len: T,
}

impl<T: Scalar> ControlPolygon<T> {
    /// Joins consecutive points by shortest paths.
    pub fn new(surface: &Surface<T>, points: &[MeshPoint<T>]) -> Result<Self> {
        if points.len() < 2 {
            return Err(Error::InvalidParameter("a control polygon needs at least two points".into()));
        }
        let points = points
            .iter()
            .map(|p| surface.mesh().check_point(p))
            .collect::<Result<Vec<_>>>()?;
        let segments = points
            .windows(2)
            .map(|w| surface.shortest_path(&w[0], &w[1]))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self::from_parts(points, segments))
    }

    /// Assembles a polygon from points and their connecting segments.
    pub fn from_parts(points: Vec<MeshPoint<T>>, segments: Vec<GeodesicPath<T>>) -> Self {
        debug_assert_eq!(points.len(), segments.len() + 1);
        let max_seg_len = segments.iter().map(|s| s.length).fold(T::zero(), T::max);
        Self {
            points,
            segments,
            max_seg_len,
        }
    }

    pub(crate) fn from_web(web: &mut Web<'_, T>, ids: &[usize]) -> Result<Self> {
        let points = ids.iter().map(|&i| web.point(i)).collect();
        let segments = ids.windows(2).map(|w| web.path(w[0], w[1])).collect::<Result<Vec<_>>>()?;
        Ok(Self::from_parts(points, segments))
    }

    #[inline]
    pub fn points(&self) -> &[MeshPoint<T>] {
        &self.points
    }

    #[inline]
    pub fn segments(&self) -> &[GeodesicPath<T>] {
        &self.segments
    }

    #[inline]
    pub fn degree(&self) -> usize {
        self.points.len() - 1
    }

    /// Total length ℓ.
    pub fn length(&self) -> T {
        self.segments.iter().map(|s| s.length).sum()
    }

    #[inline]
    pub fn max_segment_length(&self) -> T {
        self.max_seg_len
    }

    pub fn first(&self) -> MeshPoint<T> {
        self.points[0]
    }

    pub fn last(&self) -> MeshPoint<T> {
        self.points[self.points.len() - 1]
    }

    /// The point halfway along the polygon, and the index of the segment
    /// holding it.
    pub fn midpoint(&self, mesh: &TriangleMesh<T>) -> (MeshPoint<T>, usize) {
        let half = self.length() * T::half();
        let mut acc = T::zero();
        for (i, s) in self.segments.iter().enumerate() {
            if acc + s.length >= half {
                let w = if s.length > T::zero() {
                    (half - acc) / s.length
                } else {
                    T::zero()
                };
                return (s.point_at(mesh, w), i);
            }
            acc = acc + s.length;
        }
        (self.last(), self.segments.len().saturating_sub(1))
    }

    /// Distance from the midpoint to every control point, each measured on
    /// a path seeded from the polygon itself.
    pub fn midpoint_distances(&self, surface: &Surface<T>) -> Result<Vec<T>> {
        let mesh = surface.mesh();
        let (mid, h) = self.midpoint(mesh);
        let mut web = Web::from_polygon(surface, &self.points, &self.segments);
        let m = web.add_point(mid);
        let s = &self.segments[h];
        let w = if s.length > T::zero() {
            (self.length() * T::half() - self.segments[..h].iter().map(|s| s.length).sum::<T>()) / s.length
        } else {
            T::zero()
        };
        web.add_piece(h, m, s.subpath(mesh, T::zero(), w.clamp01()));
        web.add_piece(m, h + 1, s.subpath(mesh, w.clamp01(), T::one()));
        (0..self.points.len()).map(|i| Ok(web.path(m, i)?.length)).collect()
    }

    /// Same points in reverse order.
    pub fn reversed(&self) -> Self {
        let mut points = self.points.clone();
        points.reverse();
        let segments = self.segments.iter().rev().map(|s| s.reversed()).collect();
        Self::from_parts(points, segments)
    }

    pub(crate) fn into_parts(self) -> (Vec<MeshPoint<T>>, Vec<GeodesicPath<T>>) {
        (self.points, self.segments)
    }
}

/// Turning angle (radians) at the node shared by `a` (ending there) and `b`
/// (starting there): the angle between the incoming and outgoing tangents,
/// compared in the frame of `b`'s start face. Zero-length segments turn by 0.
pub fn turning_angle<T: Scalar>(surface: &Surface<T>, a: &GeodesicPath<T>, b: &GeodesicPath<T>) -> Result<T> {
    let tin = surface.end_tangent(a);
    let tout = surface.start_tangent(b);
    if tin.norm() == T::zero() || tout.norm() == T::zero() {
        return Ok(T::zero());
    }
    let tin = surface.change_face(tin, a.end.face, b.start.face)?;
    Ok(tin.angle_to(tout).abs())
}

/// All turning angles along a chain of segments.
pub fn turning_angles<T: Scalar>(surface: &Surface<T>, segments: &[GeodesicPath<T>]) -> Result<Vec<T>> {
    segments.windows(2).map(|w| turning_angle(surface, &w[0], &w[1])).collect()
}

/// The adaptive stopping test: every segment no longer than `max_len` and
/// every turning angle below `theta`.
pub(crate) fn is_flat<T: Scalar>(surface: &Surface<T>, segments: &[GeodesicPath<T>], theta: T, max_len: T) -> Result<bool> {
    if segments.iter().any(|s| s.length > max_len) {
        return Ok(false);
    }
    for w in segments.windows(2) {
        if turning_angle(surface, &w[0], &w[1])? >= theta {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Output of a trace: a geodesic polygon approximating the curve.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TracedCurve<T> {
    pub nodes: Vec<MeshPoint<T>>,
    pub segments: Vec<GeodesicPath<T>>,
    /// Start point, edge crossings and end point of every segment, without
    /// repeating the shared nodes: one straight piece per triangle crossed.
    pub flat_polyline: Vec<MeshPoint<T>>,
    pub scheme: Scheme,
    pub mode: TraceMode,
}

impl<T: Scalar> TracedCurve<T> {
    pub fn new(
        mesh: &TriangleMesh<T>,
        nodes: Vec<MeshPoint<T>>,
        segments: Vec<GeodesicPath<T>>,
        scheme: Scheme,
        mode: TraceMode,
    ) -> Self {
        let mut flat_polyline: Vec<MeshPoint<T>> = Vec::new();
        for s in &segments {
            let pts = s.mesh_points(mesh);
            let skip = usize::from(!flat_polyline.is_empty());
            flat_polyline.extend(pts.into_iter().skip(skip));
        }
        if flat_polyline.is_empty() {
            flat_polyline.extend(nodes.first().copied());
        }
        Self {
            nodes,
            segments,
            flat_polyline,
            scheme,
            mode,
        }
    }

    pub fn num_segments(&self) -> usize {
        self.segments.len()
    }

    pub fn length(&self) -> T {
        self.segments.iter().map(|s| s.length).sum()
    }

    pub fn max_segment_length(&self) -> T {
        self.segments.iter().map(|s| s.length).fold(T::zero(), T::max)
    }

    /// The flat polyline in 3D.
    pub fn points3d(&self, mesh: &TriangleMesh<T>) -> Vec<Vec3<T>> {
        self.flat_polyline.iter().map(|p| mesh.embed(p)).collect()
    }

    /// Largest turning angle between consecutive segments.
    pub fn max_turning_angle(&self, surface: &Surface<T>) -> Result<T> {
        Ok(turning_angles(surface, &self.segments)?.into_iter().fold(T::zero(), T::max))
    }

    pub fn export(&self, mesh: &TriangleMesh<T>) -> CurveExport {
        CurveExport {
            scheme: self.scheme,
            mode: self.mode.into(),
            nodes: self.nodes.iter().map(|p| mesh.embed(p).cast::<f64>().to_array()).collect(),
            mesh_nodes: self.nodes.iter().map(|p| MeshPoint::new(p.face, p.alpha.f64(), p.beta.f64())).collect(),
            segments: self.segments.iter().map(|s| s.export(mesh)).collect::<Vec<PathExport>>(),
            points3d: self.points3d(mesh).into_iter().map(|p| p.cast::<f64>().to_array()).collect(),
            length: self.length().f64(),
        }
    }

    /// Writes the flat polyline as an OBJ line element.
    pub fn write_obj<W: std::io::Write>(&self, mesh: &TriangleMesh<T>, mut out: W) -> Result<()> {
        let pts = self.points3d(mesh);
        for p in &pts {
            writeln!(out, "v {} {} {}", p.x.f64(), p.y.f64(), p.z.f64())?;
        }
        if pts.len() >= 2 {
            write!(out, "l")?;
            for i in 1..=pts.len() {
                write!(out, " {i}")?;
            }
            writeln!(out)?;
        }
        Ok(())
    }
}

/// Traces a curve with either scheme.
pub fn trace<T: Scalar>(
    surface: &Surface<T>,
    polygon: &ControlPolygon<T>,
    scheme: Scheme,
    mode: TraceMode,
) -> Result<TracedCurve<T>> {
    match scheme {
        Scheme::Rdc => rdc_trace(surface, polygon, mode),
        Scheme::Olr => olr_trace(surface, polygon, mode),
    }
}

/// Evaluates a curve at `t` with either scheme.
pub fn point_eval<T: Scalar>(
    surface: &Surface<T>,
    polygon: &ControlPolygon<T>,
    t: T,
    scheme: Scheme,
    mode: TraceMode,
) -> Result<MeshPoint<T>> {
    match scheme {
        Scheme::Rdc => rdc_point_eval(surface, polygon, t, mode),
        Scheme::Olr => olr_point_eval(surface, polygon, t, mode),
    }
}

/// Inserts a point at `t` with either scheme.
pub fn insert<T: Scalar>(
    surface: &Surface<T>,
    polygon: &ControlPolygon<T>,
    t: T,
    scheme: Scheme,
    mode: TraceMode,
) -> Result<(ControlPolygon<T>, ControlPolygon<T>)> {
    match scheme {
        Scheme::Rdc => rdc_insert(surface, polygon, t, mode),
        Scheme::Olr => olr_insert(surface, polygon, t, mode),
    }
}

/// Direct De Casteljau evaluation: the triangular scheme of averages at `t`.
pub fn decasteljau_eval<T: Scalar>(surface: &Surface<T>, polygon: &ControlPolygon<T>, t: T) -> Result<MeshPoint<T>> {
    if t <= T::zero() {
        return Ok(polygon.first());
    }
    if t >= T::one() {
        return Ok(polygon.last());
    }
    let mut web = Web::from_polygon(surface, &polygon.points, &polygon.segments);
    let mut row: Vec<usize> = (0..polygon.points.len()).collect();
    while row.len() > 1 {
        row = (0..row.len() - 1)
            .map(|i| web.average(row[i], row[i + 1], t))
            .collect::<Result<_>>()?;
    }
    Ok(web.point(row[0]))
}

/// Degree elevation: the same curve (exactly, in the plane) with one more
/// control point.
pub fn degree_elevate<T: Scalar>(surface: &Surface<T>, polygon: &ControlPolygon<T>) -> Result<ControlPolygon<T>> {
    let k = polygon.degree();
    let mut web = Web::from_polygon(surface, &polygon.points, &polygon.segments);
    let mut ids = vec![0];
    for i in 1..=k {
        let w = T::one() - T::of_usize(i) / T::of_usize(k + 1);
        ids.push(web.average(i - 1, i, w)?);
    }
    ids.push(k);
    ControlPolygon::from_web(&mut web, &ids)
}

/// Concatenates leaf polygons that share end points into one node list.
pub(crate) fn chain_polygons<T: Scalar>(leaves: Vec<ControlPolygon<T>>) -> (Vec<MeshPoint<T>>, Vec<GeodesicPath<T>>) {
    let mut nodes = Vec::new();
    let mut segments = Vec::new();
    for (i, leaf) in leaves.into_iter().enumerate() {
        let (p, s) = leaf.into_parts();
        nodes.extend(p.into_iter().skip(usize::from(i > 0)));
        segments.extend(s);
    }
    (nodes, segments)
}

#[cfg(test)]
mod tests;
