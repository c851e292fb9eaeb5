//! Indexed triangle meshes, surface points and the dual graph used to seed
//! geodesic searches.

mod dual;
mod obj;
pub mod shapes;

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

pub use dual::{DualGraph, DEFAULT_SPLIT_FRACTION};
pub use obj::{load_mesh, write_obj, MeshFormat};

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::vector::{Vec2, Vec3};

/// Marker for a missing neighbor. Never present in a validated mesh.
pub const NO_FACE: usize = usize::MAX;

/// A point on the surface: a face and the barycentric weights of its first
/// two vertices. The third weight is implicit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeshPoint<T> {
    pub face: usize,
    pub alpha: T,
    pub beta: T,
}

impl<T: Scalar> MeshPoint<T> {
    pub fn new(face: usize, alpha: T, beta: T) -> Self {
        Self { face, alpha, beta }
    }

    /// Centroid of `face`.
    pub fn centroid(face: usize) -> Self {
        let third = T::one() / T::of(3.0);
        Self::new(face, third, third)
    }

    /// Builds a point from three weights, normalizing them to sum to one.
    pub fn from_weights(face: usize, w: [T; 3]) -> Self {
        let s = w[0] + w[1] + w[2];
        if s > T::zero() {
            Self::new(face, w[0] / s, w[1] / s)
        } else {
            Self::centroid(face)
        }
    }

    #[inline]
    pub fn gamma(&self) -> T {
        T::one() - self.alpha - self.beta
    }

    #[inline]
    pub fn weights(&self) -> [T; 3] {
        [self.alpha, self.beta, self.gamma()]
    }

    /// Position in the face's canonical 2D layout (see [`TriangleMesh::face_layout`]).
    pub fn in_layout(&self, layout: &[Vec2<T>; 3]) -> Vec2<T> {
        let w = self.weights();
        layout[0] * w[0] + layout[1] * w[1] + layout[2] * w[2]
    }
}

/// Indexed triangle mesh with triangle adjacency.
///
/// Edge `k` of a triangle runs from its vertex `k` to vertex `k + 1 (mod 3)`,
/// and `adjacency[f][k]` is the triangle on the other side of that edge.
/// Meshes are validated at construction: every edge is shared by exactly
/// two consistently oriented triangles and every vertex star is a single fan.
#[derive(Debug, Clone)]
pub struct TriangleMesh<T> {
    positions: Vec<Vec3<T>>,
    triangles: Vec<[usize; 3]>,
    adjacency: Vec<[usize; 3]>,
    edge_lengths: Vec<[T; 3]>,
    vertex_face: Vec<usize>,
    bbox_min: Vec3<T>,
    bbox_max: Vec3<T>,
    longest_edge: T,
}

impl<T: Scalar> TriangleMesh<T> {
    /// Builds adjacency and validates the mesh.
    pub fn new(positions: Vec<Vec3<T>>, triangles: Vec<[usize; 3]>) -> Result<Self> {
        if triangles.is_empty() {
            return Err(Error::NotWatertight("mesh has no triangles".into()));
        }
        let nv = positions.len();
        let mut directed: HashMap<(usize, usize), (usize, usize)> =
            HashMap::with_capacity(triangles.len() * 3);
        for (f, tri) in triangles.iter().enumerate() {
            for &v in tri {
                if v >= nv {
                    return Err(Error::NonManifold(format!(
                        "triangle {f} references vertex {v}, but the mesh has {nv} vertices"
                    )));
                }
            }
            if tri[0] == tri[1] || tri[1] == tri[2] || tri[0] == tri[2] {
                return Err(Error::NonManifold(format!(
                    "triangle {f} repeats a vertex: {tri:?}"
                )));
            }
            for k in 0..3 {
                let e = (tri[k], tri[(k + 1) % 3]);
                if let Some((g, _)) = directed.insert(e, (f, k)) {
                    return Err(Error::NonManifold(format!(
                        "edge ({}, {}) is used by triangles {g} and {f} with the same orientation",
                        e.0, e.1
                    )));
                }
            }
        }

        let mut adjacency = vec![[NO_FACE; 3]; triangles.len()];
        for (f, tri) in triangles.iter().enumerate() {
            for k in 0..3 {
                let (a, b) = (tri[k], tri[(k + 1) % 3]);
                match directed.get(&(b, a)) {
                    Some(&(g, _)) => adjacency[f][k] = g,
                    None => {
                        return Err(Error::NotWatertight(format!(
                            "edge ({a}, {b}) of triangle {f} has no opposite triangle"
                        )))
                    }
                }
            }
        }

        let mut edge_lengths = Vec::with_capacity(triangles.len());
        let mut longest_edge = T::zero();
        for tri in &triangles {
            let mut l = [T::zero(); 3];
            for k in 0..3 {
                l[k] = positions[tri[k]].distance(positions[tri[(k + 1) % 3]]);
                longest_edge = longest_edge.max(l[k]);
            }
            edge_lengths.push(l);
        }

        let mut vertex_face = vec![NO_FACE; nv];
        let mut corner_count = vec![0usize; nv];
        for (f, tri) in triangles.iter().enumerate() {
            for &v in tri {
                if vertex_face[v] == NO_FACE {
                    vertex_face[v] = f;
                }
                corner_count[v] += 1;
            }
        }

        let mut bbox_min = Vec3::new(T::infinity(), T::infinity(), T::infinity());
        let mut bbox_max = Vec3::new(T::neg_infinity(), T::neg_infinity(), T::neg_infinity());
        for (v, p) in positions.iter().enumerate() {
            if vertex_face[v] != NO_FACE {
                bbox_min = bbox_min.min(*p);
                bbox_max = bbox_max.max(*p);
            }
        }

        let mesh = Self {
            positions,
            triangles,
            adjacency,
            edge_lengths,
            vertex_face,
            bbox_min,
            bbox_max,
            longest_edge,
        };

        for v in 0..nv {
            if mesh.vertex_face[v] == NO_FACE {
                continue;
            }
            let star = mesh.vertex_star(v);
            if star.len() != corner_count[v] {
                return Err(Error::NonManifold(format!(
                    "vertex {v} has {} incident triangles but its fan contains {}",
                    corner_count[v],
                    star.len()
                )));
            }
        }
        Ok(mesh)
    }

    #[inline]
    pub fn num_faces(&self) -> usize {
        self.triangles.len()
    }

    #[inline]
    pub fn num_vertices(&self) -> usize {
        self.positions.len()
    }

    #[inline]
    pub fn positions(&self) -> &[Vec3<T>] {
        &self.positions
    }

    #[inline]
    pub fn triangles(&self) -> &[[usize; 3]] {
        &self.triangles
    }

    #[inline]
    pub fn adjacency(&self) -> &[[usize; 3]] {
        &self.adjacency
    }

    #[inline]
    pub fn tri(&self, f: usize) -> [usize; 3] {
        self.triangles[f]
    }

    #[inline]
    pub fn neighbor(&self, f: usize, k: usize) -> usize {
        self.adjacency[f][k]
    }

    #[inline]
    pub fn edge_length(&self, f: usize, k: usize) -> T {
        self.edge_lengths[f][k]
    }

    /// Positions of the three corners of `f`.
    #[inline]
    pub fn corners(&self, f: usize) -> [Vec3<T>; 3] {
        let t = self.triangles[f];
        [self.positions[t[0]], self.positions[t[1]], self.positions[t[2]]]
    }

    pub fn bbox(&self) -> (Vec3<T>, Vec3<T>) {
        (self.bbox_min, self.bbox_max)
    }

    pub fn bbox_diag(&self) -> T {
        self.bbox_max.distance(self.bbox_min)
    }

    pub fn longest_edge(&self) -> T {
        self.longest_edge
    }

    pub fn face_area(&self, f: usize) -> T {
        let [a, b, c] = self.corners(f);
        (b - a).cross(c - a).norm() * T::half()
    }

    pub fn face_normal(&self, f: usize) -> Vec3<T> {
        let [a, b, c] = self.corners(f);
        (b - a).cross(c - a).normalized()
    }

    pub fn centroid(&self, f: usize) -> Vec3<T> {
        let [a, b, c] = self.corners(f);
        (a + b + c) / T::of(3.0)
    }

    /// Index of the edge of `f` shared with `g`, if they are adjacent.
    #[inline]
    pub fn shared_edge(&self, f: usize, g: usize) -> Option<usize> {
        self.adjacency[f].iter().position(|&n| n == g)
    }

    /// Corner index of vertex `v` in face `f`.
    #[inline]
    pub fn corner_of(&self, f: usize, v: usize) -> Option<usize> {
        self.triangles[f].iter().position(|&u| u == v)
    }

    pub fn check_face(&self, f: usize) -> Result<()> {
        if f < self.triangles.len() {
            Ok(())
        } else {
            Err(Error::InvalidFace(f))
        }
    }

    /// Validates a mesh point and clamps barycentric coordinates that are
    /// out of range by less than the tolerance.
    pub fn check_point(&self, p: &MeshPoint<T>) -> Result<MeshPoint<T>> {
        self.check_face(p.face)?;
        let eps = T::bary_eps();
        let w = p.weights();
        if w.iter().any(|x| !x.is_finite() || *x < -eps) {
            return Err(Error::OutsideFace {
                face: p.face,
                alpha: p.alpha.f64(),
                beta: p.beta.f64(),
            });
        }
        if w.iter().all(|x| *x >= T::zero()) {
            return Ok(*p);
        }
        Ok(MeshPoint::from_weights(p.face, w.map(|x| x.max(T::zero()))))
    }

    /// 3D position of a mesh point.
    pub fn embed(&self, p: &MeshPoint<T>) -> Vec3<T> {
        let [a, b, c] = self.corners(p.face);
        a * p.alpha + b * p.beta + c * p.gamma()
    }

    /// Checked variant of [`embed`](Self::embed).
    pub fn try_embed(&self, p: &MeshPoint<T>) -> Result<Vec3<T>> {
        self.check_face(p.face)?;
        Ok(self.embed(p))
    }

    /// A mesh point located at vertex `v`.
    pub fn vertex_point(&self, v: usize) -> MeshPoint<T> {
        let f = self.vertex_face[v];
        let mut w = [T::zero(); 3];
        w[self.corner_of(f, v).expect("vertex face")] = T::one();
        MeshPoint::from_weights(f, w)
    }

    /// Point at parameter `s` along edge `k` of face `f`.
    pub fn edge_point(&self, f: usize, k: usize, s: T) -> MeshPoint<T> {
        let mut w = [T::zero(); 3];
        w[k] = T::one() - s;
        w[(k + 1) % 3] = s;
        MeshPoint::new(f, w[0], w[1])
    }

    /// Canonical 2D layout of a face: vertex 0 at the origin, vertex 1 on the
    /// positive x axis, vertex 2 in the upper half plane. This is also the
    /// face's tangent frame.
    pub fn face_layout(&self, f: usize) -> [Vec2<T>; 3] {
        let l = self.edge_lengths[f];
        let (l01, l12, l20) = (l[0], l[1], l[2]);
        let p1 = Vec2::new(l01, T::zero());
        let p2 = if l01 > T::zero() {
            let x = (l20 * l20 - l12 * l12 + l01 * l01) / (T::two() * l01);
            let y = (l20 * l20 - x * x).max(T::zero()).sqrt();
            Vec2::new(x, y)
        } else {
            Vec2::new(T::zero(), l20)
        };
        [Vec2::zero(), p1, p2]
    }

    /// Corners of the neighbor across edge `k` of `f`, laid out in the plane
    /// of `f`'s canonical layout (hinged open along the shared edge).
    pub fn unfold_neighbor(&self, f: usize, k: usize) -> (usize, [Vec2<T>; 3]) {
        let lay = self.face_layout(f);
        let g = self.adjacency[f][k];
        let kk = self.shared_edge(g, f).expect("reciprocal adjacency");
        let a = lay[k];
        let b = lay[(k + 1) % 3];
        let mut out = [Vec2::zero(); 3];
        out[kk] = b;
        out[(kk + 1) % 3] = a;
        // third vertex lies right of a -> b
        let la = self.edge_lengths[g][(kk + 1) % 3];
        let lb = self.edge_lengths[g][(kk + 2) % 3];
        let ab = a - b;
        let l = ab.norm();
        let u = ab / l;
        let x = (lb * lb - la * la + l * l) / (T::two() * l);
        let y = (lb * lb - x * x).max(T::zero()).sqrt();
        out[(kk + 2) % 3] = b + u * x + u.perp() * y;
        (g, out)
    }

    /// Orthonormal 3D axes of the face's tangent frame.
    pub fn face_frame(&self, f: usize) -> (Vec3<T>, Vec3<T>) {
        let [a, b, _] = self.corners(f);
        let x = (b - a).normalized();
        let n = self.face_normal(f);
        (x, n.cross(x))
    }

    /// Converts a 2D direction in the frame of `f` to a 3D vector.
    pub fn frame_to_world(&self, f: usize, d: Vec2<T>) -> Vec3<T> {
        let (x, y) = self.face_frame(f);
        x * d.x + y * d.y
    }

    /// Projects a 3D vector onto the tangent frame of `f`.
    pub fn world_to_frame(&self, f: usize, d: Vec3<T>) -> Vec2<T> {
        let (x, y) = self.face_frame(f);
        Vec2::new(d.dot(x), d.dot(y))
    }

    /// Faces around vertex `v` in counter-clockwise order, starting from an
    /// arbitrary incident face.
    pub fn vertex_star(&self, v: usize) -> Vec<usize> {
        let start = self.vertex_face[v];
        let mut star = vec![start];
        let mut f = start;
        loop {
            let g = self.ccw_around(f, v);
            if g == start || g == NO_FACE || star.len() > self.triangles.len() {
                break;
            }
            star.push(g);
            f = g;
        }
        star
    }

    /// Next face counter-clockwise around vertex `v` from face `f`.
    #[inline]
    pub fn ccw_around(&self, f: usize, v: usize) -> usize {
        match self.corner_of(f, v) {
            Some(c) => self.adjacency[f][(c + 2) % 3],
            None => NO_FACE,
        }
    }

    /// Next face clockwise around vertex `v` from face `f`.
    #[inline]
    pub fn cw_around(&self, f: usize, v: usize) -> usize {
        match self.corner_of(f, v) {
            Some(c) => self.adjacency[f][c],
            None => NO_FACE,
        }
    }

    /// Interior angle of face `f` at corner `c`.
    pub fn corner_angle(&self, f: usize, c: usize) -> T {
        let l = self.face_layout(f);
        let p = l[c];
        let a = l[(c + 1) % 3] - p;
        let b = l[(c + 2) % 3] - p;
        a.angle_to(b).abs()
    }

    /// Sum of corner angles around vertex `v`.
    pub fn total_angle(&self, v: usize) -> T {
        self.vertex_star(v)
            .into_iter()
            .map(|f| self.corner_angle(f, self.corner_of(f, v).unwrap()))
            .sum()
    }

    /// Surface point closest to `p` (brute force over all faces).
    /// Among faces at the same distance the lowest index wins.
    pub fn closest_point(&self, p: Vec3<T>) -> MeshPoint<T> {
        let mut best = (T::infinity(), MeshPoint::centroid(0));
        for f in 0..self.num_faces() {
            let [a, b, c] = self.corners(f);
            let w = closest_on_triangle(p, a, b, c);
            let q = a * w[0] + b * w[1] + c * w[2];
            let d = q.distance(p);
            // ties (coincident faces) go to the lowest index
            if d < best.0 - T::geom_eps() * (T::one() + d) {
                best = (d, MeshPoint::from_weights(f, w));
            }
        }
        best.1
    }

    /// Mesh statistics as a JSON value.
    pub fn stats(&self, graph: Option<&DualGraph<T>>) -> serde_json::Value {
        let mut v = serde_json::json!({
            "triangles": self.num_faces(),
            "vertices": self.num_vertices(),
            "bbox_diag": self.bbox_diag().f64(),
            "longest_edge": self.longest_edge.f64(),
        });
        if let Some(g) = graph {
            v["dual_nodes"] = g.num_nodes().into();
            v["split_edges"] = g.split_edges().into();
            v["split_threshold"] = g.threshold().f64().into();
        }
        v
    }

    /// Converts the mesh to another scalar type.
    pub fn cast<U: Scalar>(&self) -> TriangleMesh<U> {
        TriangleMesh::new(
            self.positions.iter().map(|p| p.cast()).collect(),
            self.triangles.clone(),
        )
        .expect("a valid mesh stays valid under conversion")
    }
}

/// Barycentric weights of a 2D point with respect to a laid out triangle.
pub fn barycentric_in_layout<T: Scalar>(layout: &[Vec2<T>; 3], p: Vec2<T>) -> [T; 3] {
    let v0 = layout[1] - layout[0];
    let v1 = layout[2] - layout[0];
    let v2 = p - layout[0];
    let den = v0.cross(v1);
    if den.abs() <= T::min_positive_value() {
        return [T::one(), T::zero(), T::zero()];
    }
    let b = v2.cross(v1) / den;
    let c = v0.cross(v2) / den;
    [T::one() - b - c, b, c]
}

/// Barycentric weights of the point of triangle `abc` closest to `p`.
fn closest_on_triangle<T: Scalar>(p: Vec3<T>, a: Vec3<T>, b: Vec3<T>, c: Vec3<T>) -> [T; 3] {
    let (o, l) = (T::zero(), T::one());
    let ab = b - a;
    let ac = c - a;
    let ap = p - a;
    let d1 = ab.dot(ap);
    let d2 = ac.dot(ap);
    if d1 <= o && d2 <= o {
        return [l, o, o];
    }
    let bp = p - b;
    let d3 = ab.dot(bp);
    let d4 = ac.dot(bp);
    if d3 >= o && d4 <= d3 {
        return [o, l, o];
    }
    let vc = d1 * d4 - d3 * d2;
    if vc <= o && d1 >= o && d3 <= o {
        let v = d1 / (d1 - d3);
        return [l - v, v, o];
    }
    let cp = p - c;
    let d5 = ab.dot(cp);
    let d6 = ac.dot(cp);
    if d6 >= o && d5 <= d6 {
        return [o, o, l];
    }
    let vb = d5 * d2 - d1 * d6;
    if vb <= o && d2 >= o && d6 <= o {
        let w = d2 / (d2 - d6);
        return [l - w, o, w];
    }
    let va = d3 * d6 - d5 * d4;
    if va <= o && (d4 - d3) >= o && (d5 - d6) >= o {
        let w = (d4 - d3) / ((d4 - d3) + (d5 - d6));
        return [o, l - w, w];
    }
    let den = l / (va + vb + vc);
    let v = vb * den;
    let w = vc * den;
    [l - v - w, v, w]
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tetra() -> TriangleMesh<f64> {
        let p = vec![
            Vec3::new(0.0, 0.0, 0.0),
            Vec3::new(1.0, 0.0, 0.0),
            Vec3::new(0.0, 1.0, 0.0),
            Vec3::new(0.0, 0.0, 1.0),
        ];
        let t = vec![[0, 2, 1], [0, 1, 3], [1, 2, 3], [2, 0, 3]];
        TriangleMesh::new(p, t).unwrap()
    }

    #[test]
    fn tetrahedron_adjacency_is_reciprocal() {
        let m = tetra();
        for f in 0..m.num_faces() {
            for k in 0..3 {
                let g = m.neighbor(f, k);
                assert_ne!(g, NO_FACE);
                let back = m.shared_edge(g, f).unwrap();
                let (a, b) = (m.tri(f)[k], m.tri(f)[(k + 1) % 3]);
                let (c, d) = (m.tri(g)[back], m.tri(g)[(back + 1) % 3]);
                assert_eq!((a, b), (d, c));
            }
        }
    }

    #[test]
    fn vertex_stars_and_angles() {
        let m = tetra();
        for v in 0..4 {
            assert_eq!(m.vertex_star(v).len(), 3);
        }
        // corner at the origin: three right angles
        let total = m.total_angle(0);
        assert!((total - 1.5 * std::f64::consts::PI).abs() < 1e-12);
    }

    #[test]
    fn embed_vertex_centroid_and_edge_midpoint() {
        let p = vec![
            Vec3::new(0.0, 0.0, 0.0),
            Vec3::new(1.0, 0.0, 0.0),
            Vec3::new(0.0, 1.0, 0.0),
            Vec3::new(0.0, 0.0, -1.0),
        ];
        let t = vec![[0, 1, 2], [1, 0, 3], [2, 1, 3], [0, 2, 3]];
        let m = TriangleMesh::new(p, t).unwrap();
        assert_eq!(m.embed(&MeshPoint::new(0, 1.0, 0.0)), Vec3::new(0.0, 0.0, 0.0));
        let c = m.embed(&MeshPoint::new(0, 1.0 / 3.0, 1.0 / 3.0));
        assert!((c - Vec3::new(1.0 / 3.0, 1.0 / 3.0, 0.0)).norm() < 1e-15);
        let e = m.embed(&MeshPoint::new(0, 0.0, 0.5));
        assert!((e - Vec3::new(0.5, 0.5, 0.0)).norm() < 1e-15);
        assert!(matches!(m.try_embed(&MeshPoint::new(9, 0.0, 0.0)), Err(Error::InvalidFace(9))));
    }

    #[test]
    fn check_point_clamps_and_rejects() {
        let m = tetra();
        let ok = m.check_point(&MeshPoint::new(0, -1e-12, 0.5)).unwrap();
        assert!(ok.alpha >= 0.0);
        assert!(m.check_point(&MeshPoint::new(0, -1e-3, 0.5)).is_err());
        assert!(m.check_point(&MeshPoint::new(0, 0.7, 0.7)).is_err());
    }

    #[test]
    fn layout_preserves_lengths() {
        let m = tetra();
        for f in 0..m.num_faces() {
            let l = m.face_layout(f);
            for k in 0..3 {
                let d = (l[(k + 1) % 3] - l[k]).norm();
                assert!((d - m.edge_length(f, k)).abs() < 1e-12);
            }
            assert!((l[1] - l[0]).cross(l[2] - l[0]) > 0.0);
        }
    }

    #[test]
    fn rejects_open_and_nonmanifold() {
        let p = vec![
            Vec3::new(0.0, 0.0, 0.0),
            Vec3::new(1.0, 0.0, 0.0),
            Vec3::new(0.0, 1.0, 0.0),
            Vec3::new(1.0, 1.0, 0.0),
        ];
        let open = TriangleMesh::new(p.clone(), vec![[0, 1, 2], [1, 3, 2]]);
        assert!(matches!(open, Err(Error::NotWatertight(_))));
        let flipped = TriangleMesh::new(p, vec![[0, 1, 2], [0, 1, 3]]);
        assert!(matches!(flipped, Err(Error::NonManifold(_))));
    }

    #[test]
    fn bowtie_vertex_is_nonmanifold() {
        // two tetrahedra glued at a single vertex
        let mut p = vec![
            Vec3::new(0.0, 0.0, 0.0),
            Vec3::new(1.0, 0.0, 0.0),
            Vec3::new(0.0, 1.0, 0.0),
            Vec3::new(0.0, 0.0, 1.0),
        ];
        p.extend([
            Vec3::new(-1.0, 0.0, 0.0),
            Vec3::new(0.0, -1.0, 0.0),
            Vec3::new(0.0, 0.0, -1.0),
        ]);
        let t = vec![
            [0, 2, 1],
            [0, 1, 3],
            [1, 2, 3],
            [2, 0, 3],
            [0, 4, 5],
            [0, 6, 4],
            [4, 6, 5],
            [5, 6, 0],
        ];
        assert!(matches!(TriangleMesh::new(p, t), Err(Error::NonManifold(_))));
    }
}
