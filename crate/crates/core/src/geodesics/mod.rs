//! Geodesic primitives: locally shortest paths (strip search, funnel,
//! straightening), straightest geodesics, parallel transport and the
//! manifold average.

mod funnel;
mod path;
mod straighten;
mod straightest;
mod strip;

use serde::{Deserialize, Serialize};

pub use path::{GeodesicPath, PathExport};
pub(crate) use strip::remove_loops;

use crate::error::Result;
use crate::mesh::{DualGraph, MeshPoint, TriangleMesh};
use crate::scalar::Scalar;
use crate::vector::Vec2;


/// A tangent vector at a surface point, in the tangent frame of the point's
/// face (x along the face's first edge).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TangentVector<T> {
    pub at: MeshPoint<T>,
    pub dir: Vec2<T>,
}

/// A mesh together with its dual graph: everything the metric queries need.
#[derive(Debug, Clone)]
pub struct Surface<T> {
    mesh: TriangleMesh<T>,
    graph: DualGraph<T>,
}

impl<T: Scalar> Surface<T> {
    /// Wraps a mesh and builds its dual graph with the default split fraction.
    pub fn new(mesh: TriangleMesh<T>) -> Self {
        let graph = DualGraph::new(&mesh);
        Self { mesh, graph }
    }

    pub fn with_split_fraction(mesh: TriangleMesh<T>, split_fraction: T) -> Self {
        let graph = DualGraph::with_split_fraction(&mesh, split_fraction);
        Self { mesh, graph }
    }

    #[inline]
    pub fn mesh(&self) -> &TriangleMesh<T> {
        &self.mesh
    }

    #[inline]
    pub fn graph(&self) -> &DualGraph<T> {
        &self.graph
    }

    /// Triangle strip from `p.face` to `q.face` found on the dual graph.
    pub fn initial_strip(&self, p: &MeshPoint<T>, q: &MeshPoint<T>) -> Result<Vec<usize>> {
        let p = self.mesh.check_point(p)?;
        let q = self.mesh.check_point(q)?;
        if p.face == q.face {
            return Ok(vec![p.face]);
        }
        let (nodes, _) = strip::search(&self.mesh, &self.graph, &p, &q)?;
        Ok(strip::nodes_to_strip(&self.graph, &nodes))
    }

    /// Cost of the dual graph route used by [`initial_strip`](Self::initial_strip).
    pub fn strip_cost(&self, p: &MeshPoint<T>, q: &MeshPoint<T>) -> Result<T> {
        let p = self.mesh.check_point(p)?;
        let q = self.mesh.check_point(q)?;
        Ok(strip::search(&self.mesh, &self.graph, &p, &q)?.1)
    }

    /// Shortest path from `p` to `q` constrained to `strip`, without
    /// straightening.
    pub fn funnel_shortest(&self, strip: &[usize], p: &MeshPoint<T>, q: &MeshPoint<T>) -> Result<GeodesicPath<T>> {
        let p = self.mesh.check_point(p)?;
        let q = self.mesh.check_point(q)?;
        Ok(funnel::funnel(&self.mesh, strip, &p, &q)?.path)
    }

    /// Vertices where the funnel path through `strip` bends.
    pub fn pseudo_sources(&self, strip: &[usize], p: &MeshPoint<T>, q: &MeshPoint<T>) -> Result<Vec<usize>> {
        let out = funnel::funnel(&self.mesh, strip, p, q)?;
        Ok(out.apexes[1..out.apexes.len() - 1].iter().map(|a| a.id).collect())
    }

    /// Straightens a path by rerouting its strip around the vertices where
    /// it turns. The result is never longer than the input.
    pub fn straighten(&self, path: &GeodesicPath<T>) -> Result<GeodesicPath<T>> {
        Ok(self.straighten_counted(path)?.0)
    }

    /// As [`straighten`](Self::straighten), also returning the number of
    /// reroutes attempted.
    pub fn straighten_counted(&self, path: &GeodesicPath<T>) -> Result<(GeodesicPath<T>, usize)> {
        let out = funnel::funnel(&self.mesh, &path.strip, &path.start, &path.end)?;
        let (out, n) = straighten::straighten(&self.mesh, out, &path.start, &path.end)?;
        if out.path.length > path.length {
            return Ok((path.clone(), n));
        }
        Ok((out.path, n))
    }

    /// Funnel followed by straightening on a given strip.
    pub fn shortest_path_in_strip(
        &self,
        p: &MeshPoint<T>,
        q: &MeshPoint<T>,
        strip: &[usize],
    ) -> Result<GeodesicPath<T>> {
        let p = self.mesh.check_point(p)?;
        let q = self.mesh.check_point(q)?;
        if strip.len() == 1 && p.face == q.face && strip[0] == p.face {
            return Ok(self.same_face(p, q));
        }
        let out = funnel::funnel(&self.mesh, strip, &p, &q)?;
        Ok(straighten::straighten(&self.mesh, out, &p, &q)?.0.path)
    }

    fn same_face(&self, p: MeshPoint<T>, q: MeshPoint<T>) -> GeodesicPath<T> {
        GeodesicPath::from_parts(&self.mesh, p, q, vec![p.face], Vec::new())
    }

    /// Locally shortest path between two points: strip search, funnel and
    /// straightening.
    pub fn shortest_path(&self, p: &MeshPoint<T>, q: &MeshPoint<T>) -> Result<GeodesicPath<T>> {
        let p = self.mesh.check_point(p)?;
        let q = self.mesh.check_point(q)?;
        if p.face == q.face {
            return Ok(self.same_face(p, q));
        }
        let strip = self.initial_strip(&p, &q)?;
        let out = funnel::funnel(&self.mesh, &strip, &p, &q)?;
        Ok(straighten::straighten(&self.mesh, out, &p, &q)?.0.path)
    }

    /// Length of [`shortest_path`](Self::shortest_path).
    pub fn distance(&self, p: &MeshPoint<T>, q: &MeshPoint<T>) -> Result<T> {
        Ok(self.shortest_path(p, q)?.length)
    }

    /// Point at fraction `w` of the shortest path from `p` to `q`.
    pub fn manifold_average(&self, p: &MeshPoint<T>, q: &MeshPoint<T>, w: T) -> Result<MeshPoint<T>> {
        if w <= T::zero() {
            return self.mesh.check_point(p);
        }
        if w >= T::one() {
            return self.mesh.check_point(q);
        }
        Ok(self.shortest_path(p, q)?.point_at(&self.mesh, w))
    }

    /// Straightest geodesic of length `len` from `from` along `dir`, given
    /// in the frame of `from.face`.
    pub fn straightest_geodesic(&self, from: &MeshPoint<T>, dir: Vec2<T>, len: T) -> Result<GeodesicPath<T>> {
        let from = self.mesh.check_point(from)?;
        Ok(straightest::trace(&self.mesh, &from, dir, len))
    }

    /// Unit tangent of a path at its start, in the frame of `path.start.face`.
    /// Zero for a zero-length path.
    pub fn start_tangent(&self, path: &GeodesicPath<T>) -> Vec2<T> {
        let unf = match funnel::unfold_from_start(&self.mesh, &path.strip) {
            Ok(u) => u,
            Err(_) => return Vec2::zero(),
        };
        let s = path.start.in_layout(&unf.pos[0]);
        let tiny = T::geom_eps() * (T::one() + path.length);
        for i in 0..path.lerps.len() {
            let k = self.mesh.shared_edge(path.strip[i], path.strip[i + 1]).expect("valid strip");
            let p = unf.pos[i][k].lerp(unf.pos[i][(k + 1) % 3], path.lerps[i]);
            if (p - s).norm() > tiny {
                return (p - s).normalized();
            }
        }
        let e = path.end.in_layout(&unf.pos[path.strip.len() - 1]);
        if (e - s).norm() > T::zero() {
            (e - s).normalized()
        } else {
            Vec2::zero()
        }
    }

    /// Unit tangent of a path at its end, pointing forward, in the frame of
    /// `path.end.face`.
    pub fn end_tangent(&self, path: &GeodesicPath<T>) -> Vec2<T> {
        -self.start_tangent(&path.reversed())
    }

    /// Transports a vector given in the frame of `path.strip[0]` along the
    /// path into the frame of its last face.
    pub fn transport_along(&self, dir: Vec2<T>, path: &GeodesicPath<T>) -> Result<Vec2<T>> {
        self.transport_through(dir, &path.strip)
    }

    fn transport_through(&self, dir: Vec2<T>, strip: &[usize]) -> Result<Vec2<T>> {
        if strip.len() == 1 {
            return Ok(dir);
        }
        let unf = funnel::unfold_from_start(&self.mesh, strip)?;
        let last = unf.pos[unf.pos.len() - 1];
        let psi = (last[1] - last[0]).angle();
        Ok(dir.rotate(-psi))
    }

    /// Re-expresses a vector at a point shared by faces `f` and `g` (an edge
    /// or vertex point) from the frame of `f` into the frame of `g`. Around a
    /// vertex the shorter fan is used.
    pub fn change_face(&self, dir: Vec2<T>, f: usize, g: usize) -> Result<Vec2<T>> {
        if f == g {
            return Ok(dir);
        }
        if self.mesh.shared_edge(f, g).is_some() {
            return self.transport_through(dir, &[f, g]);
        }
        let v = self
            .mesh
            .tri(f)
            .into_iter()
            .find(|&v| self.mesh.corner_of(g, v).is_some())
            .ok_or_else(|| crate::error::Error::InvalidParameter(format!("faces {f} and {g} do not touch")))?;
        self.transport_through(dir, &straightest::fan_between(&self.mesh, f, g, v))
    }

    /// Parallel transport of `v` to `to` along the shortest path.
    pub fn parallel_transport(&self, v: &TangentVector<T>, to: &MeshPoint<T>) -> Result<TangentVector<T>> {
        let to = self.mesh.check_point(to)?;
        if v.at.face == to.face {
            return Ok(TangentVector { at: to, dir: v.dir });
        }
        let path = self.shortest_path(&v.at, &to)?;
        Ok(TangentVector {
            at: to,
            dir: self.transport_along(v.dir, &path)?,
        })
    }

    /// Rotation angle from the frame of `from.face` to the frame of
    /// `to.face` along the shortest path (zero within a face).
    pub fn transport_angle(&self, from: &MeshPoint<T>, to: &MeshPoint<T>) -> Result<T> {
        let t = self.parallel_transport(
            &TangentVector {
                at: *from,
                dir: Vec2::new(T::one(), T::zero()),
            },
            to,
        )?;
        Ok(t.dir.angle())
    }
}

#[cfg(test)]
mod tests;
