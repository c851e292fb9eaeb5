use serde::{Deserialize, Serialize};

use crate::mesh::{MeshPoint, TriangleMesh};
use crate::scalar::Scalar;
use crate::vector::Vec3;

/// A surface polyline between two mesh points, stored as a triangle strip
/// and the parameters where it crosses the strip's inner edges.
///
/// `lerps[i]` locates the crossing of the edge shared by `strip[i]` and
/// `strip[i + 1]`, as a parameter along that edge oriented as in
/// `strip[i]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeodesicPath<T> {
    pub start: MeshPoint<T>,
    pub end: MeshPoint<T>,
    pub strip: Vec<usize>,
    pub lerps: Vec<T>,
    pub length: T,
}

/// JSON export of a path.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PathExport {
    pub strip: Vec<usize>,
    pub intercepts: Vec<f64>,
    pub points3d: Vec<[f64; 3]>,
    pub length: f64,
}

impl<T: Scalar> GeodesicPath<T> {
    /// Builds a path and computes its length.
    pub fn from_parts(
        mesh: &TriangleMesh<T>,
        start: MeshPoint<T>,
        end: MeshPoint<T>,
        strip: Vec<usize>,
        lerps: Vec<T>,
    ) -> Self {
        debug_assert_eq!(lerps.len() + 1, strip.len());
        let mut path = Self {
            start,
            end,
            strip,
            lerps,
            length: T::zero(),
        };
        path.length = path.points3d(mesh).windows(2).map(|w| w[0].distance(w[1])).sum();
        path
    }

    /// Zero-length path at `p`.
    pub fn trivial(p: MeshPoint<T>) -> Self {
        Self {
            start: p,
            end: p,
            strip: vec![p.face],
            lerps: Vec::new(),
            length: T::zero(),
        }
    }

    /// Crossing point `i` as a mesh point in `strip[i]`.
    pub fn crossing(&self, mesh: &TriangleMesh<T>, i: usize) -> MeshPoint<T> {
        let f = self.strip[i];
        let k = mesh.shared_edge(f, self.strip[i + 1]).expect("valid strip");
        mesh.edge_point(f, k, self.lerps[i])
    }

    /// Start, crossing points and end, in 3D.
    pub fn points3d(&self, mesh: &TriangleMesh<T>) -> Vec<Vec3<T>> {
        let mut pts = Vec::with_capacity(self.lerps.len() + 2);
        pts.push(mesh.embed(&self.start));
        for i in 0..self.lerps.len() {
            pts.push(mesh.embed(&self.crossing(mesh, i)));
        }
        pts.push(mesh.embed(&self.end));
        pts
    }

    /// Polyline vertices as mesh points: start, crossings, end.
    pub fn mesh_points(&self, mesh: &TriangleMesh<T>) -> Vec<MeshPoint<T>> {
        let mut pts = Vec::with_capacity(self.lerps.len() + 2);
        pts.push(self.start);
        for i in 0..self.lerps.len() {
            pts.push(self.crossing(mesh, i));
        }
        pts.push(self.end);
        pts
    }

    /// Endpoints of segment `i` as barycentric weights in `strip[i]`.
    fn segment(&self, mesh: &TriangleMesh<T>, i: usize) -> ([T; 3], [T; 3]) {
        let f = self.strip[i];
        let a = if i == 0 {
            self.start.weights()
        } else {
            let k = mesh.shared_edge(f, self.strip[i - 1]).expect("valid strip");
            mesh.edge_point(f, k, T::one() - self.lerps[i - 1]).weights()
        };
        let b = if i + 1 == self.strip.len() {
            self.end.weights()
        } else {
            mesh.edge_point(f, mesh.shared_edge(f, self.strip[i + 1]).expect("valid strip"), self.lerps[i])
                .weights()
        };
        (a, b)
    }

    /// Point at fractional arc length `w`.
    pub fn point_at(&self, mesh: &TriangleMesh<T>, w: T) -> MeshPoint<T> {
        self.locate(mesh, w).0
    }

    /// Point at fractional arc length `w` and the index of the segment (and
    /// strip face) that contains it.
    pub fn locate(&self, mesh: &TriangleMesh<T>, w: T) -> (MeshPoint<T>, usize) {
        let last = self.strip.len() - 1;
        if w <= T::zero() {
            return (self.start, 0);
        }
        if w >= T::one() {
            return (self.end, last);
        }
        let pts = self.points3d(mesh);
        let lens: Vec<T> = pts.windows(2).map(|p| p[0].distance(p[1])).collect();
        let total: T = lens.iter().copied().sum();
        let target = w * total;
        let mut acc = T::zero();
        for (i, &l) in lens.iter().enumerate() {
            if acc + l >= target && l > T::zero() {
                let t = ((target - acc) / l).clamp01();
                let (a, b) = self.segment(mesh, i);
                let wts = [
                    a[0] + (b[0] - a[0]) * t,
                    a[1] + (b[1] - a[1]) * t,
                    a[2] + (b[2] - a[2]) * t,
                ];
                return (MeshPoint::from_weights(self.strip[i], wts.map(|x| x.max(T::zero()))), i);
            }
            acc = acc + l;
        }
        (self.end, last)
    }

    /// The same path traversed backwards.
    pub fn reversed(&self) -> Self {
        let mut strip = self.strip.clone();
        strip.reverse();
        let lerps = self.lerps.iter().rev().map(|&s| T::one() - s).collect();
        Self {
            start: self.end,
            end: self.start,
            strip,
            lerps,
            length: self.length,
        }
    }

    /// Portion of the path between fractional arc lengths `w0 <= w1`.
    pub fn subpath(&self, mesh: &TriangleMesh<T>, w0: T, w1: T) -> Self {
        let (a, i0) = self.locate(mesh, w0);
        let (b, i1) = self.locate(mesh, w1);
        if i1 < i0 {
            return Self::trivial(a);
        }
        Self::from_parts(
            mesh,
            a,
            b,
            self.strip[i0..=i1].to_vec(),
            self.lerps[i0..i1].to_vec(),
        )
    }

    /// Number of triangles crossed.
    pub fn num_faces(&self) -> usize {
        self.strip.len()
    }

    pub fn export(&self, mesh: &TriangleMesh<T>) -> PathExport {
        PathExport {
            strip: self.strip.clone(),
            intercepts: self.lerps.iter().map(|x| x.f64()).collect(),
            points3d: self
                .points3d(mesh)
                .into_iter()
                .map(|p| [p.x.f64(), p.y.f64(), p.z.f64()])
                .collect(),
            length: self.length.f64(),
        }
    }
}
