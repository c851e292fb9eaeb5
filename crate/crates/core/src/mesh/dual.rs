use super::TriangleMesh;
use crate::scalar::Scalar;
use crate::vector::Vec3;

/// Default split threshold as a fraction of the bounding box diagonal.
pub const DEFAULT_SPLIT_FRACTION: f64 = 0.05;

const MIN_ARC: f64 = 1e-12;

/// Dual graph of a mesh, optionally augmented by virtually bisecting long
/// edges.
///
/// A face whose edges are all short is a single node with the same index as
/// the face. A face with split edges is fanned from its centroid over its
/// boundary sub-edges; the first fan triangle keeps the face index and the
/// others get fresh ids past `num_faces`. The mesh itself is not modified.
#[derive(Debug, Clone)]
pub struct DualGraph<T> {
    refs: Vec<Vec3<T>>,
    provenance: Vec<usize>,
    arc_start: Vec<usize>,
    arcs: Vec<(usize, T)>,
    // per face: first extra node id and sub-edge counts per edge
    extra: Vec<usize>,
    subdiv: Vec<[u32; 3]>,
    threshold: T,
    split_edges: usize,
}

impl<T: Scalar> DualGraph<T> {
    /// Builds the graph with the default split fraction.
    pub fn new(mesh: &TriangleMesh<T>) -> Self {
        Self::with_split_fraction(mesh, T::of(DEFAULT_SPLIT_FRACTION))
    }

    /// Builds the graph, bisecting every edge longer than
    /// `split_fraction * bbox_diag` until all its pieces are below that.
    pub fn with_split_fraction(mesh: &TriangleMesh<T>, split_fraction: T) -> Self {
        let nf = mesh.num_faces();
        let threshold = if split_fraction > T::zero() {
            split_fraction * mesh.bbox_diag()
        } else {
            T::infinity()
        };

        let mut subdiv = vec![[1u32; 3]; nf];
        let mut split_edges = 0;
        for f in 0..nf {
            for k in 0..3 {
                let mut len = mesh.edge_length(f, k);
                let mut n = 1u32;
                while len > threshold && n < (1 << 20) {
                    len = len * T::half();
                    n *= 2;
                }
                subdiv[f][k] = n;
                if n > 1 && f < mesh.neighbor(f, k) {
                    split_edges += 1;
                }
            }
        }

        let mut extra = vec![0usize; nf];
        let mut next = nf;
        for f in 0..nf {
            extra[f] = next;
            let total = subdiv[f].iter().sum::<u32>() as usize;
            if total > 3 {
                next += total - 1;
            }
        }
        let num_nodes = next;

        let mut refs = vec![Vec3::zero(); num_nodes];
        // reference points as barycentric weights in their face
        let mut bary = vec![[T::zero(); 3]; num_nodes];
        let mut provenance = vec![0usize; num_nodes];
        let mut adj: Vec<Vec<usize>> = vec![Vec::new(); num_nodes];

        let graph_shell = Self {
            refs: Vec::new(),
            provenance: Vec::new(),
            arc_start: Vec::new(),
            arcs: Vec::new(),
            extra,
            subdiv,
            threshold,
            split_edges,
        };

        for f in 0..nf {
            let corners = mesh.corners(f);
            let c = mesh.centroid(f);
            let counts = graph_shell.subdiv[f];
            let total: usize = counts.iter().map(|&n| n as usize).sum();
            if total == 3 {
                refs[f] = c;
                bary[f] = [T::one() / T::of(3.0); 3];
                provenance[f] = f;
            } else {
                for k in 0..3 {
                    let a = corners[k];
                    let b = corners[(k + 1) % 3];
                    let n = counts[k] as usize;
                    for s in 0..n {
                        let id = graph_shell.node(f, k, s);
                        let inv = T::one() / T::of_usize(n);
                        let p0 = a.lerp(b, T::of_usize(s) * inv);
                        let p1 = a.lerp(b, T::of_usize(s + 1) * inv);
                        refs[id] = (c + p0 + p1) / T::of(3.0);
                        let third = T::one() / T::of(3.0);
                        let mut w = [third / T::of(3.0); 3];
                        let (t0, t1) = (T::of_usize(s) * inv, T::of_usize(s + 1) * inv);
                        w[k] = w[k] + (T::two() - t0 - t1) * third;
                        w[(k + 1) % 3] = w[(k + 1) % 3] + (t0 + t1) * third;
                        bary[id] = w;
                        provenance[id] = f;
                    }
                }
                // fan arcs around the centroid
                let ids: Vec<usize> = (0..3)
                    .flat_map(|k| (0..counts[k] as usize).map(move |s| (k, s)))
                    .map(|(k, s)| graph_shell.node(f, k, s))
                    .collect();
                for i in 0..ids.len() {
                    let (u, v) = (ids[i], ids[(i + 1) % ids.len()]);
                    adj[u].push(v);
                    adj[v].push(u);
                }
            }
        }

        let mut cross: std::collections::HashMap<(usize, usize), T> = std::collections::HashMap::new();
        for f in 0..nf {
            for k in 0..3 {
                let g = mesh.neighbor(f, k);
                if g < f {
                    continue;
                }
                let kk = mesh.shared_edge(g, f).expect("reciprocal adjacency");
                let n = graph_shell.subdiv[f][k] as usize;
                debug_assert_eq!(n, graph_shell.subdiv[g][kk] as usize);
                for s in 0..n {
                    let u = graph_shell.node(f, k, s);
                    let v = graph_shell.node(g, kk, n - 1 - s);
                    adj[u].push(v);
                    adj[v].push(u);
                }
                // lengths across the edge are measured in the unfolding of
                // the two faces, so they never undercut the surface metric
                let lay_f = mesh.face_layout(f);
                let (_, lay_g) = mesh.unfold_neighbor(f, k);
                let at = |lay: &[crate::vector::Vec2<T>; 3], w: [T; 3]| lay[0] * w[0] + lay[1] * w[1] + lay[2] * w[2];
                for s in 0..n {
                    let u = graph_shell.node(f, k, s);
                    for s2 in 0..n {
                        let v = graph_shell.node(g, kk, s2);
                        if adj[u].contains(&v) {
                            let d = (at(&lay_f, bary[u]) - at(&lay_g, bary[v])).norm();
                            cross.insert((u.min(v), u.max(v)), d);
                        }
                    }
                }
            }
        }

        let mut arc_start = Vec::with_capacity(num_nodes + 1);
        let mut arcs = Vec::new();
        for (u, list) in adj.iter_mut().enumerate() {
            list.sort_unstable();
            list.dedup();
            arc_start.push(arcs.len());
            for &v in list.iter() {
                let d = match cross.get(&(u.min(v), u.max(v))) {
                    Some(&d) => d,
                    None => refs[u].distance(refs[v]),
                };
                let d = d.max(T::of(MIN_ARC));
                arcs.push((v, d));
            }
        }
        arc_start.push(arcs.len());

        Self {
            refs,
            provenance,
            arc_start,
            arcs,
            ..graph_shell
        }
    }

    /// Node for sub-edge `s` of edge `k` of face `f`.
    #[inline]
    fn node(&self, f: usize, k: usize, s: usize) -> usize {
        let c = self.subdiv[f];
        if c == [1, 1, 1] {
            return f;
        }
        let pos = c[..k].iter().map(|&n| n as usize).sum::<usize>() + s;
        if pos == 0 {
            f
        } else {
            self.extra[f] + pos - 1
        }
    }

    #[inline]
    pub fn num_nodes(&self) -> usize {
        self.refs.len()
    }

    /// Number of mesh edges that were virtually split.
    pub fn split_edges(&self) -> usize {
        self.split_edges
    }

    pub fn threshold(&self) -> T {
        self.threshold
    }

    /// Reference point of node `u` (centroid of its sub-triangle).
    #[inline]
    pub fn reference(&self, u: usize) -> Vec3<T> {
        self.refs[u]
    }

    /// Mesh face a node belongs to.
    #[inline]
    pub fn provenance(&self, u: usize) -> usize {
        self.provenance[u]
    }

    /// Outgoing arcs of `u` as (target, length), sorted by target.
    #[inline]
    pub fn arcs(&self, u: usize) -> &[(usize, T)] {
        &self.arcs[self.arc_start[u]..self.arc_start[u + 1]]
    }

    /// All nodes representing face `f`.
    pub fn face_nodes(&self, f: usize) -> impl Iterator<Item = usize> + '_ {
        let total: usize = self.subdiv[f].iter().map(|&n| n as usize).sum();
        let extra = if total > 3 { total - 1 } else { 0 };
        std::iter::once(f).chain(self.extra[f]..self.extra[f] + extra)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::shapes;

    #[test]
    fn fine_mesh_has_one_node_per_face() {
        let m = shapes::icosphere::<f64>(2, 1.0);
        let g = DualGraph::new(&m);
        // icosphere level 2 edges are ~0.3, diag ~3.46; threshold 0.17 splits.
        // with a loose fraction nothing is split
        let loose = DualGraph::with_split_fraction(&m, 0.5);
        assert_eq!(loose.num_nodes(), m.num_faces());
        assert_eq!(loose.split_edges(), 0);
        assert!(g.num_nodes() > m.num_faces());
    }

    #[test]
    fn one_long_edge_is_bisected_twice() {
        // a thin tetrahedron with one edge 3x the threshold
        let p = vec![
            Vec3::new(0.0, 0.0, 0.0),
            Vec3::new(3.0, 0.0, 0.0),
            Vec3::new(1.5, 0.4, 0.0),
            Vec3::new(1.5, 0.2, 0.4),
        ];
        let t = vec![[0, 2, 1], [0, 1, 3], [1, 2, 3], [2, 0, 3]];
        let m = TriangleMesh::new(p, t).unwrap();
        let frac = 1.0 / m.bbox_diag();
        let g = DualGraph::with_split_fraction(&m, frac);
        // threshold 1.0: the edge (0, 1) of length 3 needs two bisection levels
        assert_eq!(g.threshold(), 1.0);
        // edge 0 of face 1 is the long edge (0, 1)
        assert_eq!(g.subdiv[1][0], 4);
        assert_eq!(g.subdiv[0][2], 4);
        assert_eq!(g.face_nodes(0).count(), g.subdiv[0].iter().sum::<u32>() as usize);
        assert!(g.num_nodes() > m.num_faces());
        for u in 0..g.num_nodes() {
            for &(_, d) in g.arcs(u) {
                assert!(d > 0.0);
            }
        }
    }

    #[test]
    fn arcs_are_symmetric_and_cross_adjacent_faces() {
        let m = shapes::noisy_sphere::<f64>(2, 1.0, 0.05, 3);
        let g = DualGraph::new(&m);
        for u in 0..g.num_nodes() {
            for &(v, d) in g.arcs(u) {
                let back = g.arcs(v).iter().find(|a| a.0 == u).expect("symmetric arc");
                assert_eq!(back.1, d);
                let (fu, fv) = (g.provenance(u), g.provenance(v));
                assert!(fu == fv || m.shared_edge(fu, fv).is_some());
            }
        }
    }

    #[test]
    fn graph_is_connected() {
        let m = shapes::torus::<f64>(12, 8, 1.0, 0.4);
        let g = DualGraph::with_split_fraction(&m, 0.02);
        let mut seen = vec![false; g.num_nodes()];
        let mut stack = vec![0];
        seen[0] = true;
        while let Some(u) = stack.pop() {
            for &(v, _) in g.arcs(u) {
                if !seen[v] {
                    seen[v] = true;
                    stack.push(v);
                }
            }
        }
        assert!(seen.iter().all(|&s| s));
    }
}
