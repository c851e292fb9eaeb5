//! Bookkeeping for subdivision steps: every point produced by a manifold
//! average stays tethered to the path it was taken on, so later segments
//! can start from a known route instead of a fresh graph search.
//!
//! A segment built from a route is never longer than the route: the funnel
//! inside the route's strip cannot do worse than the route itself, and
//! straightening only shortens. This is what keeps the schemes contractive
//! in practice, since the contractivity bounds are all stated in terms of
//! such routes.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::Result;
use crate::geodesics::{remove_loops, GeodesicPath, Surface};
use crate::mesh::MeshPoint;
use crate::scalar::Scalar;

struct Piece<T> {
    a: usize,
    b: usize,
    path: GeodesicPath<T>,
}

pub(crate) struct Web<'s, T> {
    surface: &'s Surface<T>,
    points: Vec<MeshPoint<T>>,
    links: Vec<Vec<usize>>,
    pieces: Vec<Piece<T>>,
}

impl<'s, T: Scalar> Web<'s, T> {
    pub fn new(surface: &'s Surface<T>) -> Self {
        Self {
            surface,
            points: Vec::new(),
            links: Vec::new(),
            pieces: Vec::new(),
        }
    }

    /// A web over a polygon whose consecutive points are joined by `segments`.
    pub fn from_polygon(surface: &'s Surface<T>, points: &[MeshPoint<T>], segments: &[GeodesicPath<T>]) -> Self {
        let mut web = Self::new(surface);
        for &p in points {
            web.add_point(p);
        }
        for (i, s) in segments.iter().enumerate() {
            web.add_piece(i, i + 1, s.clone());
        }
        web
    }

    pub fn add_point(&mut self, p: MeshPoint<T>) -> usize {
        self.points.push(p);
        self.links.push(Vec::new());
        self.points.len() - 1
    }

    pub fn add_piece(&mut self, a: usize, b: usize, path: GeodesicPath<T>) {
        let id = self.pieces.len();
        self.pieces.push(Piece { a, b, path });
        self.links[a].push(id);
        if a != b {
            self.links[b].push(id);
        }
    }

    #[inline]
    pub fn point(&self, id: usize) -> MeshPoint<T> {
        self.points[id]
    }

    fn oriented(&self, piece: usize, from: usize) -> GeodesicPath<T> {
        let p = &self.pieces[piece];
        if p.a == from {
            p.path.clone()
        } else {
            p.path.reversed()
        }
    }

    fn other(&self, piece: usize, from: usize) -> usize {
        let p = &self.pieces[piece];
        if p.a == from {
            p.b
        } else {
            p.a
        }
    }

    /// Shortest stored piece joining `a` and `b`, oriented from `a`.
    pub fn piece(&self, a: usize, b: usize) -> Option<GeodesicPath<T>> {
        self.links[a]
            .iter()
            .copied()
            .filter(|&id| self.other(id, a) == b)
            .min_by(|&x, &y| self.pieces[x].path.length.partial_cmp(&self.pieces[y].path.length).unwrap_or(Ordering::Equal))
            .map(|id| self.oriented(id, a))
    }

    /// Path from `a` to `b`: a stored piece if there is one, otherwise a new
    /// segment seeded from the shortest chain of pieces (which is stored).
    pub fn path(&mut self, a: usize, b: usize) -> Result<GeodesicPath<T>> {
        if a == b {
            return Ok(GeodesicPath::trivial(self.points[a]));
        }
        if let Some(p) = self.piece(a, b) {
            return Ok(p);
        }
        let route = self.route(a, b);
        let path = connect(self.surface, &self.points[a], &self.points[b], &route)?;
        self.add_piece(a, b, path.clone());
        Ok(path)
    }

    /// Manifold average: the point at fraction `w` of the path from `a` to
    /// `b`. Both halves of the path are kept as pieces.
    pub fn average(&mut self, a: usize, b: usize, w: T) -> Result<usize> {
        if w <= T::zero() || a == b {
            return Ok(a);
        }
        if w >= T::one() {
            return Ok(b);
        }
        let path = self.path(a, b)?;
        let mesh = self.surface.mesh();
        let x = path.point_at(mesh, w);
        let left = path.subpath(mesh, T::zero(), w);
        let right = path.subpath(mesh, w, T::one());
        let id = self.add_point(x);
        self.add_piece(a, id, left);
        self.add_piece(id, b, right);
        Ok(id)
    }

    /// Chain of pieces from `a` to `b` of least total length (Dijkstra over
    /// the web). Empty if the two points are not tethered.
    fn route(&self, a: usize, b: usize) -> Vec<GeodesicPath<T>> {
        #[derive(PartialEq)]
        struct Item(f64, usize);
        impl Eq for Item {}
        impl PartialOrd for Item {
            fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
                Some(self.cmp(o))
            }
        }
        impl Ord for Item {
            fn cmp(&self, o: &Self) -> Ordering {
                o.0.total_cmp(&self.0).then(o.1.cmp(&self.1))
            }
        }
        let n = self.points.len();
        let mut dist = vec![f64::INFINITY; n];
        let mut via: Vec<Option<usize>> = vec![None; n];
        let mut heap = BinaryHeap::new();
        dist[a] = 0.0;
        heap.push(Item(0.0, a));
        while let Some(Item(d, u)) = heap.pop() {
            if u == b {
                break;
            }
            if d > dist[u] {
                continue;
            }
            for &id in &self.links[u] {
                let v = self.other(id, u);
                let nd = d + self.pieces[id].path.length.f64();
                if nd < dist[v] {
                    dist[v] = nd;
                    via[v] = Some(id);
                    heap.push(Item(nd, v));
                }
            }
        }
        if via[b].is_none() {
            return Vec::new();
        }
        let mut chain = Vec::new();
        let mut v = b;
        while v != a {
            let id = via[v].expect("route reaches the source");
            let u = self.other(id, v);
            chain.push(self.oriented(id, u));
            v = u;
        }
        chain.reverse();
        chain
    }
}

/// Joins the strips of consecutive route pieces, cutting out loops.
fn route_strip<T: Scalar>(route: &[GeodesicPath<T>]) -> Vec<usize> {
    remove_loops(route.iter().flat_map(|p| p.strip.iter().copied()))
}

/// The route itself as one path; it passes through the joints only when
/// they are not already on the straight line inside the shared face.
fn concatenate<T: Scalar>(surface: &Surface<T>, route: &[GeodesicPath<T>]) -> Option<GeodesicPath<T>> {
    let mut strip = route[0].strip.clone();
    let mut lerps = route[0].lerps.clone();
    for piece in &route[1..] {
        if piece.strip[0] != *strip.last()? {
            return None;
        }
        strip.extend_from_slice(&piece.strip[1..]);
        lerps.extend_from_slice(&piece.lerps);
    }
    let (a, b) = (route[0].start, route.last()?.end);
    Some(GeodesicPath::from_parts(surface.mesh(), a, b, strip, lerps))
}

/// Shortest path from `a` to `b` seeded from a route of known pieces; falls
/// back to a full search when the route gives nothing usable.
pub(crate) fn connect<T: Scalar>(
    surface: &Surface<T>,
    a: &MeshPoint<T>,
    b: &MeshPoint<T>,
    route: &[GeodesicPath<T>],
) -> Result<GeodesicPath<T>> {
    if route.is_empty() {
        return surface.shortest_path(a, b);
    }
    let bound: T = route.iter().map(|p| p.length).sum();
    let slack = T::geom_eps() * (T::one() + bound);
    fn keep<T: Scalar>(best: &mut Option<GeodesicPath<T>>, p: GeodesicPath<T>) {
        if best.as_ref().map_or(true, |b| p.length < b.length) {
            *best = Some(p);
        }
    }
    let mut best: Option<GeodesicPath<T>> = None;
    let strip = route_strip(route);
    if strip.first() == Some(&a.face) && strip.last() == Some(&b.face) {
        if let Ok(p) = surface.shortest_path_in_strip(a, b, &strip) {
            keep(&mut best, p);
        }
    }
    if best.as_ref().map_or(false, |p| p.length <= bound + slack) {
        return Ok(best.unwrap());
    }
    if let Some(p) = concatenate(surface, route) {
        keep(&mut best, p);
    }
    if let Ok(p) = surface.shortest_path(a, b) {
        keep(&mut best, p);
    }
    match best {
        Some(p) => Ok(p),
        None => surface.shortest_path(a, b),
    }
}
