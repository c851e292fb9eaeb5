use std::cmp::Ordering;
use std::collections::BinaryHeap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::mesh::shapes;
use crate::vector::Vec3;

fn flat(n: usize, size: f64) -> Surface<f64> {
    Surface::new(shapes::pillow(n, size))
}

fn top_point(s: &Surface<f64>, x: f64, y: f64) -> MeshPoint<f64> {
    s.mesh().closest_point(Vec3::new(x, y, 0.0))
}

fn random_top(s: &Surface<f64>, rng: &mut ChaCha8Rng, size: f64) -> MeshPoint<f64> {
    let x = rng.gen_range(0.1..0.9) * size;
    let y = rng.gen_range(0.1..0.9) * size;
    top_point(s, x, y)
}

#[test]
fn same_and_adjacent_faces() {
    let s = flat(4, 1.0);
    let p = MeshPoint::new(0, 0.2, 0.3);
    let q = MeshPoint::new(0, 0.5, 0.1);
    assert_eq!(s.initial_strip(&p, &q).unwrap(), vec![0]);
    let path = s.shortest_path(&p, &p).unwrap();
    assert_eq!(path.length, 0.0);
    assert_eq!(path.strip, vec![0]);
    let g = s.mesh().neighbor(0, 1);
    let r = MeshPoint::centroid(g);
    assert_eq!(s.initial_strip(&p, &r).unwrap(), vec![0, g]);
}

#[test]
fn flat_lengths_are_euclidean() {
    let s = flat(12, 3.0);
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for _ in 0..200 {
        let p = random_top(&s, &mut rng, 3.0);
        let q = random_top(&s, &mut rng, 3.0);
        let path = s.shortest_path(&p, &q).unwrap();
        let d = s.mesh().embed(&p).distance(s.mesh().embed(&q));
        assert!((path.length - d).abs() <= 1e-9 * d.max(1e-12), "{} vs {}", path.length, d);
        // the cached length matches the polyline
        let pts = path.points3d(s.mesh());
        let l: f64 = pts.windows(2).map(|w| w[0].distance(w[1])).sum();
        assert!((l - path.length).abs() <= 1e-9 * (1.0 + l));
    }
}

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

/// Plain Dijkstra with the same endpoint costs as the strip search.
fn dijkstra(s: &Surface<f64>, p: &MeshPoint<f64>, q: &MeshPoint<f64>) -> f64 {
    let g = s.graph();
    let src = s.mesh().embed(p);
    let dst = s.mesh().embed(q);
    let mut dist = vec![f64::INFINITY; g.num_nodes()];
    let mut heap = BinaryHeap::new();
    for u in g.face_nodes(p.face) {
        dist[u] = g.reference(u).distance(src);
        heap.push(Item(dist[u], u));
    }
    while let Some(Item(d, u)) = heap.pop() {
        if d > dist[u] {
            continue;
        }
        for &(v, w) in g.arcs(u) {
            if d + w < dist[v] {
                dist[v] = d + w;
                heap.push(Item(dist[v], v));
            }
        }
    }
    g.face_nodes(q.face)
        .map(|u| dist[u] + g.reference(u).distance(dst))
        .fold(f64::INFINITY, f64::min)
}

#[test]
fn strip_cost_matches_dijkstra() {
    let s = flat(10, 1.0);
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for _ in 0..100 {
        let p = random_top(&s, &mut rng, 1.0);
        let q = random_top(&s, &mut rng, 1.0);
        if p.face == q.face {
            continue;
        }
        let a = s.strip_cost(&p, &q).unwrap();
        let b = dijkstra(&s, &p, &q);
        assert!((a - b).abs() < 1e-12, "{a} vs {b}");
    }
}

#[test]
fn strips_are_connected_on_split_graphs() {
    let s = Surface::with_split_fraction(shapes::noisy_sphere::<f64>(2, 1.0, 0.1, 4), 0.02);
    assert!(s.graph().num_nodes() > s.mesh().num_faces());
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let n = s.mesh().num_faces();
    for _ in 0..50 {
        let p = MeshPoint::centroid(rng.gen_range(0..n));
        let q = MeshPoint::centroid(rng.gen_range(0..n));
        let strip = s.initial_strip(&p, &q).unwrap();
        assert_eq!(strip[0], p.face);
        assert_eq!(*strip.last().unwrap(), q.face);
        for w in strip.windows(2) {
            assert!(s.mesh().shared_edge(w[0], w[1]).is_some());
        }
    }
}

fn cube_center(s: &Surface<f64>, c: [f64; 3]) -> MeshPoint<f64> {
    s.mesh().closest_point(Vec3::new(c[0], c[1], c[2]))
}

#[test]
fn cube_face_centers() {
    for res in [1, 2, 3] {
        let s = Surface::new(shapes::cube::<f64>(res));
        let a = cube_center(&s, [0.5, 0.5, 0.0]);
        let b = cube_center(&s, [1.0, 0.5, 0.5]);
        let c = cube_center(&s, [0.5, 0.5, 1.0]);
        let ab = s.shortest_path(&a, &b).unwrap();
        assert!((ab.length - 1.0).abs() < 1e-9, "res {res}: {}", ab.length);
        let ac = s.shortest_path(&a, &c).unwrap();
        assert!((ac.length - 2.0).abs() < 1e-9, "res {res}: {}", ac.length);
    }
}

#[test]
fn funnel_is_no_longer_than_strip_midpoints() {
    let s = Surface::new(shapes::noisy_sphere::<f64>(3, 1.0, 0.08, 9));
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let n = s.mesh().num_faces();
    for _ in 0..50 {
        let p = MeshPoint::centroid(rng.gen_range(0..n));
        let q = MeshPoint::centroid(rng.gen_range(0..n));
        let strip = s.initial_strip(&p, &q).unwrap();
        let path = s.funnel_shortest(&strip, &p, &q).unwrap();
        let mids = vec![0.5; strip.len() - 1];
        let poly = GeodesicPath::from_parts(s.mesh(), p, q, strip.clone(), mids);
        assert!(path.length <= poly.length + 1e-12);
        let straight = s.straighten(&path).unwrap();
        assert!(straight.length <= path.length + 1e-12);
    }
}

#[test]
fn flat_funnel_needs_no_straightening() {
    // strips traced along the segment itself contain it, so the funnel is
    // already straight and no vertex qualifies for a reroute
    let s = flat(10, 1.0);
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for _ in 0..100 {
        let p = random_top(&s, &mut rng, 1.0);
        let q = random_top(&s, &mut rng, 1.0);
        if p.face == q.face {
            continue;
        }
        let (a, b) = (s.mesh().embed(&p), s.mesh().embed(&q));
        let frame = s.mesh().world_to_frame(p.face, b - a);
        let traced = s.straightest_geodesic(&p, frame, a.distance(b)).unwrap();
        assert_eq!(traced.end.face, q.face);
        let path = s.funnel_shortest(&traced.strip, &p, &q).unwrap();
        let (out, iters) = s.straighten_counted(&path).unwrap();
        assert_eq!(iters, 0);
        assert_eq!(out, path);
        assert!((path.length - a.distance(b)).abs() < 1e-9);
    }
}

#[test]
fn flat_straightening_reaches_the_segment_from_graph_strips() {
    let s = flat(10, 1.0);
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for _ in 0..100 {
        let p = random_top(&s, &mut rng, 1.0);
        let q = random_top(&s, &mut rng, 1.0);
        let strip = s.initial_strip(&p, &q).unwrap();
        let path = s.funnel_shortest(&strip, &p, &q).unwrap();
        let out = s.straighten(&path).unwrap();
        let d = s.mesh().embed(&p).distance(s.mesh().embed(&q));
        assert!(out.length <= path.length + 1e-12);
        assert!((out.length - d).abs() < 1e-9 * (1.0 + d));
    }
}

#[test]
fn straightening_goes_round_the_short_side_of_a_cone() {
    let n = 12;
    // flat enough that the long way round spans more than pi
    let s = Surface::new(shapes::cone::<f64>(n, 1.0, 0.5));
    let apex = n;
    assert!(s.mesh().total_angle(apex) * 9.0 / 12.0 > std::f64::consts::PI);
    // side faces are 0..n, fanned counter-clockwise around the apex
    let p = MeshPoint::centroid(0);
    let q = MeshPoint::centroid(3);
    let mut long = vec![0];
    let mut f = 0;
    while f != 3 {
        f = s.mesh().cw_around(f, apex);
        long.push(f);
    }
    assert_eq!(long.len(), n - 2);
    let path = s.funnel_shortest(&long, &p, &q).unwrap();
    assert!(s.pseudo_sources(&long, &p, &q).unwrap().contains(&apex));
    let straight = s.straighten(&path).unwrap();
    assert!(straight.length < path.length - 1e-3);
    assert!(straight.strip.len() < long.len());
    let best = s.shortest_path(&p, &q).unwrap();
    assert!((straight.length - best.length).abs() < 1e-9);
}

#[test]
fn point_at_lies_on_the_polyline() {
    let s = Surface::new(shapes::icosphere::<f64>(3, 1.0));
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let n = s.mesh().num_faces();
    let p = MeshPoint::new(rng.gen_range(0..n), 0.2, 0.3);
    let q = MeshPoint::new(rng.gen_range(0..n), 0.6, 0.1);
    let path = s.shortest_path(&p, &q).unwrap();
    assert_eq!(path.point_at(s.mesh(), 0.0), path.start);
    assert_eq!(path.point_at(s.mesh(), 1.0), path.end);
    let pts = path.points3d(s.mesh());
    for _ in 0..100 {
        let w = rng.gen_range(0.0..1.0);
        let x = s.mesh().embed(&path.point_at(s.mesh(), w));
        let d = pts
            .windows(2)
            .map(|seg| {
                let (a, b) = (seg[0], seg[1]);
                let ab = b - a;
                let t = if ab.norm_squared() > 0.0 {
                    ((x - a).dot(ab) / ab.norm_squared()).clamp(0.0, 1.0)
                } else {
                    0.0
                };
                (a + ab * t).distance(x)
            })
            .fold(f64::INFINITY, f64::min);
        assert!(d < 1e-9);
    }
}

#[test]
fn flat_average_is_the_affine_combination() {
    let s = flat(8, 2.0);
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for _ in 0..50 {
        let p = random_top(&s, &mut rng, 2.0);
        let q = random_top(&s, &mut rng, 2.0);
        let w = rng.gen_range(0.0..1.0);
        let m = s.manifold_average(&p, &q, w).unwrap();
        let want = s.mesh().embed(&p).lerp(s.mesh().embed(&q), w);
        assert!(s.mesh().embed(&m).distance(want) < 1e-9);
        assert_eq!(s.manifold_average(&p, &q, 0.0).unwrap(), p);
        assert_eq!(m, s.manifold_average(&p, &q, w).unwrap());
    }
}

#[test]
fn subpath_and_reverse() {
    let s = Surface::new(shapes::torus::<f64>(24, 12, 1.0, 0.35));
    let p = MeshPoint::new(3, 0.3, 0.3);
    let q = MeshPoint::new(301, 0.1, 0.5);
    let path = s.shortest_path(&p, &q).unwrap();
    let r = path.reversed();
    assert_eq!(r.start, q);
    assert!((r.length - path.length).abs() < 1e-12);
    let pts: Vec<_> = path.points3d(s.mesh()).into_iter().rev().collect();
    for (a, b) in pts.iter().zip(r.points3d(s.mesh())) {
        assert!(a.distance(b) < 1e-12);
    }
    let sub = path.subpath(s.mesh(), 0.25, 0.75);
    assert!((sub.length - 0.5 * path.length).abs() < 1e-9);
}

#[test]
fn straightest_on_flat_plane() {
    let s = flat(10, 10.0);
    let from = top_point(&s, 3.3, 5.2);
    // bottom-right triangles of the grid have their first edge along +x
    let (x, _) = s.mesh().face_frame(from.face);
    let dir = s.mesh().world_to_frame(from.face, Vec3::new(1.0, 0.0, 0.0));
    assert!(x.x > 0.7);
    let path = s.straightest_geodesic(&from, dir, 2.0).unwrap();
    let end = s.mesh().embed(&path.end);
    assert!(end.distance(Vec3::new(5.3, 5.2, 0.0)) < 1e-9, "{end:?}");
    assert!((path.length - 2.0).abs() < 1e-9);
    let zero = s.straightest_geodesic(&from, dir, 0.0).unwrap();
    assert_eq!(zero.end, from);
    assert_eq!(zero.length, 0.0);
}

#[test]
fn straightest_through_a_vertex_on_flat_plane() {
    let s = flat(10, 10.0);
    let from = top_point(&s, 2.5, 2.5);
    // aim exactly at the grid vertex (4, 4) and beyond
    let dir = s.mesh().world_to_frame(from.face, Vec3::new(1.0, 1.0, 0.0));
    let path = s.straightest_geodesic(&from, dir, 3.0 * 2f64.sqrt()).unwrap();
    let end = s.mesh().embed(&path.end);
    assert!(end.distance(Vec3::new(5.5, 5.5, 0.0)) < 1e-9, "{end:?}");
}

#[test]
fn straightest_wraps_round_a_cylinder() {
    let n = 64;
    let s = Surface::new(shapes::capped_cylinder::<f64>(n, 4, 1.0, 2.0));
    let circumference = n as f64 * 2.0 * (std::f64::consts::PI / n as f64).sin();
    let start = s.mesh().closest_point(Vec3::new(0.99, 0.05, 1.1));
    let p = s.mesh().embed(&start);
    let tangent = Vec3::new(-p.y, p.x, 0.0).normalized();
    let dir = s.mesh().world_to_frame(start.face, tangent);
    let path = s.straightest_geodesic(&start, dir, circumference).unwrap();
    let gap = s.mesh().embed(&path.end).distance(p);
    assert!(gap < 1e-3 * circumference, "gap {gap}");
}

#[test]
fn transport_is_identity_within_a_face_and_keeps_norms() {
    let s = Surface::new(shapes::noisy_sphere::<f64>(2, 1.0, 0.1, 11));
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let n = s.mesh().num_faces();
    let v = TangentVector {
        at: MeshPoint::new(5, 0.2, 0.2),
        dir: Vec2::new(0.3, -1.7),
    };
    let same = s.parallel_transport(&v, &MeshPoint::new(5, 0.5, 0.4)).unwrap();
    assert_eq!(same.dir, v.dir);
    for _ in 0..100 {
        let to = MeshPoint::new(rng.gen_range(0..n), 0.3, 0.3);
        let t = s.parallel_transport(&v, &to).unwrap();
        assert!((t.dir.norm() - v.dir.norm()).abs() < 1e-12);
    }
}

#[test]
fn flat_transport_keeps_the_world_direction() {
    let s = flat(10, 1.0);
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for _ in 0..50 {
        let a = random_top(&s, &mut rng, 1.0);
        let b = random_top(&s, &mut rng, 1.0);
        let c = random_top(&s, &mut rng, 1.0);
        let v = TangentVector {
            at: a,
            dir: Vec2::from_angle(rng.gen_range(0.0..6.28)),
        };
        let w = s.parallel_transport(&v, &b).unwrap();
        let wa = s.mesh().frame_to_world(a.face, v.dir);
        let wb = s.mesh().frame_to_world(b.face, w.dir);
        assert!(wa.distance(wb) < 1e-9);
        // closed loop a -> b -> c -> a
        let x = s.parallel_transport(&w, &c).unwrap();
        let y = s.parallel_transport(&x, &a).unwrap();
        assert!(v.dir.angle_to(y.dir).abs() < 1e-9);
    }
}

#[test]
fn tangents_point_along_the_path() {
    let s = flat(6, 1.0);
    let p = top_point(&s, 0.2, 0.2);
    let q = top_point(&s, 0.8, 0.5);
    let path = s.shortest_path(&p, &q).unwrap();
    let t0 = s.mesh().frame_to_world(p.face, s.start_tangent(&path));
    let t1 = s.mesh().frame_to_world(q.face, s.end_tangent(&path));
    let want = Vec3::new(0.6, 0.3, 0.0).normalized();
    assert!(t0.distance(want) < 1e-9);
    assert!(t1.distance(want) < 1e-9);
}

#[test]
fn geodesics_work_in_single_precision() {
    let s = Surface::new(shapes::pillow::<f32>(8, 1.0));
    let p = s.mesh().closest_point(Vec3::new(0.15, 0.2, 0.0));
    let q = s.mesh().closest_point(Vec3::new(0.85, 0.7, 0.0));
    let path = s.shortest_path(&p, &q).unwrap();
    let d = s.mesh().embed(&p).distance(s.mesh().embed(&q));
    assert!((path.length - d).abs() < 1e-5);
}
