use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::euclid::{bezier_eval, bspline_eval, de_boor, de_casteljau_split, open_uniform_knots, refine_open_uniform};
use super::*;
use crate::mesh::shapes;
use crate::vector::{Vec2, Vec3};

const SIZE: f64 = 4.0;

fn flat() -> Surface<f64> {
    Surface::new(shapes::pillow(16, SIZE))
}

fn at(s: &Surface<f64>, x: f64, y: f64) -> MeshPoint<f64> {
    s.mesh().closest_point(Vec3::new(x, y, 0.0))
}

fn xy(s: &Surface<f64>, p: &MeshPoint<f64>) -> Vec2<f64> {
    let v = s.mesh().embed(p);
    Vec2::new(v.x, v.y)
}

fn random_points(rng: &mut ChaCha8Rng, n: usize) -> Vec<Vec2<f64>> {
    (0..n)
        .map(|_| Vec2::new(rng.gen_range(0.3..SIZE - 0.3), rng.gen_range(0.3..SIZE - 0.3)))
        .collect()
}

fn polygon(s: &Surface<f64>, pts: &[Vec2<f64>]) -> ControlPolygon<f64> {
    let m: Vec<_> = pts.iter().map(|p| at(s, p.x, p.y)).collect();
    ControlPolygon::new(s, &m).unwrap()
}

fn close(a: Vec2<f64>, b: Vec2<f64>, tol: f64) -> bool {
    (a - b).norm() <= tol
}

#[test]
fn de_casteljau_cubic_example() {
    let s = flat();
    let pts = [(0.5, 0.5), (0.5, 3.5), (3.5, 3.5), (3.5, 0.5)].map(|(x, y)| Vec2::new(x, y));
    let p = polygon(&s, &pts);
    let v = decasteljau_eval(&s, &p, 0.5).unwrap();
    assert!(close(xy(&s, &v), Vec2::new(2.0, 2.75), 1e-12));
    assert_eq!(decasteljau_eval(&s, &p, 0.0).unwrap(), p.first());
    assert_eq!(decasteljau_eval(&s, &p, 1.0).unwrap(), p.last());
}

#[test]
fn de_casteljau_matches_bernstein_on_the_plane() {
    let s = flat();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for k in 1..=5 {
        for _ in 0..10 {
            let pts = random_points(&mut rng, k + 1);
            let p = polygon(&s, &pts);
            let t = rng.gen_range(0.0..1.0);
            let v = decasteljau_eval(&s, &p, t).unwrap();
            assert!(close(xy(&s, &v), bezier_eval(&pts, t), 1e-9), "k={k} t={t}");
        }
    }
}

#[test]
fn degree_elevation_example_and_curve() {
    let s = flat();
    let pts = [(0.5, 0.5), (2.5, 2.5), (4.5 - 1.0, 0.5)].map(|(x, y)| Vec2::new(x, y));
    let p = polygon(&s, &pts);
    let e = degree_elevate(&s, &p).unwrap();
    assert_eq!(e.degree(), 3);
    assert_eq!(e.first(), p.first());
    assert_eq!(e.last(), p.last());
    let got: Vec<_> = e.points().iter().map(|q| xy(&s, q)).collect();
    // (0,0),(2,2),(3,0) shifted by (0.5,0.5)
    let want = [(0.5, 0.5), (0.5 + 4.0 / 3.0, 0.5 + 4.0 / 3.0), (0.5 + 7.0 / 3.0, 0.5 + 4.0 / 3.0), (3.5, 0.5)];
    for (g, w) in got.iter().zip(want) {
        assert!(close(*g, Vec2::new(w.0, w.1), 1e-12), "{g:?} vs {w:?}");
    }
    for j in 0..=20 {
        let t = j as f64 / 20.0;
        assert!(close(bezier_eval(&got, t), bezier_eval(&pts, t), 1e-12));
    }
}

#[test]
fn split_matches_euclidean_subdivision() {
    let s = flat();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for k in [2, 3, 4] {
        for _ in 0..5 {
            let pts = random_points(&mut rng, k + 1);
            let p = polygon(&s, &pts);
            let (l, r) = rdc_split(&s, &p).unwrap();
            let (el, er) = de_casteljau_split(&pts, 0.5);
            for (q, e) in l.points().iter().zip(&el).chain(r.points().iter().zip(&er)) {
                assert!(close(xy(&s, q), *e, 1e-9));
            }
            assert_eq!(l.last(), r.first());
            assert!(l.max_segment_length() <= 0.5 * p.max_segment_length() + 1e-9);
            assert!(r.max_segment_length() <= 0.5 * p.max_segment_length() + 1e-9);
            // the input segments are reused, not recomputed
            assert_eq!(l.first(), p.first());
            assert_eq!(r.last(), p.last());
        }
    }
}

#[test]
fn uniform_segment_counts() {
    let s = flat();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let pts = random_points(&mut rng, 4);
    let p = polygon(&s, &pts);
    let c = rdc_trace(&s, &p, TraceMode::Uniform { depth: 4 }).unwrap();
    assert_eq!(c.num_segments(), 48);
    assert_eq!(c.nodes.len(), 49);
    let c = olr_trace(&s, &p, TraceMode::Uniform { depth: 6 }).unwrap();
    assert_eq!(c.nodes.len(), 67);
    assert_eq!(c.num_segments(), 66);
    let q = polygon(&s, &pts[..3]);
    for n in 0..6 {
        let c = olr_trace(&s, &q, TraceMode::Uniform { depth: n }).unwrap();
        assert_eq!(c.nodes.len(), (1 << n) + 2);
    }
}

#[test]
fn uniform_depth_formula() {
    assert_eq!(uniform_depth(10.0, 1.0), 4);
    assert_eq!(uniform_depth(8.0, 1.0), 3);
    assert_eq!(uniform_depth(0.5, 1.0), 0);
}

#[test]
fn traced_curve_chains_and_stays_on_the_mesh() {
    let s = flat();
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let p = polygon(&s, &random_points(&mut rng, 4));
    for scheme in [Scheme::Rdc, Scheme::Olr] {
        let c = trace(&s, &p, scheme, TraceMode::adaptive_degrees(5.0)).unwrap();
        assert_eq!(c.nodes[0], p.first());
        assert_eq!(*c.nodes.last().unwrap(), p.last());
        for w in c.segments.windows(2) {
            assert_eq!(w[0].end, w[1].start);
        }
        for (n, seg) in c.nodes.iter().zip(&c.segments) {
            assert_eq!(*n, seg.start);
        }
        for q in &c.flat_polyline {
            assert!(s.mesh().check_point(q).is_ok());
        }
        let mut obj = Vec::new();
        c.write_obj(s.mesh(), &mut obj).unwrap();
        let text = String::from_utf8(obj).unwrap();
        assert_eq!(text.lines().filter(|l| l.starts_with("v ")).count(), c.flat_polyline.len());
        assert_eq!(text.lines().filter(|l| l.starts_with("l ")).count(), 1);
    }
}

#[test]
fn rdc_junctions_lie_on_the_curve() {
    let s = flat();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for k in [2, 3] {
        let pts = random_points(&mut rng, k + 1);
        let p = polygon(&s, &pts);
        let d = 5;
        let c = rdc_trace(&s, &p, TraceMode::Uniform { depth: d }).unwrap();
        for (m, node) in c.nodes.iter().step_by(k).enumerate() {
            let t = m as f64 / (1 << d) as f64;
            assert!(close(xy(&s, node), bezier_eval(&pts, t), 1e-9));
        }
    }
}

#[test]
fn adaptive_rdc_junctions_and_leaves_on_the_plane() {
    let s = flat();
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let pts = random_points(&mut rng, 4);
    let p = polygon(&s, &pts);
    let leaves = rdc::leaves(&s, &p, TraceMode::adaptive_degrees(5.0)).unwrap();
    assert!(leaves.len() > 1);
    // each leaf is the Bézier polygon of its piece of the curve
    let mut a = 0.0;
    for leaf in &leaves {
        let lp: Vec<_> = leaf.points().iter().map(|q| xy(&s, q)).collect();
        assert!(close(lp[0], bezier_eval(&pts, a), 1e-9));
        a = leaf_end(&pts, a, &lp);
    }
    assert!((a - 1.0).abs() < 1e-12);
}

/// Parameter of a leaf's end point: the smallest dyadic `b > a` whose curve
/// point is the leaf's last point.
fn leaf_end(pts: &[Vec2<f64>], a: f64, leaf: &[Vec2<f64>]) -> f64 {
    for d in 0..=MAX_DEPTH {
        let h = 1.0 / (1u64 << d) as f64;
        let b = a + h;
        if b <= 1.0 + 1e-15 && (bezier_eval(pts, b) - leaf[leaf.len() - 1]).norm() < 1e-9 {
            let (l, _) = de_casteljau_split(pts, b);
            let (_, piece) = de_casteljau_split(&l, a / b);
            for (x, y) in piece.iter().zip(leaf) {
                assert!((*x - *y).norm() < 1e-9);
            }
            return b;
        }
    }
    panic!("leaf end is not a dyadic curve point");
}

#[test]
fn rdc_point_eval_on_the_plane() {
    let s = flat();
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let pts = random_points(&mut rng, 4);
    let p = polygon(&s, &pts);
    for mode in [TraceMode::Uniform { depth: 3 }, TraceMode::adaptive_degrees(5.0)] {
        for _ in 0..10 {
            let t = rng.gen_range(0.0..1.0);
            let v = rdc_point_eval(&s, &p, t, mode).unwrap();
            assert!(close(xy(&s, &v), bezier_eval(&pts, t), 1e-6));
        }
    }
    let mode = TraceMode::Uniform { depth: 3 };
    assert_eq!(rdc_point_eval(&s, &p, 0.0, mode).unwrap(), p.first());
    let c = rdc_trace(&s, &p, mode).unwrap();
    for m in 0..=8 {
        let v = rdc_point_eval(&s, &p, m as f64 / 8.0, mode).unwrap();
        assert_eq!(v, c.nodes[3 * m]);
    }
}

#[test]
fn olr_levels_match_knot_insertion() {
    let s = flat();
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    for k in [2, 3] {
        let pts = random_points(&mut rng, k + 1);
        let mut p = polygon(&s, &pts);
        let mut e = pts.clone();
        for n in 0..5 {
            p = olr_subdivide(&s, &p, n).unwrap();
            e = refine_open_uniform(&e, k, n);
            assert_eq!(p.points().len(), e.len());
            for (q, x) in p.points().iter().zip(&e) {
                assert!(close(xy(&s, q), *x, 1e-9));
            }
        }
    }
}

#[test]
fn olr_level_one_is_the_midpoint_polygon() {
    let s = flat();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let pts = random_points(&mut rng, 4);
    let p = olr_subdivide(&s, &polygon(&s, &pts), 0).unwrap();
    let want = [pts[0], (pts[0] + pts[1]) * 0.5, (pts[1] + pts[2]) * 0.5, (pts[2] + pts[3]) * 0.5, pts[3]];
    for (q, w) in p.points().iter().zip(want) {
        assert!(close(xy(&s, q), w, 1e-9));
    }
}

#[test]
fn olr_stencil_example() {
    // level-1 points 0, 8, 16 (1D) at columns 1..3
    let row = refinement_row(3, 1, 3);
    let v: f64 = row.iter().map(|&(c, w)| w * [0.0, 0.0, 8.0, 16.0, 0.0][c]).sum();
    assert_eq!(v, 8.0);
}

#[test]
fn olr_uniform_nodes_reproduce_the_curve() {
    let s = flat();
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for k in [2, 3] {
        let pts = random_points(&mut rng, k + 1);
        let p = polygon(&s, &pts);
        let n = 5;
        let c = olr_trace(&s, &p, TraceMode::Uniform { depth: n }).unwrap();
        let nodes: Vec<_> = c.nodes.iter().map(|q| xy(&s, q)).collect();
        let knots = open_uniform_knots::<f64>(k, n);
        for j in 0..=40 {
            let t = j as f64 / 40.0;
            let v = bspline_eval(&nodes, &knots, k, t * (1 << n) as f64);
            assert!(close(v, bezier_eval(&pts, t), 1e-9));
        }
    }
}

#[test]
fn olr_point_eval_on_the_plane() {
    let s = flat();
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for k in [2, 3] {
        let pts = random_points(&mut rng, k + 1);
        let p = polygon(&s, &pts);
        for mode in [TraceMode::Uniform { depth: 3 }, TraceMode::adaptive_degrees(5.0)] {
            for _ in 0..8 {
                let t = rng.gen_range(0.0..1.0);
                let v = olr_point_eval(&s, &p, t, mode).unwrap();
                assert!(close(xy(&s, &v), bezier_eval(&pts, t), 1e-6), "k={k} t={t}");
            }
            assert_eq!(olr_point_eval(&s, &p, 0.0, mode).unwrap(), p.first());
            assert_eq!(olr_point_eval(&s, &p, 1.0, mode).unwrap(), p.last());
        }
    }
}

#[test]
fn de_boor_example() {
    // uniform cubic 0, 6, 6, 0 at the middle of its span: (0 + 4*6 + 6)/6 ... at u = 1/2
    let s = flat();
    let pts: Vec<_> = [0.0, 6.0, 6.0, 0.0].iter().map(|&x| Vec2::new(0.5 + x * 0.5, 1.0)).collect();
    let p = polygon(&s, &pts);
    let knots = [-2.0, -1.0, 0.0, 1.0, 2.0, 3.0];
    let v = deboor_eval(&s, &p, &knots, 0.5).unwrap();
    // closed form: basis weights 1/48, 23/48, 23/48, 1/48
    let x = (0.0 * 1.0 + 6.0 * 23.0 + 6.0 * 23.0 + 0.0) / 48.0;
    assert!(close(xy(&s, &v), Vec2::new(0.5 + 0.5 * x, 1.0), 1e-12));
    let e = de_boor(&pts, &knots, 0.5);
    assert!(close(xy(&s, &v), e, 1e-12));
}

#[test]
fn de_boor_end_knot_is_the_end_point() {
    let s = flat();
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    let pts = random_points(&mut rng, 4);
    let p = polygon(&s, &pts);
    let v = deboor_eval(&s, &p, &[0.0, 0.0, 0.0, 1.0, 1.0, 1.0], 0.0).unwrap();
    assert_eq!(v, p.first());
}

#[test]
fn conversion_examples_on_the_plane() {
    let s = flat();
    let off = Vec2::new(0.5, 0.5);
    let pts: Vec<_> = [(0.0, 0.0), (3.0, 0.0), (3.0, 3.0), (0.0, 3.0)].iter().map(|&(x, y)| Vec2::new(x, y) + off).collect();
    let p = polygon(&s, &pts);
    let q = bspline_to_bezier(&s, &p, KnotCase::Uniform).unwrap();
    let want = [(2.5, 0.5), (3.0, 1.0), (3.0, 2.0), (2.5, 2.5)];
    for (a, w) in q.points().iter().zip(want) {
        assert!(close(xy(&s, a), Vec2::new(w.0, w.1) + off, 1e-9));
    }
    let q = bspline_to_bezier(&s, &p, KnotCase::OpenNonuniform).unwrap();
    let want = [(0.0, 0.0), (3.0, 0.0), (3.0, 1.5), (2.5, 2.25)];
    for (a, w) in q.points().iter().zip(want) {
        assert!(close(xy(&s, a), Vec2::new(w.0, w.1) + off, 1e-9));
    }
}

#[test]
fn generic_conversion_matches_knot_insertion() {
    let s = flat();
    let mut rng = ChaCha8Rng::seed_from_u64(15);
    for (k, knots) in [(3, vec![0.0, 0.0, 0.0, 1.0, 2.0, 2.0]), (2, vec![0.0, 0.0, 1.0, 2.0]), (3, vec![0.0, 1.0, 2.0, 3.0, 4.0, 5.0])] {
        let pts = random_points(&mut rng, k + 1);
        let p = polygon(&s, &pts);
        let q = convert::segment_to_bezier(&s, &p, &knots).unwrap();
        let qs: Vec<_> = q.points().iter().map(|x| xy(&s, x)).collect();
        let (a, b) = (knots[k - 1], knots[k]);
        for j in 0..=20 {
            let u = j as f64 / 20.0;
            let e = de_boor(&pts, &knots, a + (b - a) * u);
            assert!(close(bezier_eval(&qs, u), e, 1e-9));
        }
    }
}

#[test]
fn insertion_is_exact_on_the_plane() {
    let s = flat();
    let mut rng = ChaCha8Rng::seed_from_u64(16);
    for k in [2, 3] {
        for scheme in [Scheme::Rdc, Scheme::Olr] {
            for mode in [TraceMode::Uniform { depth: 2 }, TraceMode::adaptive_degrees(5.0)] {
                let pts = random_points(&mut rng, k + 1);
                let p = polygon(&s, &pts);
                let t = rng.gen_range(0.05..0.95);
                let (l, r) = insert(&s, &p, t, scheme, mode).unwrap();
                assert_eq!(l.first(), p.first());
                assert_eq!(r.last(), p.last());
                assert_eq!(l.last(), r.first());
                let lp: Vec<_> = l.points().iter().map(|x| xy(&s, x)).collect();
                let rp: Vec<_> = r.points().iter().map(|x| xy(&s, x)).collect();
                for j in 0..=50 {
                    let u = j as f64 / 50.0;
                    let want_l = bezier_eval(&pts, u * t);
                    let want_r = bezier_eval(&pts, t + u * (1.0 - t));
                    assert!(close(bezier_eval(&lp, u), want_l, 1e-9), "{scheme:?} k={k} {mode:?}");
                    assert!(close(bezier_eval(&rp, u), want_r, 1e-9), "{scheme:?} k={k} {mode:?}");
                }
            }
        }
    }
}

#[test]
fn insertion_at_a_split_point() {
    let s = flat();
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    let pts = random_points(&mut rng, 4);
    let p = polygon(&s, &pts);
    let mode = TraceMode::Uniform { depth: 3 };
    for scheme in [Scheme::Rdc, Scheme::Olr] {
        let (l, r) = insert(&s, &p, 0.25, scheme, mode).unwrap();
        let (el, er) = de_casteljau_split(&pts, 0.25);
        for (q, e) in l.points().iter().zip(&el).chain(r.points().iter().zip(&er)) {
            assert!(close(xy(&s, q), *e, 1e-9), "{scheme:?}");
        }
    }
}

#[test]
fn olr_junction_is_the_point_evaluation() {
    let s = flat();
    let mut rng = ChaCha8Rng::seed_from_u64(18);
    let pts = random_points(&mut rng, 4);
    let p = polygon(&s, &pts);
    let mode = TraceMode::Uniform { depth: 3 };
    let t = 0.37;
    let (l, _) = olr_insert(&s, &p, t, mode).unwrap();
    assert_eq!(l.last(), olr_point_eval(&s, &p, t, mode).unwrap());
}

#[test]
fn quadratic_insertion_example() {
    let s = flat();
    let mut rng = ChaCha8Rng::seed_from_u64(19);
    let pts = random_points(&mut rng, 3);
    let p = polygon(&s, &pts);
    let (l, _) = rdc_insert(&s, &p, 0.25, TraceMode::Uniform { depth: 2 }).unwrap();
    assert!(close(xy(&s, &l.points()[1]), pts[0] * 0.75 + pts[1] * 0.25, 1e-12));
}

#[test]
fn insertion_rejects_bad_input() {
    let s = flat();
    let mut rng = ChaCha8Rng::seed_from_u64(20);
    let p = polygon(&s, &random_points(&mut rng, 4));
    let mode = TraceMode::Uniform { depth: 2 };
    assert!(matches!(rdc_insert(&s, &p, 0.0, mode), Err(Error::InvalidParameter(_))));
    assert!(matches!(olr_insert(&s, &p, 1.0, mode), Err(Error::InvalidParameter(_))));
    let line = polygon(&s, &random_points(&mut rng, 2));
    assert!(matches!(rdc_insert(&s, &line, 0.5, mode), Err(Error::UnsupportedDegree(1))));
}

#[test]
fn midpoint_ball_on_the_plane() {
    let s = flat();
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for _ in 0..10 {
        let p = polygon(&s, &random_points(&mut rng, 4));
        let half = 0.5 * p.length();
        for d in p.midpoint_distances(&s).unwrap() {
            assert!(d <= half + 1e-9 * (1.0 + half));
        }
    }
}

#[test]
fn turning_angle_of_a_right_corner() {
    let s = flat();
    let a = at(&s, 1.0, 1.0);
    let b = at(&s, 2.0, 1.0);
    let c = at(&s, 2.0, 2.0);
    let ab = s.shortest_path(&a, &b).unwrap();
    let bc = s.shortest_path(&b, &c).unwrap();
    let ang = turning_angle(&s, &ab, &bc).unwrap();
    assert!((ang - std::f64::consts::FRAC_PI_2).abs() < 1e-9);
}

#[test]
fn unsupported_degrees() {
    let s = flat();
    let mut rng = ChaCha8Rng::seed_from_u64(22);
    let p = polygon(&s, &random_points(&mut rng, 5));
    assert!(matches!(olr_trace(&s, &p, TraceMode::Uniform { depth: 2 }), Err(Error::UnsupportedDegree(4))));
    assert!(matches!(bspline_to_bezier(&s, &p, KnotCase::Uniform), Err(Error::UnsupportedDegree(4))));
}
