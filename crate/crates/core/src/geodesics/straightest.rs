//! Straightest geodesics: trace a straight line from a point and direction
//! through successively unfolded triangles.

use crate::mesh::{barycentric_in_layout, MeshPoint, TriangleMesh};
use crate::scalar::Scalar;
use crate::vector::Vec2;

use super::GeodesicPath;

/// Rotates a direction given in the frame of a face with a corner at `v`
/// until it points into the face's wedge at `v`. Returns the face and the
/// direction in its frame.
fn into_wedge<T: Scalar>(mesh: &TriangleMesh<T>, f: usize, c: usize, dir: Vec2<T>) -> (usize, Vec2<T>) {
    let lay = mesh.face_layout(f);
    let e1 = lay[(c + 1) % 3] - lay[c];
    let ang = e1.angle_to(dir);
    let v = mesh.tri(f)[c];
    if ang >= T::zero() {
        walk_ccw(mesh, f, v, ang, dir.norm())
    } else {
        walk_cw(mesh, f, v, -ang, dir.norm())
    }
}

/// Walks counter-clockwise around `v` from the first edge of `f` at `v` by
/// `angle` (in the surface metric), returning the face reached and the
/// direction in its frame.
fn walk_ccw<T: Scalar>(mesh: &TriangleMesh<T>, f: usize, v: usize, angle: T, norm: T) -> (usize, Vec2<T>) {
    walk_ccw_recording(mesh, f, v, angle, norm, &mut |_, _| {})
}

fn walk_ccw_recording<T: Scalar>(
    mesh: &TriangleMesh<T>,
    mut f: usize,
    v: usize,
    mut angle: T,
    norm: T,
    record: &mut impl FnMut(usize, usize),
) -> (usize, Vec2<T>) {
    let total = mesh.total_angle(v);
    if total > T::zero() {
        while angle >= total {
            angle = angle - total;
        }
    }
    for _ in 0..mesh.num_faces() {
        let c = mesh.corner_of(f, v).expect("face around vertex");
        let a = mesh.corner_angle(f, c);
        if angle <= a {
            let lay = mesh.face_layout(f);
            let e1 = (lay[(c + 1) % 3] - lay[c]).normalized();
            return (f, e1.rotate(angle) * norm);
        }
        angle = angle - a;
        let g = mesh.ccw_around(f, v);
        record(f, g);
        f = g;
    }
    unreachable!("vertex star is finite")
}

fn walk_cw<T: Scalar>(mesh: &TriangleMesh<T>, mut f: usize, v: usize, mut angle: T, norm: T) -> (usize, Vec2<T>) {
    // angle is measured clockwise from the first edge of f at v
    for _ in 0..mesh.num_faces() {
        let g = mesh.cw_around(f, v);
        let c = mesh.corner_of(g, v).expect("face around vertex");
        let a = mesh.corner_angle(g, c);
        if angle <= a {
            let lay = mesh.face_layout(g);
            let e1 = (lay[(c + 1) % 3] - lay[c]).normalized();
            return (g, e1.rotate(a - angle) * norm);
        }
        angle = angle - a;
        f = g;
    }
    unreachable!("vertex star is finite")
}

/// Traces the straightest geodesic of length `len` from `from` along `dir`
/// (in the frame of `from.face`).
pub(crate) fn trace<T: Scalar>(
    mesh: &TriangleMesh<T>,
    from: &MeshPoint<T>,
    dir: Vec2<T>,
    len: T,
) -> GeodesicPath<T> {
    let eps = T::bary_eps();
    if len <= T::zero() || dir.norm() <= T::zero() {
        return GeodesicPath::trivial(*from);
    }
    let mut strip = vec![from.face];
    let mut lerps: Vec<T> = Vec::new();
    let mut face = from.face;
    let mut d = dir.normalized();
    let mut lay = mesh.face_layout(face);
    let mut pos = from.in_layout(&lay);
    // edge to ignore when looking for the exit (the one just entered)
    let mut entered: Option<usize> = None;

    // a start on a vertex may need to move to the face the direction points into
    let w = from.weights();
    if let Some(c) = (0..3).find(|&c| w[c] >= T::one() - eps) {
        let (g, nd) = into_wedge(mesh, face, c, d);
        if g != face {
            let v = mesh.tri(face)[c];
            let cg = mesh.corner_of(g, v).unwrap();
            // bridge through the faces between
            let bridge = fan_between(mesh, face, g, v);
            for (a, b) in bridge.windows(2).map(|p| (p[0], p[1])) {
                lerps.push(vertex_lerp(mesh, a, b, v));
                strip.push(b);
            }
            face = g;
            lay = mesh.face_layout(face);
            pos = lay[cg];
            d = nd.normalized();
        }
    }

    let mut remaining = len;
    let limit = 64 * mesh.num_faces() + 64;
    for _ in 0..limit {
        // exit edge: smallest distance among edges the ray leaves through
        let mut best: Option<(usize, T, T)> = None;
        for k in 0..3 {
            if Some(k) == entered {
                continue;
            }
            let a = lay[k];
            let e = lay[(k + 1) % 3] - a;
            let den = d.cross(e);
            if den <= T::zero() {
                continue; // not moving outward through this edge
            }
            let t = (a - pos).cross(e) / den;
            let s = (pos - a).cross(d) / e.cross(d);
            let t = t.max(T::zero());
            if best.map_or(true, |b| t < b.1) {
                best = Some((k, t, s.clamp01()));
            }
        }
        let Some((k, t, s)) = best else {
            break;
        };
        if remaining <= t {
            let p = pos + d * remaining;
            let b = barycentric_in_layout(&lay, p);
            let end = MeshPoint::from_weights(face, b.map(|x| x.max(T::zero())));
            return GeodesicPath::from_parts(mesh, *from, end, strip, lerps);
        }
        remaining = remaining - t;
        let g = mesh.neighbor(face, k);
        let kk = mesh.shared_edge(g, face).expect("reciprocal adjacency");
        let len_k = mesh.edge_length(face, k);
        let near = eps.max(T::geom_eps() / len_k.max(T::geom_eps()));
        if s <= near || s >= T::one() - near {
            // vertex hit: continue along the direction bisecting the total angle
            let c = if s <= near { k } else { (k + 1) % 3 };
            let v = mesh.tri(face)[c];
            let e1 = lay[(c + 1) % 3] - lay[c];
            let beta = e1.angle_to(-d).max(T::zero());
            let target = beta + mesh.total_angle(v) * T::half();
            let mut hops: Vec<(usize, usize)> = Vec::new();
            let (g, nd) = walk_ccw_recording(mesh, face, v, target, T::one(), &mut |a, b| hops.push((a, b)));
            for (a, b) in hops {
                lerps.push(vertex_lerp(mesh, a, b, v));
                strip.push(b);
            }
            let cg = mesh.corner_of(g, v).unwrap();
            face = g;
            lay = mesh.face_layout(face);
            pos = lay[cg];
            d = nd.normalized();
            entered = None;
            continue;
        }
        // regular crossing: transfer the angle to the edge
        let ab_f = lay[(k + 1) % 3] - lay[k];
        let phi = ab_f.angle_to(d);
        let lay_g = mesh.face_layout(g);
        let ab_g = (lay_g[kk] - lay_g[(kk + 1) % 3]).normalized();
        lerps.push(s);
        strip.push(g);
        d = ab_g.rotate(phi);
        pos = lay_g[kk].lerp(lay_g[(kk + 1) % 3], T::one() - s);
        face = g;
        lay = lay_g;
        entered = Some(kk);
    }
    let end = MeshPoint::from_weights(face, barycentric_in_layout(&lay, pos).map(|x| x.max(T::zero())));
    GeodesicPath::from_parts(mesh, *from, end, strip, lerps)
}

/// Faces from `f` to `g` going counter-clockwise around `v`, inclusive.
pub(crate) fn fan_between<T: Scalar>(mesh: &TriangleMesh<T>, f: usize, g: usize, v: usize) -> Vec<usize> {
    let ccw = {
        let mut out = vec![f];
        let mut x = f;
        while x != g && out.len() <= mesh.num_faces() {
            x = mesh.ccw_around(x, v);
            out.push(x);
        }
        out
    };
    let cw = {
        let mut out = vec![f];
        let mut x = f;
        while x != g && out.len() <= mesh.num_faces() {
            x = mesh.cw_around(x, v);
            out.push(x);
        }
        out
    };
    if cw.len() < ccw.len() {
        cw
    } else {
        ccw
    }
}

/// Crossing parameter of vertex `v` on the edge between adjacent faces `a`
/// and `b`, oriented as in `a`.
pub(crate) fn vertex_lerp<T: Scalar>(mesh: &TriangleMesh<T>, a: usize, b: usize, v: usize) -> T {
    let k = mesh.shared_edge(a, b).expect("adjacent faces");
    if mesh.tri(a)[k] == v {
        T::zero()
    } else {
        T::one()
    }
}
