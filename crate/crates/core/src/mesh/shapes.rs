//! Procedural closed meshes used by tests, benchmarks and the CLI demo mode.

use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::TriangleMesh;
use crate::scalar::Scalar;
use crate::vector::Vec3;

fn build<T: Scalar>(pos: Vec<[f64; 3]>, tris: Vec<[usize; 3]>) -> TriangleMesh<T> {
    let pos = pos
        .into_iter()
        .map(|p| Vec3::new(T::of(p[0]), T::of(p[1]), T::of(p[2])))
        .collect();
    TriangleMesh::new(pos, tris).expect("procedural mesh is closed and manifold")
}

/// A flat square `[0, size]^2` in the z = 0 plane, made watertight by gluing
/// a reversed copy underneath along the border.
///
/// The top side has `2 n^2` triangles (indices `0..2n^2`) and is intrinsically
/// flat; the only curvature sits at the four corners, where each side
/// contributes a right angle.
pub fn pillow<T: Scalar>(n: usize, size: f64) -> TriangleMesh<T> {
    assert!(n >= 2);
    let h = size / n as f64;
    let mut pos = Vec::new();
    let top = |i: usize, j: usize| j * (n + 1) + i;
    for j in 0..=n {
        for i in 0..=n {
            pos.push([i as f64 * h, j as f64 * h, 0.0]);
        }
    }
    let mut bottom = vec![usize::MAX; (n + 1) * (n + 1)];
    for j in 0..=n {
        for i in 0..=n {
            let on_border = i == 0 || j == 0 || i == n || j == n;
            bottom[top(i, j)] = if on_border {
                top(i, j)
            } else {
                pos.push([i as f64 * h, j as f64 * h, 0.0]);
                pos.len() - 1
            };
        }
    }
    // The two corner cells whose usual diagonal would join three border
    // vertices use the other diagonal, so no triangle is shared by both sides.
    let cell = |i: usize, j: usize| {
        let (a, b, c, d) = ((i, j), (i + 1, j), (i + 1, j + 1), (i, j + 1));
        if (i == n - 1 && j == 0) || (i == 0 && j == n - 1) {
            [[a, b, d], [b, c, d]]
        } else {
            [[a, b, c], [a, c, d]]
        }
    };
    let mut tris = Vec::with_capacity(4 * n * n);
    for j in 0..n {
        for i in 0..n {
            for t in cell(i, j) {
                tris.push(t.map(|(x, y)| top(x, y)));
            }
        }
    }
    for j in 0..n {
        for i in 0..n {
            for t in cell(i, j) {
                let [a, b, c] = t.map(|(x, y)| bottom[top(x, y)]);
                tris.push([a, c, b]);
            }
        }
    }
    build(pos, tris)
}

fn icosahedron() -> (Vec<[f64; 3]>, Vec<[usize; 3]>) {
    let t = (1.0 + 5f64.sqrt()) / 2.0;
    let pos = vec![
        [-1.0, t, 0.0],
        [1.0, t, 0.0],
        [-1.0, -t, 0.0],
        [1.0, -t, 0.0],
        [0.0, -1.0, t],
        [0.0, 1.0, t],
        [0.0, -1.0, -t],
        [0.0, 1.0, -t],
        [t, 0.0, -1.0],
        [t, 0.0, 1.0],
        [-t, 0.0, -1.0],
        [-t, 0.0, 1.0],
    ];
    let tris = vec![
        [0, 11, 5],
        [0, 5, 1],
        [0, 1, 7],
        [0, 7, 10],
        [0, 10, 11],
        [1, 5, 9],
        [5, 11, 4],
        [11, 10, 2],
        [10, 7, 6],
        [7, 1, 8],
        [3, 9, 4],
        [3, 4, 2],
        [3, 2, 6],
        [3, 6, 8],
        [3, 8, 9],
        [4, 9, 5],
        [2, 4, 11],
        [6, 2, 10],
        [8, 6, 7],
        [9, 8, 1],
    ];
    (pos, tris)
}

fn normalize(p: [f64; 3]) -> [f64; 3] {
    let n = (p[0] * p[0] + p[1] * p[1] + p[2] * p[2]).sqrt();
    [p[0] / n, p[1] / n, p[2] / n]
}

fn sphere_points(level: usize) -> (Vec<[f64; 3]>, Vec<[usize; 3]>) {
    let (pos, mut tris) = icosahedron();
    let mut pos: Vec<[f64; 3]> = pos.into_iter().map(normalize).collect();
    for _ in 0..level {
        let mut mid: HashMap<(usize, usize), usize> = HashMap::new();
        let mut next = Vec::with_capacity(tris.len() * 4);
        let mut midpoint = |a: usize, b: usize, pos: &mut Vec<[f64; 3]>| {
            let key = (a.min(b), a.max(b));
            *mid.entry(key).or_insert_with(|| {
                let (p, q) = (pos[a], pos[b]);
                pos.push(normalize([p[0] + q[0], p[1] + q[1], p[2] + q[2]]));
                pos.len() - 1
            })
        };
        for [a, b, c] in tris {
            let ab = midpoint(a, b, &mut pos);
            let bc = midpoint(b, c, &mut pos);
            let ca = midpoint(c, a, &mut pos);
            next.extend([[a, ab, ca], [b, bc, ab], [c, ca, bc], [ab, bc, ca]]);
        }
        tris = next;
    }
    (pos, tris)
}

/// Subdivided icosahedron projected on a sphere; `20 * 4^level` triangles.
pub fn icosphere<T: Scalar>(level: usize, radius: f64) -> TriangleMesh<T> {
    let (pos, tris) = sphere_points(level);
    let pos = pos
        .into_iter()
        .map(|p| [p[0] * radius, p[1] * radius, p[2] * radius])
        .collect();
    build(pos, tris)
}

/// Icosphere with every vertex pushed radially by a seeded random factor in
/// `[1 - noise, 1 + noise]`.
pub fn noisy_sphere<T: Scalar>(level: usize, radius: f64, noise: f64, seed: u64) -> TriangleMesh<T> {
    let (pos, tris) = sphere_points(level);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pos = pos
        .into_iter()
        .map(|p| {
            let r = radius * (1.0 + noise * rng.gen_range(-1.0..=1.0));
            [p[0] * r, p[1] * r, p[2] * r]
        })
        .collect();
    build(pos, tris)
}

/// Torus with `nu` segments around the main ring and `nv` around the tube;
/// `2 * nu * nv` triangles.
pub fn torus<T: Scalar>(nu: usize, nv: usize, major: f64, minor: f64) -> TriangleMesh<T> {
    let mut pos = Vec::with_capacity(nu * nv);
    for i in 0..nu {
        let u = std::f64::consts::TAU * i as f64 / nu as f64;
        for j in 0..nv {
            let v = std::f64::consts::TAU * j as f64 / nv as f64;
            let r = major + minor * v.cos();
            pos.push([r * u.cos(), r * u.sin(), minor * v.sin()]);
        }
    }
    let id = |i: usize, j: usize| (i % nu) * nv + (j % nv);
    let mut tris = Vec::with_capacity(2 * nu * nv);
    for i in 0..nu {
        for j in 0..nv {
            let (a, b, c, d) = (id(i, j), id(i + 1, j), id(i + 1, j + 1), id(i, j + 1));
            tris.push([a, b, c]);
            tris.push([a, c, d]);
        }
    }
    build(pos, tris)
}

/// Closed surface of a union of unit voxels, each voxel face split into
/// `res x res` quads. Voxels must not touch along an edge only.
fn voxel_surface<T: Scalar>(cells: &[[i64; 3]], res: usize) -> TriangleMesh<T> {
    let solid: std::collections::HashSet<[i64; 3]> = cells.iter().copied().collect();
    let s = res as i64;
    let mut ids: HashMap<[i64; 3], usize> = HashMap::new();
    let mut pos = Vec::new();
    let mut tris = Vec::new();
    let mut vid = |p: [i64; 3], pos: &mut Vec<[f64; 3]>| {
        *ids.entry(p).or_insert_with(|| {
            pos.push([
                p[0] as f64 / res as f64,
                p[1] as f64 / res as f64,
                p[2] as f64 / res as f64,
            ]);
            pos.len() - 1
        })
    };
    // (normal axis, sign, u axis, v axis) with u x v along the outward normal
    let faces: [(usize, i64, usize, usize); 6] = [
        (0, 1, 1, 2),
        (0, -1, 2, 1),
        (1, 1, 2, 0),
        (1, -1, 0, 2),
        (2, 1, 0, 1),
        (2, -1, 1, 0),
    ];
    let mut sorted: Vec<[i64; 3]> = cells.to_vec();
    sorted.sort_unstable();
    for c in sorted {
        for &(ax, sign, ua, va) in &faces {
            let mut nb = c;
            nb[ax] += sign;
            if solid.contains(&nb) {
                continue;
            }
            let mut o = [c[0] * s, c[1] * s, c[2] * s];
            if sign > 0 {
                o[ax] += s;
            }
            let at = |a: i64, b: i64| {
                let mut p = o;
                p[ua] += a;
                p[va] += b;
                p
            };
            for b in 0..s {
                for a in 0..s {
                    let p00 = vid(at(a, b), &mut pos);
                    let p10 = vid(at(a + 1, b), &mut pos);
                    let p11 = vid(at(a + 1, b + 1), &mut pos);
                    let p01 = vid(at(a, b + 1), &mut pos);
                    tris.push([p00, p10, p11]);
                    tris.push([p00, p11, p01]);
                }
            }
        }
    }
    build(pos, tris)
}

/// Unit cube `[0, 1]^3` with each face split into `res x res` quads.
pub fn cube<T: Scalar>(res: usize) -> TriangleMesh<T> {
    voxel_surface(&[[0, 0, 0]], res)
}

/// A flat voxel slab with `holes` square tunnels, giving a closed surface of
/// genus `holes`.
pub fn genus_slab<T: Scalar>(holes: usize, res: usize) -> TriangleMesh<T> {
    let nx = 2 * holes as i64 + 1;
    let mut cells = Vec::new();
    for x in 0..nx {
        for y in 0..3 {
            let hole = y == 1 && x % 2 == 1;
            if !hole {
                cells.push([x, y, 0]);
            }
        }
    }
    voxel_surface(&cells, res)
}

/// Closed polygonal cylinder of radius `radius` and height `height`, with
/// `n` sides, `rings` bands and fan caps. The side is developable.
pub fn capped_cylinder<T: Scalar>(n: usize, rings: usize, radius: f64, height: f64) -> TriangleMesh<T> {
    let mut pos = Vec::new();
    for j in 0..=rings {
        let z = height * j as f64 / rings as f64;
        for i in 0..n {
            let a = std::f64::consts::TAU * i as f64 / n as f64;
            pos.push([radius * a.cos(), radius * a.sin(), z]);
        }
    }
    let bottom = pos.len();
    pos.push([0.0, 0.0, 0.0]);
    let top = pos.len();
    pos.push([0.0, 0.0, height]);
    let id = |j: usize, i: usize| j * n + i % n;
    let mut tris = Vec::new();
    for j in 0..rings {
        for i in 0..n {
            let (a, b, c, d) = (id(j, i), id(j, i + 1), id(j + 1, i + 1), id(j + 1, i));
            tris.push([a, b, c]);
            tris.push([a, c, d]);
        }
    }
    for i in 0..n {
        tris.push([bottom, id(0, i + 1), id(0, i)]);
        tris.push([top, id(rings, i), id(rings, i + 1)]);
    }
    build(pos, tris)
}

/// Closed cone: a fan of `n` side triangles around the apex at height
/// `height`, closed by a flat base fan.
pub fn cone<T: Scalar>(n: usize, radius: f64, height: f64) -> TriangleMesh<T> {
    let mut pos = Vec::new();
    for i in 0..n {
        let a = std::f64::consts::TAU * i as f64 / n as f64;
        pos.push([radius * a.cos(), radius * a.sin(), 0.0]);
    }
    let apex = pos.len();
    pos.push([0.0, 0.0, height]);
    let base = pos.len();
    pos.push([0.0, 0.0, 0.0]);
    let mut tris = Vec::new();
    for i in 0..n {
        tris.push([i, (i + 1) % n, apex]);
    }
    for i in 0..n {
        tris.push([base, (i + 1) % n, i]);
    }
    build(pos, tris)
}
