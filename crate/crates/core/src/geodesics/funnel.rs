//! Strip unfolding and the funnel algorithm.

use crate::error::{Error, Result};
use crate::mesh::{MeshPoint, TriangleMesh};
use crate::scalar::Scalar;
use crate::vector::Vec2;

use super::GeodesicPath;

pub(crate) const START: usize = usize::MAX - 1;
pub(crate) const END: usize = usize::MAX;

/// Strip triangles laid out isometrically in a common plane. `pos[i][c]` is
/// the position of corner `c` of `strip[i]`.
#[derive(Debug, Clone)]
pub(crate) struct Unfolded<T> {
    pub pos: Vec<[Vec2<T>; 3]>,
}

/// Places the third vertex of the triangle across edge `a -> b`, to the
/// right of that edge, given its distances to `a` and `b`.
#[inline]
fn place_right<T: Scalar>(a: Vec2<T>, b: Vec2<T>, la: T, lb: T) -> Vec2<T> {
    let ab = a - b;
    let l = ab.norm();
    if l <= T::zero() {
        return b;
    }
    let u = ab / l;
    let x = (lb * lb - la * la + l * l) / (T::two() * l);
    let y = (lb * lb - x * x).max(T::zero()).sqrt();
    b + u * x + u.perp() * y
}

/// Unfolds `strip` starting from the given layout of its first triangle.
pub(crate) fn unfold<T: Scalar>(
    mesh: &TriangleMesh<T>,
    strip: &[usize],
    first: [Vec2<T>; 3],
) -> Result<Unfolded<T>> {
    let mut pos = Vec::with_capacity(strip.len());
    pos.push(first);
    for i in 1..strip.len() {
        let (f, g) = (strip[i - 1], strip[i]);
        let k = mesh
            .shared_edge(f, g)
            .ok_or_else(|| Error::DegenerateStrip(format!("faces {f} and {g} are not adjacent")))?;
        let kk = mesh.shared_edge(g, f).expect("reciprocal adjacency");
        let prev = pos[i - 1];
        let a = prev[k];
        let b = prev[(k + 1) % 3];
        let mut cur = [Vec2::zero(); 3];
        cur[kk] = b;
        cur[(kk + 1) % 3] = a;
        let la = mesh.edge_length(g, (kk + 1) % 3);
        let lb = mesh.edge_length(g, (kk + 2) % 3);
        cur[(kk + 2) % 3] = place_right(a, b, la, lb);
        pos.push(cur);
    }
    Ok(Unfolded { pos })
}

/// Unfolds a strip in the frame of its first face.
pub(crate) fn unfold_from_start<T: Scalar>(mesh: &TriangleMesh<T>, strip: &[usize]) -> Result<Unfolded<T>> {
    unfold(mesh, strip, mesh.face_layout(strip[0]))
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct Portal<T> {
    pub left: Vec2<T>,
    pub left_id: usize,
    pub right: Vec2<T>,
    pub right_id: usize,
}

/// A vertex of the funnel output: position, vertex id (or START/END) and
/// the portal index where it became apex.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Apex<T> {
    pub pos: Vec2<T>,
    pub id: usize,
    pub portal: usize,
}

/// Output of the funnel: the path and the apex chain in the unfolded plane.
#[derive(Debug, Clone)]
pub(crate) struct FunnelOutput<T> {
    pub path: GeodesicPath<T>,
    pub apexes: Vec<Apex<T>>,
    pub unfolded: Unfolded<T>,
}

pub(crate) fn portals<T: Scalar>(
    mesh: &TriangleMesh<T>,
    strip: &[usize],
    unf: &Unfolded<T>,
    s: Vec2<T>,
    e: Vec2<T>,
) -> Vec<Portal<T>> {
    let mut out = Vec::with_capacity(strip.len() + 1);
    out.push(Portal {
        left: s,
        left_id: START,
        right: s,
        right_id: START,
    });
    for i in 0..strip.len() - 1 {
        let k = mesh.shared_edge(strip[i], strip[i + 1]).expect("checked by unfold");
        let t = mesh.tri(strip[i]);
        out.push(Portal {
            left: unf.pos[i][(k + 1) % 3],
            left_id: t[(k + 1) % 3],
            right: unf.pos[i][k],
            right_id: t[k],
        });
    }
    out.push(Portal {
        left: e,
        left_id: END,
        right: e,
        right_id: END,
    });
    out
}

/// Simple stupid funnel over a portal list, returning the apex chain.
pub(crate) fn string_pull<T: Scalar>(portals: &[Portal<T>]) -> Vec<Apex<T>> {
    let n = portals.len();
    let first = portals[0];
    let mut apex = Apex {
        pos: first.left,
        id: first.left_id,
        portal: 0,
    };
    let mut left = apex;
    let mut right = apex;
    let mut out = vec![apex];
    let mut i = 1;
    while i < n {
        let p = portals[i];
        let (l, r) = (p.left, p.right);

        // a side that keeps the same vertex only advances its portal index;
        // this also avoids collinear tests when the apex lies on that portal
        if p.right_id == right.id && right.id != apex.id {
            right.portal = i;
        } else if (right.pos - apex.pos).cross(r - apex.pos) >= T::zero() {
            if apex.id == right.id || (left.pos - apex.pos).cross(r - apex.pos) < T::zero() {
                right = Apex {
                    pos: r,
                    id: p.right_id,
                    portal: i,
                };
            } else {
                apex = left;
                if out.last().map(|a| a.id) != Some(apex.id) {
                    out.push(apex);
                }
                left = apex;
                right = apex;
                i = apex.portal + 1;
                continue;
            }
        }

        if p.left_id == left.id && left.id != apex.id {
            left.portal = i;
        } else if (left.pos - apex.pos).cross(l - apex.pos) <= T::zero() {
            if apex.id == left.id || (right.pos - apex.pos).cross(l - apex.pos) > T::zero() {
                left = Apex {
                    pos: l,
                    id: p.left_id,
                    portal: i,
                };
            } else {
                apex = right;
                if out.last().map(|a| a.id) != Some(apex.id) {
                    out.push(apex);
                }
                left = apex;
                right = apex;
                i = apex.portal + 1;
                continue;
            }
        }
        i += 1;
    }
    let last = portals[n - 1];
    if out.last().map(|a| a.id) != Some(last.left_id) {
        out.push(Apex {
            pos: last.left,
            id: last.left_id,
            portal: n - 1,
        });
    }
    out
}

/// Parameter along `right -> left` where segment `a -> b` crosses the portal.
fn intersect<T: Scalar>(a: Vec2<T>, b: Vec2<T>, right: Vec2<T>, left: Vec2<T>) -> T {
    let e = left - right;
    let d = b - a;
    let den = e.cross(d);
    let ee = e.norm_squared();
    if ee <= T::zero() {
        return T::half();
    }
    let s = if den.abs() > T::geom_eps() * ee.sqrt() * d.norm() {
        (a - right).cross(d) / den
    } else {
        // parallel: project the midpoint
        ((a + b) * T::half() - right).dot(e) / ee
    };
    s.clamp01()
}

/// Intercepts of the apex chain with every interior portal.
pub(crate) fn intercepts<T: Scalar>(portals: &[Portal<T>], apexes: &[Apex<T>]) -> Vec<T> {
    let h = portals.len() - 2;
    let mut lerps = Vec::with_capacity(h);
    let mut j = 0;
    for i in 1..=h {
        while j + 2 < apexes.len() && apexes[j + 1].portal < i {
            j += 1;
        }
        let (a, b) = (apexes[j], apexes[j + 1]);
        let p = portals[i];
        let s = if a.id == p.left_id || b.id == p.left_id {
            T::one()
        } else if a.id == p.right_id || b.id == p.right_id {
            T::zero()
        } else {
            intersect(a.pos, b.pos, p.right, p.left)
        };
        lerps.push(s);
    }
    lerps
}

/// Shortest path from `p` to `q` inside `strip`.
pub(crate) fn funnel<T: Scalar>(
    mesh: &TriangleMesh<T>,
    strip: &[usize],
    p: &MeshPoint<T>,
    q: &MeshPoint<T>,
) -> Result<FunnelOutput<T>> {
    if strip.is_empty() || strip[0] != p.face || strip[strip.len() - 1] != q.face {
        return Err(Error::DegenerateStrip(format!(
            "strip does not run from face {} to face {}",
            p.face, q.face
        )));
    }
    let unfolded = unfold_from_start(mesh, strip)?;
    let s = p.in_layout(&unfolded.pos[0]);
    let e = q.in_layout(&unfolded.pos[strip.len() - 1]);
    let portals = portals(mesh, strip, &unfolded, s, e);
    let apexes = string_pull(&portals);
    let lerps = intercepts(&portals, &apexes);
    let path = GeodesicPath::from_parts(mesh, *p, *q, strip.to_vec(), lerps);
    Ok(FunnelOutput {
        path,
        apexes,
        unfolded,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unfold_preserves_edge_lengths() {
        let m = crate::mesh::shapes::icosphere::<f64>(1, 1.0);
        // walk a strip through neighbors
        let mut strip = vec![0];
        let mut prev = usize::MAX;
        for _ in 0..10 {
            let f = *strip.last().unwrap();
            let g = (0..3).map(|k| m.neighbor(f, k)).find(|&g| g != prev && !strip.contains(&g)).unwrap();
            prev = f;
            strip.push(g);
        }
        let u = unfold_from_start(&m, &strip).unwrap();
        for (i, &f) in strip.iter().enumerate() {
            for k in 0..3 {
                let d = (u.pos[i][(k + 1) % 3] - u.pos[i][k]).norm();
                assert!((d - m.edge_length(f, k)).abs() < 1e-12 * (1.0 + d));
            }
            let t = u.pos[i];
            assert!((t[1] - t[0]).cross(t[2] - t[0]) > 0.0);
        }
    }

    #[test]
    fn string_pull_around_a_corner() {
        // an L shaped corridor: portals turn left around (1, 1)
        let v = |x: f64, y: f64| Vec2::new(x, y);
        let mk = |l: Vec2<f64>, li, r: Vec2<f64>, ri| Portal {
            left: l,
            left_id: li,
            right: r,
            right_id: ri,
        };
        let portals = vec![
            mk(v(0.5, 0.5), START, v(0.5, 0.5), START),
            mk(v(1.0, 1.0), 1, v(1.0, 0.0), 2),
            mk(v(1.0, 1.0), 1, v(2.0, 0.0), 3),
            mk(v(1.0, 1.0), 1, v(2.0, 2.0), 4),
            mk(v(1.0, 2.0), 5, v(2.0, 2.0), 4),
            mk(v(1.5, 3.0), END, v(1.5, 3.0), END),
        ];
        let a = string_pull(&portals);
        let ids: Vec<usize> = a.iter().map(|x| x.id).collect();
        assert_eq!(ids, vec![START, 1, END]);
        let l = intercepts(&portals, &a);
        // the last leg crosses y = 2 at x = 1.25
        assert_eq!(l[..3], [1.0, 1.0, 1.0]);
        assert!((l[3] - 0.75).abs() < 1e-15);
    }
}
