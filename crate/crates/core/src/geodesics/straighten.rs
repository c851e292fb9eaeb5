//! Strip straightening: reroute the funnel path around the vertices where
//! it turns, until no turn can be shortened.

use rustc_hash::FxHashSet;

use crate::error::{Error, Result};
use crate::mesh::{MeshPoint, TriangleMesh, NO_FACE};
use crate::scalar::Scalar;

use super::funnel::{funnel, FunnelOutput, END, START};
use super::strip::remove_loops;

/// Which side of the path a pseudo-source lies on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Side {
    Left,
    Right,
}

struct Turn {
    vertex: usize,
    side: Side,
    first: usize,
    last: usize,
    excess: f64,
}

/// Angle excess at every pseudo-source: `pi` minus the angle available on
/// the far side of the vertex. Positive means going round the other side is
/// shorter.
fn turns<T: Scalar>(mesh: &TriangleMesh<T>, out: &FunnelOutput<T>) -> Vec<Turn> {
    let strip = &out.path.strip;
    let mut res = Vec::new();
    for j in 1..out.apexes.len().saturating_sub(1) {
        let a = out.apexes[j];
        if a.id == START || a.id == END {
            continue;
        }
        let v = a.id;
        // portal index p lies between strip[p - 1] and strip[p]
        let p = a.portal;
        if p == 0 || p >= strip.len() {
            continue;
        }
        let k = mesh.shared_edge(strip[p - 1], strip[p]).expect("valid strip");
        let t = mesh.tri(strip[p - 1]);
        let side = if t[(k + 1) % 3] == v {
            Side::Left
        } else if t[k] == v {
            Side::Right
        } else {
            continue;
        };
        let mut first = p - 1;
        while first > 0 && mesh.corner_of(strip[first - 1], v).is_some() {
            first -= 1;
        }
        let mut last = p;
        while last + 1 < strip.len() && mesh.corner_of(strip[last + 1], v).is_some() {
            last += 1;
        }
        let center = a.pos;
        let din = out.apexes[j - 1].pos - center;
        let dout = out.apexes[j + 1].pos - center;
        if din.norm() <= T::zero() || dout.norm() <= T::zero() {
            continue;
        }
        // sweep from the incoming leg through the strip fan to the outgoing
        // leg; every step stays inside one triangle so it is below pi
        let mut dirs = vec![din];
        for i in first..last {
            let k = mesh.shared_edge(strip[i], strip[i + 1]).expect("valid strip");
            let ti = mesh.tri(strip[i]);
            let w = if ti[k] == v { (k + 1) % 3 } else { k };
            dirs.push(out.unfolded.pos[i][w] - center);
        }
        dirs.push(dout);
        let mut sweep = T::zero();
        for d in dirs.windows(2) {
            let step = d[0].angle_to(d[1]);
            let step = if side == Side::Left { step } else { -step };
            sweep = sweep + step.max(T::zero());
        }
        let far = mesh.total_angle(v) - sweep;
        res.push(Turn {
            vertex: v,
            side,
            first,
            last,
            excess: (T::PI() - far).f64(),
        });
    }
    res
}

/// The faces of the other way round `turn.vertex`, from `strip[turn.first]`
/// to `strip[turn.last]`.
fn detour<T: Scalar>(mesh: &TriangleMesh<T>, strip: &[usize], turn: &Turn) -> Option<Vec<usize>> {
    let (fa, fb) = (strip[turn.first], strip[turn.last]);
    if fa == fb {
        return None;
    }
    let v = turn.vertex;
    let mut run = vec![fa];
    let mut f = fa;
    let limit = mesh.num_faces().min(1 << 16);
    while f != fb {
        // the strip sweeps counter-clockwise around a left vertex
        f = match turn.side {
            Side::Left => mesh.cw_around(f, v),
            Side::Right => mesh.ccw_around(f, v),
        };
        if f == NO_FACE || run.len() > limit {
            return None;
        }
        run.push(f);
    }
    Some(run)
}

/// Replaces the strip runs around the vertices of `turns`, whose runs must
/// not overlap.
fn flip<T: Scalar>(mesh: &TriangleMesh<T>, strip: &[usize], turns: &[&Turn]) -> Option<Vec<usize>> {
    let mut order: Vec<&Turn> = turns.to_vec();
    order.sort_by_key(|t| t.first);
    let mut out = Vec::with_capacity(strip.len() + 8 * turns.len());
    let mut next = 0;
    for turn in order {
        out.extend_from_slice(&strip[next..turn.first]);
        out.extend(detour(mesh, strip, turn)?);
        next = turn.last + 1;
    }
    out.extend_from_slice(&strip[next..]);
    let out = remove_loops(out);
    if out.first() != strip.first() || out.last() != strip.last() {
        return None;
    }
    Some(out)
}

/// Straightens a funnel output. Returns the final funnel output and the
/// number of reroutes that were attempted.
///
/// Each round tries the largest turn together with every other turn whose
/// fan does not overlap one already taken, in order of decreasing excess.
/// A batch is kept only when it strictly shortens the path; otherwise the
/// round falls back to the largest turn alone, which is also the only place
/// where vertices get frozen.
pub(crate) fn straighten<T: Scalar>(
    mesh: &TriangleMesh<T>,
    mut cur: FunnelOutput<T>,
    p: &MeshPoint<T>,
    q: &MeshPoint<T>,
) -> Result<(FunnelOutput<T>, usize)> {
    let cap = 100 * cur.path.strip.len().max(1);
    let tol = T::bary_eps().f64();
    let mut frozen: FxHashSet<usize> = FxHashSet::default();
    let mut iterations = 0;
    loop {
        let mut candidates: Vec<Turn> = turns(mesh, &cur)
            .into_iter()
            .filter(|t| t.excess > tol && !frozen.contains(&t.vertex))
            .collect();
        if candidates.is_empty() {
            return Ok((cur, iterations));
        }
        candidates.sort_by(|a, b| b.excess.total_cmp(&a.excess).then(a.vertex.cmp(&b.vertex)));
        iterations += 1;
        if iterations > cap {
            return Err(Error::IterationCap(cap));
        }
        let slack = T::geom_eps() * (T::one() + cur.path.length);
        let mut batch: Vec<&Turn> = Vec::new();
        for t in &candidates {
            if batch.iter().all(|b| t.last < b.first || t.first > b.last) {
                batch.push(t);
            }
        }
        if batch.len() > 1 {
            if let Some(strip) = flip(mesh, &cur.path.strip, &batch) {
                let next = funnel(mesh, &strip, p, q)?;
                if next.path.length < cur.path.length - slack {
                    cur = next;
                    continue;
                }
            }
        }
        let turn = &candidates[0];
        let Some(strip) = flip(mesh, &cur.path.strip, &[turn]) else {
            frozen.insert(turn.vertex);
            continue;
        };
        let next = funnel(mesh, &strip, p, q)?;
        if next.path.length <= cur.path.length + slack {
            if next.apexes.iter().any(|a| a.id == turn.vertex) {
                frozen.insert(turn.vertex);
            }
            cur = next;
        } else {
            frozen.insert(turn.vertex);
        }
    }
}
