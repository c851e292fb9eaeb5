//! Initial strip extraction on the dual graph.

use std::collections::VecDeque;

use rustc_hash::FxHashMap;

use crate::error::{Error, Result};
use crate::mesh::{DualGraph, MeshPoint, TriangleMesh};
use crate::scalar::Scalar;

struct Label<T> {
    dist: T,
    pred: usize,
    queued: bool,
}

/// Label-correcting search over the dual graph with a deque (SLF insertion,
/// LLL extraction). Nodes are keyed by distance so far plus the Euclidean
/// distance of their reference point to the target; any label whose key
/// reaches the best complete cost found so far is pruned. Returns the node
/// sequence and its cost.
pub(crate) fn search<T: Scalar>(
    mesh: &TriangleMesh<T>,
    graph: &DualGraph<T>,
    p: &MeshPoint<T>,
    q: &MeshPoint<T>,
) -> Result<(Vec<usize>, T)> {
    let src = mesh.embed(p);
    let dst = mesh.embed(q);
    let h = |u: usize| graph.reference(u).distance(dst);

    let mut labels: FxHashMap<usize, Label<T>> = FxHashMap::default();
    let mut queue: VecDeque<usize> = VecDeque::new();
    let mut key_sum = T::zero();

    for u in graph.face_nodes(p.face) {
        let d = graph.reference(u).distance(src);
        labels.insert(
            u,
            Label {
                dist: d,
                pred: usize::MAX,
                queued: true,
            },
        );
        key_sum = key_sum + d + h(u);
        queue.push_back(u);
    }

    let mut upper = T::infinity();
    let mut best = usize::MAX;

    while !queue.is_empty() {
        // LLL: rotate nodes whose key exceeds the queue average to the back
        let avg = key_sum / T::of_usize(queue.len());
        let mut rotations = queue.len();
        loop {
            let u = queue[0];
            let k = labels[&u].dist + h(u);
            if k <= avg || rotations == 0 {
                break;
            }
            queue.rotate_left(1);
            rotations -= 1;
        }
        let u = queue.pop_front().expect("non-empty queue");
        let du = {
            let l = labels.get_mut(&u).expect("queued node has a label");
            l.queued = false;
            l.dist
        };
        let hu = h(u);
        key_sum = key_sum - (du + hu);
        if queue.is_empty() {
            key_sum = T::zero();
        }
        if du + hu >= upper {
            continue;
        }
        if graph.provenance(u) == q.face {
            let total = du + hu;
            if total < upper || (total == upper && u < best) {
                upper = total;
                best = u;
            }
        }
        for &(v, w) in graph.arcs(u) {
            let nd = du + w;
            let hv = h(v);
            if nd + hv >= upper {
                continue;
            }
            match labels.get_mut(&v) {
                Some(l) if nd > l.dist => {}
                Some(l) if nd == l.dist => {
                    if u < l.pred {
                        l.pred = u;
                    }
                }
                Some(l) => {
                    let old = l.dist;
                    l.dist = nd;
                    l.pred = u;
                    if l.queued {
                        key_sum = key_sum - old + nd;
                    } else {
                        l.queued = true;
                        key_sum = key_sum + nd + hv;
                        push_slf(&mut queue, &labels, v, nd + hv, &h);
                    }
                }
                None => {
                    labels.insert(
                        v,
                        Label {
                            dist: nd,
                            pred: u,
                            queued: true,
                        },
                    );
                    key_sum = key_sum + nd + hv;
                    push_slf(&mut queue, &labels, v, nd + hv, &h);
                }
            }
        }
    }

    if best == usize::MAX {
        return Err(Error::Unreachable {
            from: p.face,
            to: q.face,
        });
    }
    let mut nodes = vec![best];
    let mut u = best;
    while let Some(l) = labels.get(&u) {
        if l.pred == usize::MAX {
            break;
        }
        u = l.pred;
        nodes.push(u);
    }
    nodes.reverse();
    Ok((nodes, upper))
}

fn push_slf<T: Scalar>(
    queue: &mut VecDeque<usize>,
    labels: &FxHashMap<usize, Label<T>>,
    v: usize,
    key: T,
    h: &impl Fn(usize) -> T,
) {
    match queue.front() {
        Some(&f) if key < labels[&f].dist + h(f) => queue.push_front(v),
        _ => queue.push_back(v),
    }
}

/// Maps a node path to faces, dropping repeats and cutting loops.
pub(crate) fn nodes_to_strip<T: Scalar>(graph: &DualGraph<T>, nodes: &[usize]) -> Vec<usize> {
    remove_loops(nodes.iter().map(|&u| graph.provenance(u)))
}

/// Removes consecutive duplicates and closed loops from a face sequence,
/// keeping the first visit of every face.
pub(crate) fn remove_loops(faces: impl IntoIterator<Item = usize>) -> Vec<usize> {
    let mut out: Vec<usize> = Vec::new();
    let mut at: FxHashMap<usize, usize> = FxHashMap::default();
    for f in faces {
        if let Some(&i) = at.get(&f) {
            for g in out.drain(i + 1..) {
                at.remove(&g);
            }
        } else {
            at.insert(f, out.len());
            out.push(f);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn loops_are_cut() {
        assert_eq!(remove_loops([1, 1, 2, 3, 2, 4]), vec![1, 2, 4]);
        assert_eq!(remove_loops([5, 6, 7, 5, 8]), vec![5, 8]);
        assert_eq!(remove_loops([3]), vec![3]);
    }
}
