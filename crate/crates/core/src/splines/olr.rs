//! Open-uniform Lane-Riesenfeld subdivision: refinement rows, the
//! expansion tree, tracing, de Boor evaluation.

use std::collections::HashSet;

use crate::error::{Error, Result};
use crate::geodesics::{GeodesicPath, Surface};
use crate::mesh::MeshPoint;
use crate::scalar::Scalar;

use super::euclid::refine_open_uniform;
use super::web::{connect, Web};
use super::{turning_angle, ControlPolygon, Scheme, TraceMode, TracedCurve, MAX_DEPTH};

/// Levels whose rows are computed directly; deeper rows are shifted copies.
const BASE_LEVEL: u32 = 3;
/// Rounds of forced refinement when an adaptive output fails validation.
const REPAIR_PASSES: usize = 16;

/// One refinement row: `(column, weight)` pairs over the level-n points,
/// zero weights dropped, columns increasing.
pub type Row = Vec<(usize, f64)>;

fn check_degree(k: usize) -> Result<()> {
    if (1..=3).contains(&k) {
        Ok(())
    } else {
        Err(Error::UnsupportedDegree(k))
    }
}

/// Full refinement matrix from level `n` to `n + 1` by knot insertion on
/// unit vectors. Weights are dyadic, so they are snapped to that grid.
fn direct_rows(k: usize, n: u32) -> Vec<Row> {
    let cols = (1usize << n) + k;
    let mut rows = vec![Row::new(); (1usize << (n + 1)) + k];
    for c in 0..cols {
        let mut e = vec![0.0f64; cols];
        e[c] = 1.0;
        for (i, w) in refine_open_uniform(&e, k, n).into_iter().enumerate() {
            let w = (w * 1024.0).round() / 1024.0;
            if w != 0.0 {
                rows[i].push((c, w));
            }
        }
    }
    rows
}

/// Row `i` of the refinement from level `n` to `n + 1`.
pub fn refinement_row(k: usize, n: u32, i: usize) -> Row {
    Stencils::new(k).row(n, i)
}

/// Refinement rows of a degree. Rows near the ends are those of the base
/// level, shifted; interior rows repeat every two rows with a column shift
/// of one.
struct Stencils {
    k: usize,
    base: Vec<Vec<Row>>,
}

impl Stencils {
    fn new(k: usize) -> Self {
        Self {
            k,
            base: (0..=BASE_LEVEL).map(|n| direct_rows(k, n)).collect(),
        }
    }

    fn row(&self, n: u32, i: usize) -> Row {
        if n <= BASE_LEVEL {
            return self.base[n as usize][i].clone();
        }
        let base = &self.base[BASE_LEVEL as usize];
        let rb = base.len();
        let r = (1usize << (n + 1)) + self.k;
        let c = rb / 2;
        if i < c {
            base[i].clone()
        } else if i >= r - (rb - c) {
            let shift = (1usize << n) - (1usize << BASE_LEVEL);
            base[i - (r - rb)].iter().map(|&(col, w)| (col + shift, w)).collect()
        } else {
            let q = (i - c) / 2 + 1;
            base[i - 2 * q].iter().map(|&(col, w)| (col + q, w)).collect()
        }
    }
}

/// Realizes one row as a chain of pairwise averages on the web. `cols`
/// maps row columns to web ids.
fn apply_row<T: Scalar>(web: &mut Web<'_, T>, cols: impl Fn(usize) -> usize, row: &Row) -> Result<usize> {
    match row.as_slice() {
        [(a, _)] => Ok(cols(*a)),
        [(a, _), (b, wb)] => web.average(cols(*a), cols(*b), T::of(*wb)),
        [(a, wa), (b, wb), (c, wc)] if *wa == 0.125 && *wb == 0.75 && *wc == 0.125 => {
            // midpoint step then two smoothing passes
            let qa = web.average(cols(*a), cols(*b), T::of(0.75))?;
            let qb = web.average(cols(*b), cols(*c), T::of(0.25))?;
            web.average(qa, qb, T::half())
        }
        [_, _, _] => {
            // inductive means: heaviest weights first, ties to the lower column
            let mut terms = row.clone();
            terms.sort_by(|x, y| y.1.total_cmp(&x.1).then(x.0.cmp(&y.0)));
            let (p1, w1) = terms[0];
            let (p2, w2) = terms[1];
            let (p3, w3) = terms[2];
            let x = web.average(cols(p1), cols(p2), T::of(w2 / (w1 + w2)))?;
            web.average(x, cols(p3), T::of(w3))
        }
        _ => Err(Error::UnsupportedDegree(row.len())),
    }
}

/// One level of refinement: level-`n` polygon (2^n + k points) to level
/// `n + 1`.
pub fn olr_subdivide<T: Scalar>(surface: &Surface<T>, polygon: &ControlPolygon<T>, n: u32) -> Result<ControlPolygon<T>> {
    let k = polygon.points().len().saturating_sub(1usize << n);
    if k == 0 {
        return Err(Error::InvalidParameter(format!(
            "{} points is not a level-{n} polygon",
            polygon.points().len()
        )));
    }
    check_degree(k)?;
    subdivide_with(surface, &Stencils::new(k), polygon, n)
}

fn subdivide_with<T: Scalar>(
    surface: &Surface<T>,
    stencils: &Stencils,
    polygon: &ControlPolygon<T>,
    n: u32,
) -> Result<ControlPolygon<T>> {
    let mut web = Web::from_polygon(surface, polygon.points(), polygon.segments());
    let count = (1usize << (n + 1)) + stencils.k;
    let ids = (0..count)
        .map(|i| apply_row(&mut web, |c| c, &stencils.row(n, i)))
        .collect::<Result<Vec<_>>>()?;
    ControlPolygon::from_web(&mut web, &ids)
}

/// A node of the expansion tree: the local B-spline segment on interval
/// `index` of level `level`, with its `k + 1` control points.
#[derive(Debug, Clone)]
pub struct ExpansionNode<T> {
    pub level: u32,
    pub index: usize,
    pub polygon: ControlPolygon<T>,
}

impl<T: Scalar> ExpansionNode<T> {
    pub fn root(polygon: ControlPolygon<T>) -> Self {
        Self {
            level: 0,
            index: 0,
            polygon,
        }
    }

    /// Parameter interval covered, in curve parameters.
    pub fn interval(&self) -> (T, T) {
        let w = T::one() / T::of_usize(1usize << self.level);
        (T::of_usize(self.index) * w, T::of_usize(self.index + 1) * w)
    }

    fn children(&self, surface: &Surface<T>, stencils: &Stencils) -> Result<(Self, Self)> {
        let k = stencils.k;
        let j = self.index;
        let mut web = Web::from_polygon(surface, self.polygon.points(), self.polygon.segments());
        let ids = (2 * j..=2 * j + k + 1)
            .map(|r| apply_row(&mut web, |c| c - j, &stencils.row(self.level, r)))
            .collect::<Result<Vec<_>>>()?;
        let left = ControlPolygon::from_web(&mut web, &ids[..=k])?;
        let right = ControlPolygon::from_web(&mut web, &ids[1..])?;
        Ok((
            Self {
                level: self.level + 1,
                index: 2 * j,
                polygon: left,
            },
            Self {
                level: self.level + 1,
                index: 2 * j + 1,
                polygon: right,
            },
        ))
    }

    /// Local knots `u_{s-k+1} .. u_{s+k}` of this span, in level units.
    pub(crate) fn local_knots(&self, k: usize) -> Vec<T> {
        (self.index + 1..=self.index + 2 * k)
            .map(|m| T::of_usize(knot(k, self.level, m)))
            .collect()
    }
}

/// Greville abscissa of control point `g` at level `n`, in level units.
fn greville(k: usize, n: u32, g: usize) -> f64 {
    (g + 1..=g + k).map(|m| knot(k, n, m) as f64).sum::<f64>() / k as f64
}

/// Knot `m` of the open-uniform vector of level `n`, in level units.
fn knot(k: usize, n: u32, m: usize) -> usize {
    m.saturating_sub(k).min(1usize << n)
}

/// Local indices a leaf contributes to the output polygon: the points whose
/// Greville abscissa falls in its interval (the last leaf also gives the
/// end point). On a uniform tree this is exactly the level polygon.
fn emitted(k: usize, level: u32, index: usize) -> Vec<usize> {
    let last = index + 1 == 1usize << level;
    (0..=k)
        .filter(|&i| {
            let g = greville(k, level, index + i);
            (g >= index as f64 && g < (index + 1) as f64) || (last && i == k)
        })
        .collect()
}

struct Leaf<T> {
    level: u32,
    index: usize,
    polygon: ControlPolygon<T>,
}

fn collect_leaves<T: Scalar>(
    surface: &Surface<T>,
    stencils: &Stencils,
    polygon: &ControlPolygon<T>,
    mode: TraceMode,
    forced: &HashSet<(u32, usize)>,
) -> Result<Vec<Leaf<T>>> {
    let mut out = Vec::new();
    let mut stack = vec![ExpansionNode::root(polygon.clone())];
    while let Some(node) = stack.pop() {
        let force = forced.contains(&(node.level, node.index));
        if !force && mode.stops(surface, node.level, &node.polygon)? {
            out.push(Leaf {
                level: node.level,
                index: node.index,
                polygon: node.polygon,
            });
            continue;
        }
        let (l, r) = node.children(surface, stencils)?;
        stack.push(r);
        stack.push(l);
    }
    Ok(out)
}

/// Output polygon of a set of leaves: emitted nodes, their segments and the
/// leaf owning each node.
fn assemble<T: Scalar>(
    surface: &Surface<T>,
    k: usize,
    leaves: &[Leaf<T>],
) -> Result<(Vec<MeshPoint<T>>, Vec<GeodesicPath<T>>, Vec<usize>)> {
    let mut nodes = Vec::new();
    let mut owner = Vec::new();
    let mut local = Vec::new();
    for (li, leaf) in leaves.iter().enumerate() {
        for i in emitted(k, leaf.level, leaf.index) {
            nodes.push(leaf.polygon.points()[i]);
            owner.push(li);
            local.push(i);
        }
    }
    let mut segments = Vec::with_capacity(nodes.len().saturating_sub(1));
    for s in 0..nodes.len().saturating_sub(1) {
        let (la, lb) = (owner[s], owner[s + 1]);
        if la == lb {
            let route = &leaves[la].polygon.segments()[local[s]..local[s + 1]];
            if route.len() == 1 {
                segments.push(route[0].clone());
            } else {
                segments.push(connect(surface, &nodes[s], &nodes[s + 1], route)?);
            }
        } else {
            segments.push(surface.shortest_path(&nodes[s], &nodes[s + 1])?);
        }
    }
    Ok((nodes, segments, owner))
}

/// Nodes of the output polygon that break the adaptive criteria.
fn violations<T: Scalar>(surface: &Surface<T>, segments: &[GeodesicPath<T>], theta: T) -> Result<Vec<usize>> {
    let max_len = surface.mesh().longest_edge();
    let mut bad = Vec::new();
    for (i, s) in segments.iter().enumerate() {
        if s.length > max_len {
            bad.push(i);
            bad.push(i + 1);
        }
    }
    for i in 1..segments.len() {
        if turning_angle(surface, &segments[i - 1], &segments[i])? >= theta {
            bad.push(i);
        }
    }
    bad.sort_unstable();
    bad.dedup();
    Ok(bad)
}

/// Traces the curve by refinement: the full level polygon in uniform mode,
/// a depth-first visit of the expansion tree in adaptive mode.
pub fn olr_trace<T: Scalar>(surface: &Surface<T>, polygon: &ControlPolygon<T>, mode: TraceMode) -> Result<TracedCurve<T>> {
    let k = polygon.degree();
    check_degree(k)?;
    let stencils = Stencils::new(k);
    match mode {
        TraceMode::Uniform { depth } => {
            let mut p = polygon.clone();
            for n in 0..depth {
                p = subdivide_with(surface, &stencils, &p, n)?;
            }
            let (nodes, segments) = p.into_parts();
            Ok(TracedCurve::new(surface.mesh(), nodes, segments, Scheme::Olr, mode))
        }
        TraceMode::Adaptive { theta } => {
            let theta = T::of(theta);
            let mut forced = HashSet::new();
            let mut pass = 0;
            loop {
                let leaves = collect_leaves(surface, &stencils, polygon, mode, &forced)?;
                let (nodes, segments, owner) = assemble(surface, k, &leaves)?;
                let bad = violations(surface, &segments, theta)?;
                pass += 1;
                let mut added = false;
                if pass <= REPAIR_PASSES {
                    for &b in &bad {
                        // split the coarsest leaf around the offending node
                        let around = [b.saturating_sub(1), b, (b + 1).min(owner.len() - 1)].map(|i| owner[i]);
                        let coarsest = around.iter().map(|&l| leaves[l].level).min().unwrap_or(0);
                        for &l in &around {
                            let leaf = &leaves[l];
                            if leaf.level == coarsest && leaf.level < MAX_DEPTH {
                                added |= forced.insert((leaf.level, leaf.index));
                            }
                        }
                    }
                }
                if !added {
                    return Ok(TracedCurve::new(surface.mesh(), nodes, segments, Scheme::Olr, mode));
                }
            }
        }
    }
}

/// Manifold de Boor recursion over `local` (k + 1 points) with the `2k`
/// local knots, at parameter `t` in the same units as the knots.
pub fn deboor_eval<T: Scalar>(surface: &Surface<T>, local: &ControlPolygon<T>, knots: &[T], t: T) -> Result<MeshPoint<T>> {
    let k = local.degree();
    if knots.len() != 2 * k {
        return Err(Error::InvalidParameter(format!("{} knots for degree {k}", knots.len())));
    }
    let mut web = Web::from_polygon(surface, local.points(), local.segments());
    let mut d: Vec<usize> = (0..=k).collect();
    for r in 1..=k {
        for j in (r..=k).rev() {
            let (a, b) = (knots[j - 1], knots[j + k - r]);
            let w = if b > a { ((t - a) / (b - a)).clamp01() } else { T::zero() };
            d[j] = web.average(d[j - 1], d[j], w)?;
        }
    }
    Ok(web.point(d[k]))
}

/// Descends the expansion tree to the leaf containing `t`; ties go left
/// when `prefer_left`. Also reports whether a tie occurred.
pub(crate) fn descend<T: Scalar>(
    surface: &Surface<T>,
    polygon: &ControlPolygon<T>,
    t: T,
    mode: TraceMode,
    prefer_left: bool,
) -> Result<(ExpansionNode<T>, bool)> {
    let k = polygon.degree();
    check_degree(k)?;
    let stencils = Stencils::new(k);
    let mut node = ExpansionNode::root(polygon.clone());
    let mut tie = false;
    while !mode.stops(surface, node.level, &node.polygon)? {
        let (a, b) = node.interval();
        let mid = (a + b) * T::half();
        let (l, r) = node.children(surface, &stencils)?;
        tie |= t == mid;
        node = if t < mid || (t == mid && prefer_left) { l } else { r };
    }
    Ok((node, tie))
}

/// de Boor evaluation on the leaf of the expansion tree containing `t`.
pub(crate) fn leaf_eval<T: Scalar>(surface: &Surface<T>, leaf: &ExpansionNode<T>, t: T) -> Result<MeshPoint<T>> {
    let k = leaf.polygon.degree();
    let scale = T::of_usize(1usize << leaf.level);
    deboor_eval(surface, &leaf.polygon, &leaf.local_knots(k), t * scale)
}

/// Evaluates the curve at `t`.
pub fn olr_point_eval<T: Scalar>(surface: &Surface<T>, polygon: &ControlPolygon<T>, t: T, mode: TraceMode) -> Result<MeshPoint<T>> {
    if t <= T::zero() {
        return Ok(polygon.first());
    }
    if t >= T::one() {
        return Ok(polygon.last());
    }
    let (leaf, _) = descend(surface, polygon, t, mode, true)?;
    leaf_eval(surface, &leaf, t)
}
