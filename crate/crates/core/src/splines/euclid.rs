//! Euclidean reference implementations: Bernstein and De Casteljau
//! evaluation, de Boor evaluation and knot insertion on open-uniform knot
//! vectors. These are the flat-plane oracles the manifold schemes reduce to.

use std::ops::{Add, Mul, Sub};

use crate::scalar::Scalar;
use crate::vector::{Vec2, Vec3};

/// Anything that can be combined affinely: scalars and vectors.
pub trait Affine<T>: Copy + Add<Output = Self> + Sub<Output = Self> + Mul<T, Output = Self> {}

impl<T: Scalar> Affine<T> for T {}
impl<T: Scalar> Affine<T> for Vec2<T> {}
impl<T: Scalar> Affine<T> for Vec3<T> {}

#[inline]
pub fn lerp<T: Scalar, P: Affine<T>>(a: P, b: P, w: T) -> P {
    a + (b - a) * w
}

/// Binomial coefficient as a float.
pub fn binomial<T: Scalar>(n: usize, i: usize) -> T {
    let i = i.min(n - i);
    let mut c = T::one();
    for j in 0..i {
        c = c * T::of_usize(n - j) / T::of_usize(j + 1);
    }
    c
}

/// Bernstein polynomial `B_i^k(t)`.
pub fn bernstein<T: Scalar>(k: usize, i: usize, t: T) -> T {
    binomial::<T>(k, i) * t.powi(i as i32) * (T::one() - t).powi((k - i) as i32)
}

/// Bézier curve evaluated in Bernstein form.
pub fn bezier_eval<T: Scalar, P: Affine<T>>(points: &[P], t: T) -> P {
    let k = points.len() - 1;
    let mut acc = points[0] * bernstein(k, 0, t);
    for (i, &p) in points.iter().enumerate().skip(1) {
        acc = acc + p * bernstein(k, i, t);
    }
    acc
}

/// De Casteljau split at `t`: the control polygons of the two halves.
pub fn de_casteljau_split<T: Scalar, P: Affine<T>>(points: &[P], t: T) -> (Vec<P>, Vec<P>) {
    let k = points.len() - 1;
    let mut row = points.to_vec();
    let mut left = vec![row[0]];
    let mut right = vec![row[k]];
    for r in 1..=k {
        row = row.windows(2).map(|w| lerp(w[0], w[1], t)).collect();
        left.push(row[0]);
        right.push(row[k - r]);
    }
    right.reverse();
    (left, right)
}

/// Bézier curve evaluated by the De Casteljau recursion.
pub fn de_casteljau<T: Scalar, P: Affine<T>>(points: &[P], t: T) -> P {
    de_casteljau_split(points, t).0[points.len() - 1]
}

/// Open-uniform knot vector of degree `k` at subdivision level `n`, in
/// units of the level: `k + 1` zeros, `1 .. 2^n - 1`, `k + 1` copies of `2^n`.
pub fn open_uniform_knots<T: Scalar>(k: usize, n: u32) -> Vec<T> {
    let intervals = 1usize << n;
    let mut u = vec![T::zero(); k + 1];
    u.extend((1..intervals).map(T::of_usize));
    u.extend(std::iter::repeat(T::of_usize(intervals)).take(k + 1));
    u
}

/// Cox-de Boor basis function `N_{i,k}` on `knots`. The last non-empty
/// interval is closed on the right.
pub fn bspline_basis<T: Scalar>(knots: &[T], i: usize, k: usize, t: T) -> T {
    if k == 0 {
        let (a, b) = (knots[i], knots[i + 1]);
        let last = *knots.last().unwrap();
        let inside = (a <= t && t < b) || (t == last && b == last && a < b);
        return if inside { T::one() } else { T::zero() };
    }
    let mut v = T::zero();
    let d0 = knots[i + k] - knots[i];
    if d0 > T::zero() {
        v = v + (t - knots[i]) / d0 * bspline_basis(knots, i, k - 1, t);
    }
    let d1 = knots[i + k + 1] - knots[i + 1];
    if d1 > T::zero() {
        v = v + (knots[i + k + 1] - t) / d1 * bspline_basis(knots, i + 1, k - 1, t);
    }
    v
}

/// B-spline curve evaluated as a sum of basis functions.
pub fn bspline_eval<T: Scalar, P: Affine<T>>(points: &[P], knots: &[T], k: usize, t: T) -> P {
    let mut acc = points[0] * bspline_basis(knots, 0, k, t);
    for (i, &p) in points.iter().enumerate().skip(1) {
        acc = acc + p * bspline_basis(knots, i, k, t);
    }
    acc
}

/// Index `s` of the knot span `[u_s, u_{s+1})` containing `t`, restricted
/// to non-empty spans.
pub fn find_span<T: Scalar>(knots: &[T], k: usize, t: T) -> usize {
    let n = knots.len() - k - 2;
    if t >= knots[n + 1] {
        return n;
    }
    let mut s = k;
    while s < n && t >= knots[s + 1] {
        s += 1;
    }
    s
}

/// de Boor evaluation: `local` holds the `k + 1` control points of span
/// `[u_s, u_{s+1})`, and `knots` the `2k` knots `u_{s-k+1} .. u_{s+k}`.
pub fn de_boor<T: Scalar, P: Affine<T>>(local: &[P], knots: &[T], t: T) -> P {
    let k = local.len() - 1;
    debug_assert_eq!(knots.len(), 2 * k);
    let mut d = local.to_vec();
    for r in 1..=k {
        for j in (r..=k).rev() {
            // knots[j - 1] is u_{s-k+j}, knots[j + k - r] is u_{s+j-r+1}
            let a = knots[j - 1];
            let b = knots[j + k - r];
            let w = if b > a { (t - a) / (b - a) } else { T::zero() };
            d[j] = lerp(d[j - 1], d[j], w);
        }
    }
    d[k]
}

/// Inserts knot `u` once (Boehm), returning the new knots and points.
pub fn insert_knot<T: Scalar, P: Affine<T>>(points: &[P], knots: &[T], k: usize, u: T) -> (Vec<P>, Vec<T>) {
    let s = find_span(knots, k, u);
    let mut out = Vec::with_capacity(points.len() + 1);
    for i in 0..=points.len() {
        if i + k <= s {
            out.push(points[i]);
        } else if i > s {
            out.push(points[i - 1]);
        } else {
            let a = (u - knots[i]) / (knots[i + k] - knots[i]);
            out.push(lerp(points[i - 1], points[i], a));
        }
    }
    let mut u_new = knots.to_vec();
    u_new.insert(s + 1, u);
    (out, u_new)
}

/// One round of midpoint knot insertion on the open-uniform vector of level
/// `n`: the Euclidean counterpart of one open Lane-Riesenfeld step.
pub fn refine_open_uniform<T: Scalar, P: Affine<T>>(points: &[P], k: usize, n: u32) -> Vec<P> {
    let mut knots: Vec<T> = open_uniform_knots::<T>(k, n).into_iter().map(|x| x * T::two()).collect();
    let mut pts = points.to_vec();
    for j in 0..(1usize << n) {
        let u = T::of_usize(2 * j + 1);
        let (p, kn) = insert_knot(&pts, &knots, k, u);
        pts = p;
        knots = kn;
    }
    pts
}

/// Bézier control points of the polynomial piece on span `s` of a B-spline,
/// by raising the multiplicity of the span's end knots to `k`.
pub fn span_to_bezier<T: Scalar, P: Affine<T>>(points: &[P], knots: &[T], k: usize, s: usize) -> Vec<P> {
    let (a, b) = (knots[s], knots[s + 1]);
    let mut pts = points.to_vec();
    let mut kn = knots.to_vec();
    let mut s = s;
    for &u in &[a, b] {
        let mult = kn.iter().filter(|&&x| x == u).count();
        for _ in mult..k {
            // insert u keeping the span that starts at `a`
            let (p, n) = insert_knot(&pts, &kn, k, u);
            pts = p;
            kn = n;
            if u == a {
                s += 1;
            }
        }
    }
    // the span [a, b) now has k-fold knots at both ends; its Bézier points
    // are the k + 1 control points ending at index s
    pts[s - k..=s].to_vec()
}

/// Bézier points of a uniform cubic B-spline segment, through the same
/// pairwise averages the manifold conversion uses.
pub fn uniform_cubic_to_bezier<T: Scalar, P: Affine<T>>(p: [P; 4]) -> [P; 4] {
    let third = T::one() / T::of(3.0);
    let q1 = lerp(p[1], p[2], third);
    let q2 = lerp(p[1], p[2], T::one() - third);
    let q0 = lerp(lerp(p[0], p[1], T::one() - third), q1, T::half());
    let q3 = lerp(q2, lerp(p[2], p[3], third), T::half());
    [q0, q1, q2, q3]
}

/// Bézier points of the first segment of an open cubic B-spline with
/// knots `0 0 0 0 1 2 3 ...`.
pub fn open_cubic_to_bezier<T: Scalar, P: Affine<T>>(p: [P; 4]) -> [P; 4] {
    let q2 = lerp(p[1], p[2], T::half());
    let q3 = lerp(q2, lerp(p[2], p[3], T::one() / T::of(3.0)), T::half());
    [p[0], p[1], q2, q3]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bernstein_partition_of_unity() {
        for k in 0..=10 {
            for j in 0..=20 {
                let t = j as f64 / 20.0;
                let s: f64 = (0..=k).map(|i| bernstein(k, i, t)).sum();
                assert!((s - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn bernstein_matches_de_casteljau() {
        let pts = [
            Vec2::new(0.3, -1.0),
            Vec2::new(2.0, 4.0),
            Vec2::new(-3.0, 1.5),
            Vec2::new(5.0, 0.25),
            Vec2::new(1.0, 1.0),
        ];
        for j in 0..=16 {
            let t = j as f64 / 16.0;
            let a = bezier_eval(&pts, t);
            let b = de_casteljau(&pts, t);
            assert!((a - b).norm() < 1e-12);
        }
        assert_eq!(bezier_eval(&pts, 0.0), pts[0]);
    }

    #[test]
    fn cubic_at_half() {
        let pts = [
            Vec2::new(0.0, 0.0),
            Vec2::new(0.0, 3.0),
            Vec2::new(3.0, 3.0),
            Vec2::new(3.0, 0.0),
        ];
        assert!((bezier_eval(&pts, 0.5) - Vec2::new(1.5, 2.25)).norm() < 1e-15);
    }

    #[test]
    fn open_uniform_b_spline_is_the_bezier_curve() {
        let pts = [0.0, 2.0, -1.0, 5.0];
        let knots = open_uniform_knots::<f64>(3, 0);
        for j in 0..=10 {
            let t = j as f64 / 10.0;
            assert!((bspline_eval(&pts, &knots, 3, t) - bezier_eval(&pts, t)).abs() < 1e-12);
        }
    }

    #[test]
    fn knot_insertion_preserves_the_curve() {
        let pts = [0.0, 2.0, -1.0, 5.0, 3.0];
        let knots = [0.0, 0.0, 0.0, 0.0, 0.5, 1.0, 1.0, 1.0, 1.0];
        let (p2, k2) = insert_knot(&pts, &knots, 3, 0.3);
        for j in 0..=10 {
            let t = j as f64 / 10.0;
            let a = bspline_eval(&pts, &knots, 3, t);
            let b = bspline_eval(&p2, &k2, 3, t);
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn refined_levels_have_two_to_the_n_plus_k_points() {
        let mut pts = vec![0.0, 1.0, 4.0, 2.0];
        for n in 0..4 {
            pts = refine_open_uniform(&pts, 3, n);
            assert_eq!(pts.len(), (1 << (n + 1)) + 3);
        }
    }

    #[test]
    fn de_boor_matches_basis_sum() {
        let pts = [0.0, 6.0, 6.0, 0.0, 2.0, -3.0];
        let knots = [0.0, 0.0, 0.0, 0.0, 1.0, 2.0, 3.0, 3.0, 3.0, 3.0];
        for j in 0..30 {
            let t = j as f64 / 10.0;
            let s = find_span(&knots, 3, t);
            let v = de_boor(&pts[s - 3..=s], &knots[s - 2..=s + 3], t);
            assert!((v - bspline_eval(&pts, &knots, 3, t)).abs() < 1e-12);
        }
    }

    #[test]
    fn uniform_conversion_example() {
        let p = [
            Vec2::new(0.0, 0.0),
            Vec2::new(6.0, 0.0),
            Vec2::new(6.0, 6.0),
            Vec2::new(0.0, 6.0),
        ];
        let want = [(5.0, 1.0), (6.0, 2.0), (6.0, 4.0), (5.0, 5.0)];
        for (q, w) in uniform_cubic_to_bezier(p).iter().zip(want) {
            assert!((*q - Vec2::new(w.0, w.1)).norm() < 1e-12);
        }
    }

    #[test]
    fn open_conversion_example() {
        let p = [
            Vec2::new(0.0, 0.0),
            Vec2::new(1.0, 0.0),
            Vec2::new(1.0, 1.0),
            Vec2::new(0.0, 1.0),
        ];
        let want = [(0.0, 0.0), (1.0, 0.0), (1.0, 0.5), (5.0 / 6.0, 0.75)];
        for (q, w) in open_cubic_to_bezier(p).iter().zip(want) {
            assert!((*q - Vec2::new(w.0, w.1)).norm() < 1e-12);
        }
    }

    #[test]
    fn factorized_conversions_agree_with_knot_insertion() {
        let p: [f64; 4] = [0.5, -2.0, 3.0, 1.25];
        let uniform = span_to_bezier(&p, &[-3.0, -2.0, -1.0, 0.0, 1.0, 2.0, 3.0, 4.0], 3, 3);
        let open = span_to_bezier(&p, &[0.0, 0.0, 0.0, 0.0, 1.0, 2.0, 3.0, 4.0], 3, 3);
        for (a, b) in uniform_cubic_to_bezier(p).iter().zip(&uniform) {
            assert!((a - b).abs() < 1e-12);
        }
        for (a, b) in open_cubic_to_bezier(p).iter().zip(&open) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn span_conversion_reproduces_each_piece() {
        let pts = [0.0, 6.0, 6.0, 0.0, 2.0, -3.0];
        let knots = [0.0, 0.0, 0.0, 0.0, 1.0, 2.0, 3.0, 3.0, 3.0, 3.0];
        for s in 3..6 {
            let bez = span_to_bezier(&pts, &knots, 3, s);
            let (a, b) = (knots[s], knots[s + 1]);
            for j in 0..=8 {
                let u = j as f64 / 8.0;
                let t = a + (b - a) * u;
                assert!((bezier_eval(&bez, u) - bspline_eval(&pts, &knots, 3, t)).abs() < 1e-12);
            }
        }
    }
}
