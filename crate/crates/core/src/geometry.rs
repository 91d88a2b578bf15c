//! Planar predicates and the structure-of-arrays point container.
//!
//! The two predicates are evaluated in plain double precision exactly as
//! written below. On integer coordinates with magnitude below 2^25 every
//! difference and product is exactly representable, so both tests are
//! error-free there; all oracle comparisons in the test suites use such
//! inputs.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    #[inline]
    pub const fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }

    #[inline]
    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    /// Bitwise identity, distinguishing `0.0` from `-0.0`.
    #[inline]
    pub fn bits(&self) -> (u64, u64) {
        (self.x.to_bits(), self.y.to_bits())
    }
}

impl From<(f64, f64)> for Point {
    fn from((x, y): (f64, f64)) -> Self {
        Point { x, y }
    }
}

/// Ordered pair `p -> q`. `p == q` is allowed; nothing is left of such an edge.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DirectedEdge {
    pub p: Point,
    pub q: Point,
}

impl DirectedEdge {
    #[inline]
    pub const fn new(p: Point, q: Point) -> Self {
        DirectedEdge { p, q }
    }

    #[inline]
    pub fn reversed(&self) -> Self {
        DirectedEdge {
            p: self.q,
            q: self.p,
        }
    }
}

/// Strict left-of test: `(p.x - u.x)(q.y - u.y) > (p.y - u.y)(q.x - u.x)`.
///
/// Collinear points are not left.
#[inline(always)]
pub fn is_left_of(u: Point, e: &DirectedEdge) -> bool {
    (e.p.x - u.x) * (e.q.y - u.y) > (e.p.y - u.y) * (e.q.x - u.x)
}

/// Whether `u` lies strictly farther than `u_prime` from the line through `e`,
/// measured toward the left side: `(q.y - p.y)(u.x - u'.x) < (q.x - p.x)(u.y - u'.y)`.
#[inline(always)]
pub fn is_farther(u: Point, u_prime: Point, e: &DirectedEdge) -> bool {
    (e.q.y - e.p.y) * (u.x - u_prime.x) < (e.q.x - e.p.x) * (u.y - u_prime.y)
}

/// Selection rule for the farthest point of a subset.
///
/// Strictly farther wins. Among points at exactly the same distance the one
/// further along `p -> q` wins, so the selected point is always an endpoint of
/// any run of equidistant candidates and the choice does not depend on the
/// order in which candidates are visited.
#[inline(always)]
pub fn is_better_apex(u: Point, incumbent: Point, e: &DirectedEdge) -> bool {
    let dx = e.q.x - e.p.x;
    let dy = e.q.y - e.p.y;
    let lhs = dy * (u.x - incumbent.x);
    let rhs = dx * (u.y - incumbent.y);
    (lhs < rhs) | ((lhs == rhs) & (dx * (u.x - incumbent.x) + dy * (u.y - incumbent.y) > 0.0))
}

/// Structure-of-arrays point container.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct PointSet {
    xs: Vec<f64>,
    ys: Vec<f64>,
}

impl PointSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_capacity(n: usize) -> Self {
        PointSet {
            xs: Vec::with_capacity(n),
            ys: Vec::with_capacity(n),
        }
    }

    /// Builds a set from two coordinate arrays of equal length.
    pub fn from_coords(xs: Vec<f64>, ys: Vec<f64>) -> Result<Self> {
        if xs.len() != ys.len() {
            return Err(Error::LengthMismatch {
                xs: xs.len(),
                ys: ys.len(),
            });
        }
        Ok(PointSet { xs, ys })
    }

    /// Like [`PointSet::from_coords`] but also rejects non-finite coordinates.
    pub fn from_finite_coords(xs: Vec<f64>, ys: Vec<f64>) -> Result<Self> {
        let set = Self::from_coords(xs, ys)?;
        if let Some(i) = set.iter().position(|p| !p.is_finite()) {
            return Err(Error::NonFinite { index: i });
        }
        Ok(set)
    }

    pub fn from_points<I: IntoIterator<Item = Point>>(points: I) -> Self {
        let (xs, ys) = points.into_iter().map(|p| (p.x, p.y)).unzip();
        PointSet { xs, ys }
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.xs.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.xs.is_empty()
    }

    pub fn push(&mut self, p: Point) {
        self.xs.push(p.x);
        self.ys.push(p.y);
    }

    #[inline]
    pub fn get(&self, i: usize) -> Point {
        Point::new(self.xs[i], self.ys[i])
    }

    pub fn xs(&self) -> &[f64] {
        &self.xs
    }

    pub fn ys(&self) -> &[f64] {
        &self.ys
    }

    pub fn iter(&self) -> impl ExactSizeIterator<Item = Point> + '_ {
        self.xs
            .iter()
            .zip(&self.ys)
            .map(|(&x, &y)| Point::new(x, y))
    }

    pub fn as_mut(&mut self) -> PointsMut<'_> {
        PointsMut {
            xs: &mut self.xs,
            ys: &mut self.ys,
        }
    }

    pub fn into_coords(self) -> (Vec<f64>, Vec<f64>) {
        (self.xs, self.ys)
    }
}

impl FromIterator<Point> for PointSet {
    fn from_iter<I: IntoIterator<Item = Point>>(iter: I) -> Self {
        Self::from_points(iter)
    }
}

/// Mutable view over a contiguous range of a [`PointSet`].
#[derive(Debug)]
pub struct PointsMut<'a> {
    pub xs: &'a mut [f64],
    pub ys: &'a mut [f64],
}

impl<'a> PointsMut<'a> {
    /// Wraps two coordinate slices. Panics if their lengths differ.
    pub fn new(xs: &'a mut [f64], ys: &'a mut [f64]) -> Self {
        assert_eq!(xs.len(), ys.len(), "coordinate arrays differ in length");
        PointsMut { xs, ys }
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.xs.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.xs.is_empty()
    }

    #[inline]
    pub fn get(&self, i: usize) -> Point {
        Point::new(self.xs[i], self.ys[i])
    }

    #[inline]
    pub fn set(&mut self, i: usize, p: Point) {
        self.xs[i] = p.x;
        self.ys[i] = p.y;
    }

    pub fn reborrow(&mut self) -> PointsMut<'_> {
        PointsMut {
            xs: self.xs,
            ys: self.ys,
        }
    }

    pub fn split_at_mut(self, mid: usize) -> (PointsMut<'a>, PointsMut<'a>) {
        let (xl, xr) = self.xs.split_at_mut(mid);
        let (yl, yr) = self.ys.split_at_mut(mid);
        (PointsMut { xs: xl, ys: yl }, PointsMut { xs: xr, ys: yr })
    }

    pub fn slice(self, start: usize, end: usize) -> PointsMut<'a> {
        PointsMut {
            xs: &mut self.xs[start..end],
            ys: &mut self.ys[start..end],
        }
    }

    /// `memmove` of `count` points from `src` to `dst`.
    pub fn copy_within(&mut self, src: usize, dst: usize, count: usize) {
        self.xs.copy_within(src..src + count, dst);
        self.ys.copy_within(src..src + count, dst);
    }

    pub fn iter(&self) -> impl ExactSizeIterator<Item = Point> + '_ {
        self.xs
            .iter()
            .zip(self.ys.iter())
            .map(|(&x, &y)| Point::new(x, y))
    }
}

#[inline]
fn lower_left(a: (f64, f64, usize), b: (f64, f64, usize)) -> (f64, f64, usize) {
    if (b.0, b.1, b.2) < (a.0, a.1, a.2) {
        b
    } else {
        a
    }
}

#[inline]
fn upper_right(a: (f64, f64, usize), b: (f64, f64, usize)) -> (f64, f64, usize) {
    // larger x, then larger y, then smaller index
    if b.0 > a.0 || (b.0 == a.0 && (b.1 > a.1 || (b.1 == a.1 && b.2 < a.2))) {
        b
    } else {
        a
    }
}

/// Indices of the leftmost and rightmost points.
///
/// Ties on x go to the smaller y for the leftmost point and to the larger y
/// for the rightmost point; exact duplicates resolve to the lowest index.
pub fn find_extremes(xs: &[f64], ys: &[f64]) -> Result<(usize, usize)> {
    if xs.is_empty() {
        return Err(Error::EmptyInput);
    }
    debug_assert_eq!(xs.len(), ys.len());
    Ok(extremes_in(xs, ys, 0))
}

fn extremes_in(xs: &[f64], ys: &[f64], offset: usize) -> (usize, usize) {
    // x-only scan first; y is consulted only for ties on the extreme x.
    let (mut min_x, mut max_x) = (xs[0], xs[0]);
    for &x in &xs[1..] {
        min_x = if x < min_x { x } else { min_x };
        max_x = if x > max_x { x } else { max_x };
    }
    let mut lo = (f64::INFINITY, f64::INFINITY, usize::MAX);
    let mut hi = (f64::NEG_INFINITY, f64::NEG_INFINITY, usize::MAX);
    for (i, &x) in xs.iter().enumerate() {
        if x == min_x {
            lo = lower_left(lo, (x, ys[i], i + offset));
        }
        if x == max_x {
            hi = upper_right(hi, (x, ys[i], i + offset));
        }
    }
    (lo.2, hi.2)
}

/// Parallel variant of [`find_extremes`]; returns the same indices for any chunking.
pub fn find_extremes_par(xs: &[f64], ys: &[f64], chunk: usize) -> Result<(usize, usize)> {
    use rayon::prelude::*;
    if xs.is_empty() {
        return Err(Error::EmptyInput);
    }
    let chunk = chunk.max(1);
    let key = |i: usize| (xs[i], ys[i], i);
    let (lo, hi) = xs
        .par_chunks(chunk)
        .zip(ys.par_chunks(chunk))
        .enumerate()
        .map(|(c, (cx, cy))| {
            let (l, h) = extremes_in(cx, cy, c * chunk);
            (key(l), key(h))
        })
        .reduce_with(|a, b| (lower_left(a.0, b.0), upper_right(a.1, b.1)))
        .expect("non-empty");
    Ok((lo.2, hi.2))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e(px: f64, py: f64, qx: f64, qy: f64) -> DirectedEdge {
        DirectedEdge::new(Point::new(px, py), Point::new(qx, qy))
    }

    /// Exact orientation on integers: positive when `u` is left of `p -> q`.
    fn orient_exact(u: (i64, i64), p: (i64, i64), q: (i64, i64)) -> i128 {
        let (ux, uy) = (u.0 as i128, u.1 as i128);
        let (px, py) = (p.0 as i128, p.1 as i128);
        let (qx, qy) = (q.0 as i128, q.1 as i128);
        (px - ux) * (qy - uy) - (py - uy) * (qx - ux)
    }

    #[test]
    fn left_of_examples() {
        let x_axis = e(0.0, 0.0, 1.0, 0.0);
        assert!(is_left_of(Point::new(0.0, 1.0), &x_axis));
        assert!(!is_left_of(Point::new(0.5, 0.0), &x_axis));
        assert!(!is_left_of(Point::new(0.0, -1.0), &x_axis));
        assert!(orient_exact((0, -1), (0, 0), (1, 0)) < 0);
        assert!(orient_exact((0, 1), (0, 0), (1, 0)) > 0);
    }

    #[test]
    fn farther_examples() {
        let x_axis = e(0.0, 0.0, 1.0, 0.0);
        assert!(is_farther(
            Point::new(0.5, 2.0),
            Point::new(0.5, 1.0),
            &x_axis
        ));
        let u = Point::new(3.0, 7.0);
        assert!(!is_farther(u, u, &x_axis));
        // Left of the upward y-axis is negative x; (-2,0) is farther than (-1,5).
        let y_axis = e(0.0, 0.0, 0.0, 1.0);
        assert!(is_farther(
            Point::new(-2.0, 0.0),
            Point::new(-1.0, 5.0),
            &y_axis
        ));
        // cross-check with the signed distance along the left normal
        let dist = |u: Point, e: &DirectedEdge| {
            let (dx, dy) = (e.q.x - e.p.x, e.q.y - e.p.y);
            (-dy * (u.x - e.p.x) + dx * (u.y - e.p.y)) / dx.hypot(dy)
        };
        assert!(dist(Point::new(-2.0, 0.0), &y_axis) > dist(Point::new(-1.0, 5.0), &y_axis));
    }

    #[test]
    fn apex_tie_break_prefers_forward_endpoint() {
        let x_axis = e(0.0, 0.0, 4.0, 0.0);
        let a = Point::new(1.0, 2.0);
        let b = Point::new(3.0, 2.0);
        assert!(is_better_apex(b, a, &x_axis));
        assert!(!is_better_apex(a, b, &x_axis));
        assert!(!is_better_apex(a, a, &x_axis));
        assert!(is_better_apex(Point::new(0.0, 3.0), b, &x_axis));
    }

    #[test]
    fn extremes_examples() {
        assert_eq!(find_extremes(&[0.0], &[0.0]).unwrap(), (0, 0));
        assert_eq!(
            find_extremes(&[1.0, -2.0, 3.0], &[5.0, 0.0, 1.0]).unwrap(),
            (1, 2)
        );
        assert_eq!(
            find_extremes(&[0.0, 0.0, 0.0], &[1.0, -1.0, 0.0]).unwrap(),
            (1, 0)
        );
        assert!(matches!(find_extremes(&[], &[]), Err(Error::EmptyInput)));
    }

    #[test]
    fn extremes_parallel_matches_sequential() {
        let xs: Vec<f64> = (0..1000).map(|i| ((i * 37) % 101) as f64).collect();
        let ys: Vec<f64> = (0..1000).map(|i| ((i * 53) % 97) as f64).collect();
        let seq = find_extremes(&xs, &ys).unwrap();
        for chunk in [1, 7, 64, 1000, 5000] {
            assert_eq!(find_extremes_par(&xs, &ys, chunk).unwrap(), seq);
        }
    }

    #[test]
    fn from_coords_rejects_mismatch_and_nan() {
        assert!(PointSet::from_coords(vec![1.0], vec![]).is_err());
        assert!(matches!(
            PointSet::from_finite_coords(vec![1.0, f64::NAN], vec![0.0, 0.0]),
            Err(Error::NonFinite { index: 1 })
        ));
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        const LIM: i64 = 1 << 24;

        proptest! {
            #[test]
            fn sides_are_antisymmetric_off_the_line(
                u in (-LIM..LIM, -LIM..LIM),
                p in (-LIM..LIM, -LIM..LIM),
                q in (-LIM..LIM, -LIM..LIM),
            ) {
                let pt = |v: (i64, i64)| Point::new(v.0 as f64, v.1 as f64);
                let fwd = DirectedEdge::new(pt(p), pt(q));
                let exact = orient_exact(u, p, q);
                prop_assert_eq!(is_left_of(pt(u), &fwd), exact > 0);
                if exact != 0 {
                    prop_assert!(is_left_of(pt(u), &fwd) ^ is_left_of(pt(u), &fwd.reversed()));
                }
            }

            #[test]
            fn farther_is_irreflexive_and_asymmetric(
                u in (-LIM..LIM, -LIM..LIM),
                v in (-LIM..LIM, -LIM..LIM),
                p in (-LIM..LIM, -LIM..LIM),
                q in (-LIM..LIM, -LIM..LIM),
            ) {
                let pt = |v: (i64, i64)| Point::new(v.0 as f64, v.1 as f64);
                let edge = DirectedEdge::new(pt(p), pt(q));
                prop_assert!(!is_farther(pt(u), pt(u), &edge));
                prop_assert!(!(is_farther(pt(u), pt(v), &edge) && is_farther(pt(v), pt(u), &edge)));
            }

            #[test]
            fn extremes_ignore_permutation(
                pts in proptest::collection::vec((-1000i32..1000, -1000i32..1000), 1..200),
                seed in any::<u64>(),
            ) {
                // distinct x coordinates
                let mut seen = std::collections::HashSet::new();
                let pts: Vec<(f64, f64)> = pts.into_iter()
                    .filter(|p| seen.insert(p.0))
                    .map(|(x, y)| (x as f64, y as f64))
                    .collect();
                let mut shuffled = pts.clone();
                let n = shuffled.len();
                let mut s = seed;
                for i in (1..n).rev() {
                    s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                    shuffled.swap(i, (s >> 33) as usize % (i + 1));
                }
                let run = |v: &[(f64, f64)]| {
                    let xs: Vec<f64> = v.iter().map(|p| p.0).collect();
                    let ys: Vec<f64> = v.iter().map(|p| p.1).collect();
                    let (l, r) = find_extremes(&xs, &ys).unwrap();
                    (v[l], v[r])
                };
                prop_assert_eq!(run(&pts), run(&shuffled));
            }
        }
    }
}
