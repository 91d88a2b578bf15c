//! Branchy scalar extraction in the style of a Hoare partition.
//!
//! Two passes: the first swaps points left of edge A to the front, the
//! second swaps points left of edge B to the back of what remains. Used as
//! the baseline the vectorized loop is measured against.

use crate::extract::{ExtractOutcome, ExtractStats};
use crate::geometry::{is_better_apex, is_left_of, DirectedEdge, Point, PointsMut};

fn keep_best(best: &mut Option<Point>, u: Point, e: &DirectedEdge) {
    match best {
        Some(cur) if !is_better_apex(u, *cur, e) => {}
        _ => *best = Some(u),
    }
}

fn swap(points: &mut PointsMut<'_>, i: usize, j: usize) {
    points.xs.swap(i, j);
    points.ys.swap(i, j);
}

/// Same contract as [`crate::extract_subsets`].
pub fn hoare_extract(
    mut points: PointsMut<'_>,
    ea: &DirectedEdge,
    eb: &DirectedEdge,
) -> ExtractOutcome {
    let n = points.len();
    let (mut r1, mut r2) = (None, None);

    let (mut i, mut j) = (0usize, n);
    loop {
        while i < j && is_left_of(points.get(i), ea) {
            keep_best(&mut r1, points.get(i), ea);
            i += 1;
        }
        while i < j && !is_left_of(points.get(j - 1), ea) {
            j -= 1;
        }
        if i >= j {
            break;
        }
        swap(&mut points, i, j - 1);
    }
    let w_l = i;

    let (mut i, mut j) = (w_l, n);
    loop {
        while i < j && !is_left_of(points.get(i), eb) {
            i += 1;
        }
        while i < j && is_left_of(points.get(j - 1), eb) {
            keep_best(&mut r2, points.get(j - 1), eb);
            j -= 1;
        }
        if i >= j {
            break;
        }
        swap(&mut points, i, j - 1);
    }
    let w_r = j;

    ExtractOutcome {
        w_l,
        w_r,
        r1,
        r2,
        stats: ExtractStats {
            reads: n as u64,
            writes: (w_l + n - w_r) as u64,
            ..ExtractStats::default()
        },
        first_violation: None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::extract::{extract_subsets, ExtractConfig};
    use crate::geometry::PointSet;

    #[test]
    fn agrees_with_vectorized_extraction() {
        let mut s = 0x1234_5678_u64;
        let pts: Vec<Point> = (0..5000)
            .map(|_| {
                s = s.wrapping_mul(6364136223846793005).wrapping_add(1);
                let x = ((s >> 33) % 2001) as f64 - 1000.0;
                s = s.wrapping_mul(6364136223846793005).wrapping_add(1);
                let y = ((s >> 33) % 2001) as f64 - 1000.0;
                Point::new(x, y)
            })
            .collect();
        let ea = DirectedEdge::new(Point::new(-1000.0, -1000.0), Point::new(1000.0, 1000.0));
        let eb = ea.reversed();
        let mut a = PointSet::from_points(pts.clone());
        let mut b = PointSet::from_points(pts);
        let h = hoare_extract(a.as_mut(), &ea, &eb);
        let v = extract_subsets(b.as_mut(), &ea, &eb, &ExtractConfig::default());
        assert_eq!((h.w_l, h.w_r, h.r1, h.r2), (v.w_l, v.w_r, v.r1, v.r2));
        assert!((0..h.w_l).all(|i| is_left_of(a.get(i), &ea)));
        assert!((h.w_r..5000).all(|i| is_left_of(a.get(i), &eb)));
    }
}
