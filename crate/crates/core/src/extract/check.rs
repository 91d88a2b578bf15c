//! Per-iteration verification of the extraction loop invariant.
//!
//! With `w_l <= r_l <= r_r <= w_r` and `d` lanes, every iteration must leave:
//!  1. `[0, w_l)` holding only points left of edge A;
//!  2. `[w_r, n)` holding only points left of edge B (and not of A);
//!  3. `r_l - w_l >= d` or `w_r - r_r >= d`;
//!  4. every unclassified point still at its original place in `[r_l, r_r)`
//!     or in one of the two buffers.

use super::storage::Storage;
use crate::geometry::{is_left_of, DirectedEdge, Point};

pub(crate) struct InvariantChecker {
    original: Vec<Point>,
    lanes: usize,
    pub iterations: u64,
    pub violations: u64,
    pub first_violation: Option<String>,
}

impl InvariantChecker {
    pub fn new<S: Storage>(st: &S, lanes: usize) -> Self {
        InvariantChecker {
            original: (0..st.len()).map(|i| st.point(i)).collect(),
            lanes,
            iterations: 0,
            violations: 0,
            first_violation: None,
        }
    }

    fn fail(&mut self, msg: String) {
        self.violations += 1;
        self.first_violation.get_or_insert(msg);
    }

    /// `left_buf` was taken from `[0, left_buf.len())`, `right_buf` from the tail.
    #[allow(clippy::too_many_arguments)]
    pub fn check<S: Storage>(
        &mut self,
        st: &S,
        cursors: [usize; 4],
        ea: &DirectedEdge,
        eb: &DirectedEdge,
        left_buf: &[Point],
        right_buf: &[Point],
    ) {
        let [wl, rl, rr, wr] = cursors;
        let n = self.original.len();
        self.iterations += 1;
        let it = self.iterations;

        if !(wl <= rl && rl <= rr && rr <= wr && wr <= n) {
            self.fail(format!("iteration {it}: cursor order broken {cursors:?}"));
            return;
        }
        if let Some(i) = (0..wl).find(|&i| !is_left_of(st.point(i), ea)) {
            self.fail(format!(
                "iteration {it}: assertion 1, slot {i} is not in S1"
            ));
        }
        if let Some(i) = (wr..n).find(|&i| {
            let u = st.point(i);
            is_left_of(u, ea) || !is_left_of(u, eb)
        }) {
            self.fail(format!(
                "iteration {it}: assertion 2, slot {i} is not in S2"
            ));
        }
        if rl - wl < self.lanes && wr - rr < self.lanes {
            self.fail(format!(
                "iteration {it}: assertion 3, gaps {} and {}",
                rl - wl,
                wr - rr
            ));
        }
        let same = |a: Point, b: Point| a.bits() == b.bits();
        if let Some(i) = (rl..rr).find(|&i| !same(st.point(i), self.original[i])) {
            self.fail(format!(
                "iteration {it}: assertion 4, unread slot {i} was overwritten"
            ));
        }
        let lb_ok = left_buf
            .iter()
            .zip(&self.original)
            .all(|(&a, &b)| same(a, b));
        let rb_ok = right_buf
            .iter()
            .zip(&self.original[n - right_buf.len()..])
            .all(|(&a, &b)| same(a, b));
        if !(lb_ok && rb_ok) {
            self.fail(format!(
                "iteration {it}: assertion 4, buffered points changed"
            ));
        }
    }
}
