//! Multi-worker subset extraction.
//!
//! The range is cut into blocks of `b` points (a multiple of a cacheline)
//! dealt round-robin to `T` workers. Each worker runs the sequential
//! extraction over its own blocks as one logical array and marks the slots it
//! leaves undefined with NaN. Afterwards only the slots between the smallest
//! and largest per-worker cursors can be out of place; a sequential
//! three-way pass over those windows finishes the job.

use std::ops::Range;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::extract::kernel::Block;
use crate::extract::storage::Storage;
use crate::extract::{run_storage, ExtractConfig, ExtractOutcome, ExtractStats};
use crate::geometry::{is_better_apex, is_left_of, DirectedEdge, Point, PointsMut};

/// Points per 64-byte cacheline of one coordinate array.
pub const CACHELINE_POINTS: usize = 8;
/// 4 KiB per coordinate array.
pub const DEFAULT_BLOCK: usize = 512;

const SENTINEL: Point = Point::new(f64::NAN, f64::NAN);

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct WorkerLayout {
    pub workers: usize,
    pub block: usize,
}

impl WorkerLayout {
    pub fn new(workers: usize, block: usize) -> Result<Self> {
        if workers == 0 {
            return Err(Error::InvalidConfig(
                "worker count must be at least 1".into(),
            ));
        }
        if block < CACHELINE_POINTS || !block.is_multiple_of(CACHELINE_POINTS) {
            return Err(Error::InvalidConfig(format!(
                "block size must be a positive multiple of {CACHELINE_POINTS}, got {block}"
            )));
        }
        Ok(WorkerLayout { workers, block })
    }

    /// Number of points worker `t` owns in a range of `n`.
    pub fn owned(&self, n: usize, t: usize) -> usize {
        block_cyclic_indices(n, self.workers, self.block, t)
            .iter()
            .map(|r| r.len())
            .sum()
    }
}

impl Default for WorkerLayout {
    fn default() -> Self {
        WorkerLayout {
            workers: 1,
            block: DEFAULT_BLOCK,
        }
    }
}

/// Index ranges owned by worker `t`: blocks `i` with `i mod workers == t`,
/// block `i` covering `[i*block, min((i+1)*block, n))`, in ascending order.
pub fn block_cyclic_indices(n: usize, workers: usize, block: usize, t: usize) -> Vec<Range<usize>> {
    assert!(workers >= 1 && block >= 1 && t < workers);
    (t * block..n)
        .step_by(workers * block)
        .map(|start| start..(start + block).min(n))
        .collect()
}

/// What one worker reports after the parallel step. Cursors are global
/// indices into the range the workers shared.
#[derive(Clone, Debug, PartialEq)]
pub struct WorkerOutcome {
    pub worker: usize,
    /// Points the worker owned.
    pub owned: usize,
    pub w_l: usize,
    pub w_r: usize,
    pub r1: Option<Point>,
    pub r2: Option<Point>,
    pub stats: ExtractStats,
    pub first_violation: Option<String>,
}

/// Extremes of the per-worker cursors, over workers that own at least one point.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct MergeBounds {
    pub w_l_min: usize,
    pub w_l_max: usize,
    pub w_r_min: usize,
    pub w_r_max: usize,
}

impl MergeBounds {
    pub fn from_outcomes(outcomes: &[WorkerOutcome]) -> Self {
        let live = || outcomes.iter().filter(|o| o.owned > 0);
        if live().next().is_none() {
            return MergeBounds {
                w_l_min: 0,
                w_l_max: 0,
                w_r_min: 0,
                w_r_max: 0,
            };
        }
        MergeBounds {
            w_l_min: live().map(|o| o.w_l).min().unwrap(),
            w_l_max: live().map(|o| o.w_l).max().unwrap(),
            w_r_min: live().map(|o| o.w_r).min().unwrap(),
            w_r_max: live().map(|o| o.w_r).max().unwrap(),
        }
    }

    /// Whether the two cleanup windows are disjoint.
    pub fn is_ordered(&self) -> bool {
        self.w_l_max <= self.w_r_min
    }
}

/// One worker's blocks seen as a single logical array.
pub(crate) struct BlockView<'a> {
    xs: Vec<&'a mut [f64]>,
    ys: Vec<&'a mut [f64]>,
    block: usize,
    len: usize,
    #[cfg(test)]
    ids: Vec<usize>,
    #[cfg(test)]
    pub written: Vec<usize>,
}

impl<'a> BlockView<'a> {
    fn new(block: usize) -> Self {
        BlockView {
            xs: Vec::new(),
            ys: Vec::new(),
            block,
            len: 0,
            #[cfg(test)]
            ids: Vec::new(),
            #[cfg(test)]
            written: Vec::new(),
        }
    }

    fn push(&mut self, _id: usize, xs: &'a mut [f64], ys: &'a mut [f64]) {
        self.len += xs.len();
        self.xs.push(xs);
        self.ys.push(ys);
        #[cfg(test)]
        self.ids.push(_id);
    }

    #[inline(always)]
    fn locate(&self, i: usize) -> (usize, usize) {
        (i / self.block, i % self.block)
    }

    #[inline(always)]
    fn note_write(&mut self, _blk: usize) {
        #[cfg(test)]
        self.written.push(self.ids[_blk]);
    }

    #[inline(always)]
    fn write_run<const D: usize>(&mut self, start: usize, b: &Block<D>) {
        let (blk, off) = self.locate(start);
        if off + D <= self.xs[blk].len() {
            self.xs[blk][off..off + D].copy_from_slice(&b.x);
            self.ys[blk][off..off + D].copy_from_slice(&b.y);
            self.note_write(blk);
        } else {
            for lane in 0..D {
                self.set_point(start + lane, b.point(lane));
            }
        }
    }
}

impl Storage for BlockView<'_> {
    #[inline(always)]
    fn len(&self) -> usize {
        self.len
    }

    #[inline(always)]
    fn point(&self, i: usize) -> Point {
        let (blk, off) = self.locate(i);
        Point::new(self.xs[blk][off], self.ys[blk][off])
    }

    #[inline(always)]
    fn set_point(&mut self, i: usize, p: Point) {
        let (blk, off) = self.locate(i);
        self.xs[blk][off] = p.x;
        self.ys[blk][off] = p.y;
        self.note_write(blk);
    }

    #[inline(always)]
    fn load<const D: usize>(&self, at: usize) -> Block<D> {
        let (blk, off) = self.locate(at);
        let mut b = Block::zeroed();
        b.x.copy_from_slice(&self.xs[blk][off..off + D]);
        b.y.copy_from_slice(&self.ys[blk][off..off + D]);
        b
    }

    #[inline(always)]
    fn store_low<const D: usize>(&mut self, at: usize, b: &Block<D>, _k: usize) {
        self.write_run(at, b);
    }

    #[inline(always)]
    fn store_high<const D: usize>(&mut self, end: usize, b: &Block<D>, _k: usize) {
        self.write_run(end - D, b);
    }
}

/// Global index of logical position `l` of worker `t`.
fn global_index(l: usize, t: usize, layout: &WorkerLayout) -> usize {
    let b = layout.block;
    (l / b * layout.workers + t) * b + l % b
}

/// Global cursor for logical cursor `l` in a subsequence of `owned` points.
fn global_cursor(l: usize, owned: usize, t: usize, layout: &WorkerLayout, n: usize) -> usize {
    if owned == 0 {
        (t * layout.block).min(n)
    } else if l < owned {
        global_index(l, t, layout)
    } else {
        global_index(owned - 1, t, layout) + 1
    }
}

fn run_worker<'a>(
    mut view: BlockView<'a>,
    t: usize,
    n: usize,
    layout: &WorkerLayout,
    ea: &DirectedEdge,
    eb: &DirectedEdge,
    cfg: &ExtractConfig,
) -> (WorkerOutcome, BlockView<'a>) {
    let owned = view.len;
    let out = run_storage(&mut view, ea, eb, cfg);
    for l in out.w_l..out.w_r {
        view.set_point(l, SENTINEL);
    }
    let mut stats = out.stats;
    stats.cleanup_moves += (out.w_r - out.w_l) as u64;
    let outcome = WorkerOutcome {
        worker: t,
        owned,
        w_l: global_cursor(out.w_l, owned, t, layout, n),
        w_r: global_cursor(out.w_r, owned, t, layout, n),
        r1: out.r1,
        r2: out.r2,
        stats,
        first_violation: out.first_violation,
    };
    (outcome, view)
}

fn views<'a>(points: PointsMut<'a>, layout: &WorkerLayout) -> Vec<BlockView<'a>> {
    let mut views: Vec<BlockView<'a>> = (0..layout.workers)
        .map(|_| BlockView::new(layout.block))
        .collect();
    let PointsMut { xs, ys } = points;
    for (i, (cx, cy)) in xs
        .chunks_mut(layout.block)
        .zip(ys.chunks_mut(layout.block))
        .enumerate()
    {
        views[i % layout.workers].push(i, cx, cy);
    }
    views
}

/// Runs worker `t` alone over its blocks of `points`. Slots it leaves
/// undefined are set to NaN.
pub fn worker_extract(
    points: PointsMut<'_>,
    layout: &WorkerLayout,
    t: usize,
    ea: &DirectedEdge,
    eb: &DirectedEdge,
    cfg: &ExtractConfig,
) -> WorkerOutcome {
    assert!(t < layout.workers);
    let n = points.len();
    let view = views(points, layout).swap_remove(t);
    run_worker(view, t, n, layout, ea, eb, cfg).0
}

/// The parallel step: every worker extracts from its own blocks concurrently.
pub fn parallel_step(
    points: PointsMut<'_>,
    layout: &WorkerLayout,
    ea: &DirectedEdge,
    eb: &DirectedEdge,
    cfg: &ExtractConfig,
) -> Vec<WorkerOutcome> {
    let n = points.len();
    views(points, layout)
        .into_par_iter()
        .enumerate()
        .map(|(t, v)| run_worker(v, t, n, layout, ea, eb, cfg).0)
        .collect()
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
enum Slot {
    First,
    Second,
    Undefined,
}

#[inline]
fn slot_class(u: Point, ea: &DirectedEdge, eb: &DirectedEdge, index: usize) -> Result<Slot> {
    if u.x.is_nan() {
        Ok(Slot::Undefined)
    } else if is_left_of(u, ea) {
        Ok(Slot::First)
    } else if is_left_of(u, eb) {
        Ok(Slot::Second)
    } else {
        Err(Error::CorruptParallelStep { index })
    }
}

fn merge_apex(cands: impl Iterator<Item = Option<Point>>, e: &DirectedEdge) -> Option<Point> {
    cands.flatten().fold(None, |best, u| match best {
        Some(cur) if !is_better_apex(u, cur, e) => Some(cur),
        _ => Some(u),
    })
}

/// Sequential cleanup after [`parallel_step`] on the same `points`.
///
/// Only the windows `[w_l_min, w_l_max)` and `[w_r_min, w_r_max)` are
/// scanned; S1 slots are compacted upward from `w_l_min`, S2 slots downward
/// from `w_r_max`, and vacated slots become NaN. When the windows overlap
/// they are handled as one three-way partition.
pub fn merge_and_cleanup(
    mut points: PointsMut<'_>,
    outcomes: &[WorkerOutcome],
    ea: &DirectedEdge,
    eb: &DirectedEdge,
) -> Result<ExtractOutcome> {
    let bounds = MergeBounds::from_outcomes(outcomes);
    let mut moves = 0u64;
    let (wl, wr) = if bounds.is_ordered() {
        let mut w = bounds.w_l_min;
        for i in bounds.w_l_min..bounds.w_l_max {
            match slot_class(points.get(i), ea, eb, i)? {
                Slot::First => {
                    if i != w {
                        let u = points.get(i);
                        points.set(w, u);
                        points.set(i, SENTINEL);
                        moves += 2;
                    }
                    w += 1;
                }
                Slot::Undefined => {}
                Slot::Second => return Err(Error::CorruptParallelStep { index: i }),
            }
        }
        let mut v = bounds.w_r_max;
        for i in (bounds.w_r_min..bounds.w_r_max).rev() {
            match slot_class(points.get(i), ea, eb, i)? {
                Slot::Second => {
                    v -= 1;
                    if i != v {
                        let u = points.get(i);
                        points.set(v, u);
                        points.set(i, SENTINEL);
                        moves += 2;
                    }
                }
                Slot::Undefined => {}
                Slot::First => return Err(Error::CorruptParallelStep { index: i }),
            }
        }
        (w, v)
    } else {
        // Dutch national flag over [w_l_min, w_r_max).
        let (mut lo, mut mid, mut hi) = (bounds.w_l_min, bounds.w_l_min, bounds.w_r_max);
        let mut swap = |p: &mut PointsMut<'_>, a: usize, b: usize| {
            if a != b {
                let (u, v) = (p.get(a), p.get(b));
                p.set(a, v);
                p.set(b, u);
                moves += 2;
            }
        };
        while mid < hi {
            match slot_class(points.get(mid), ea, eb, mid)? {
                Slot::First => {
                    swap(&mut points, lo, mid);
                    lo += 1;
                    mid += 1;
                }
                Slot::Undefined => mid += 1,
                Slot::Second => {
                    hi -= 1;
                    swap(&mut points, mid, hi);
                }
            }
        }
        (lo, hi)
    };

    let mut stats = ExtractStats::default();
    let mut first_violation = None;
    for o in outcomes {
        stats += o.stats;
        if first_violation.is_none() {
            first_violation = o.first_violation.clone();
        }
    }
    stats.cleanup_moves += moves;
    Ok(ExtractOutcome {
        w_l: wl,
        w_r: wr,
        r1: merge_apex(outcomes.iter().map(|o| o.r1), ea),
        r2: merge_apex(outcomes.iter().map(|o| o.r2), eb),
        stats,
        first_violation,
    })
}

/// Multi-worker counterpart of [`crate::extract_subsets`] with the same contract.
///
/// The sub-cacheline head and tail of the range are set aside and placed
/// sequentially so that block ownership follows cacheline boundaries.
pub fn parallel_extract(
    mut points: PointsMut<'_>,
    ea: &DirectedEdge,
    eb: &DirectedEdge,
    layout: &WorkerLayout,
    cfg: &ExtractConfig,
) -> Result<ExtractOutcome> {
    let n = points.len();
    let head = points.xs.as_ptr().align_offset(64).min(n);
    let m = (n - head) / CACHELINE_POINTS * CACHELINE_POINTS;
    let tail = n - head - m;
    let side: Vec<Point> = (0..head)
        .chain(head + m..n)
        .map(|i| points.get(i))
        .collect();

    let merged = {
        let mut mid = points.reborrow().slice(head, head + m);
        let outcomes = parallel_step(mid.reborrow(), layout, ea, eb, cfg);
        merge_and_cleanup(mid, &outcomes, ea, eb)?
    };

    // Close the gaps the head and tail left around the two subsets.
    let len1 = merged.w_l;
    let len2 = m - merged.w_r;
    let mut moves = 0u64;
    for i in 0..head.min(len1) {
        let u = points.get(head + len1 - 1 - i);
        points.set(i, u);
        moves += 1;
    }
    for i in 0..tail.min(len2) {
        let u = points.get(head + merged.w_r + i);
        points.set(n - 1 - i, u);
        moves += 1;
    }

    let (mut wl, mut wr) = (len1, n - len2);
    let (mut r1, mut r2) = (merged.r1, merged.r2);
    for &u in &side {
        if is_left_of(u, ea) {
            points.set(wl, u);
            wl += 1;
            if r1.is_none_or(|cur| is_better_apex(u, cur, ea)) {
                r1 = Some(u);
            }
        } else if is_left_of(u, eb) {
            wr -= 1;
            points.set(wr, u);
            if r2.is_none_or(|cur| is_better_apex(u, cur, eb)) {
                r2 = Some(u);
            }
        }
    }

    let mut stats = merged.stats;
    stats.reads += side.len() as u64;
    stats.writes += ((wl - len1) + (n - len2 - wr)) as u64;
    stats.cleanup_moves += moves;
    Ok(ExtractOutcome {
        w_l: wl,
        w_r: wr,
        r1,
        r2,
        stats,
        first_violation: merged.first_violation,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::extract::{extract_subsets, LaneWidth};
    use crate::geometry::PointSet;

    fn lcg_points(n: usize, seed: u64, span: i64) -> Vec<Point> {
        let mut s = seed;
        let mut next = || {
            s = s
                .wrapping_mul(6364136223846793005)
                .wrapping_add(1442695040888963407);
            ((s >> 20) % (2 * span as u64 + 1)) as i64 - span
        };
        (0..n)
            .map(|_| Point::new(next() as f64, next() as f64))
            .collect()
    }

    fn sorted(mut v: Vec<Point>) -> Vec<(u64, u64)> {
        let mut k: Vec<(u64, u64)> = v.drain(..).map(|p| p.bits()).collect();
        k.sort_unstable();
        k
    }

    #[test]
    fn block_cyclic_examples() {
        let idx: Vec<usize> = block_cyclic_indices(12, 3, 1, 1)
            .into_iter()
            .flatten()
            .collect();
        assert_eq!(idx, vec![1, 4, 7, 10]);
        assert_eq!(block_cyclic_indices(10, 2, 4, 0), vec![0..4, 8..10]);
        assert_eq!(block_cyclic_indices(10, 2, 4, 1), vec![4..8]);
        assert_eq!(
            block_cyclic_indices(37, 1, 8, 0),
            vec![0..8, 8..16, 16..24, 24..32, 32..37]
        );
    }

    #[test]
    fn block_cyclic_partitions_the_range() {
        for n in 0..=1000 {
            for workers in 1..=8 {
                for block in [8, 16, 64] {
                    let mut seen = vec![0u8; n];
                    for t in 0..workers {
                        for r in block_cyclic_indices(n, workers, block, t) {
                            for i in r {
                                seen[i] += 1;
                            }
                        }
                    }
                    assert!(seen.iter().all(|&c| c == 1), "n={n} T={workers} b={block}");
                }
            }
        }
    }

    #[test]
    fn layout_validation() {
        assert!(WorkerLayout::new(0, 8).is_err());
        assert!(WorkerLayout::new(2, 12).is_err());
        assert!(WorkerLayout::new(2, 4).is_err());
        assert!(WorkerLayout::new(3, 24).is_ok());
    }

    #[test]
    fn workers_write_only_their_own_blocks() {
        let pts = lcg_points(3000, 5, 1000);
        let ea = DirectedEdge::new(Point::new(-1000.0, -3.0), Point::new(1000.0, 7.0));
        let eb = ea.reversed();
        let layout = WorkerLayout::new(3, 16).unwrap();
        let mut set = PointSet::from_points(pts);
        let cfg = ExtractConfig::default();
        let written: Vec<Vec<usize>> = views(set.as_mut(), &layout)
            .into_iter()
            .enumerate()
            .map(|(t, v)| run_worker(v, t, 3000, &layout, &ea, &eb, &cfg).1.written)
            .collect();
        for (t, blocks) in written.iter().enumerate() {
            assert!(!blocks.is_empty());
            assert!(
                blocks.iter().all(|&b| b % 3 == t),
                "worker {t} wrote a foreign block"
            );
        }
    }

    #[test]
    fn single_worker_matches_sequential() {
        let pts = lcg_points(777, 11, 500);
        let ea = DirectedEdge::new(Point::new(-500.0, 10.0), Point::new(500.0, -20.0));
        let eb = ea.reversed();
        let cfg = ExtractConfig::default();
        let mut a = PointSet::from_points(pts.clone());
        let seq = extract_subsets(a.as_mut(), &ea, &eb, &cfg);
        let mut b = PointSet::from_points(pts);
        let par = parallel_extract(
            b.as_mut(),
            &ea,
            &eb,
            &WorkerLayout::new(1, 64).unwrap(),
            &cfg,
        )
        .unwrap();
        assert_eq!(
            (seq.w_l, seq.w_r, seq.r1, seq.r2),
            (par.w_l, par.w_r, par.r1, par.r2)
        );
        let s1 = |s: &PointSet, w: usize| sorted((0..w).map(|i| s.get(i)).collect());
        assert_eq!(s1(&a, seq.w_l), s1(&b, par.w_l));
        assert!((0..par.w_l)
            .chain(par.w_r..777)
            .all(|i| !b.get(i).x.is_nan()));
    }

    #[test]
    fn worker_without_points() {
        let pts = lcg_points(40, 3, 100);
        let ea = DirectedEdge::new(Point::new(-100.0, 0.0), Point::new(100.0, 0.0));
        let mut set = PointSet::from_points(pts);
        let layout = WorkerLayout::new(8, 64).unwrap();
        let cfg = ExtractConfig::default();
        let o = worker_extract(set.as_mut(), &layout, 3, &ea, &ea.reversed(), &cfg);
        assert_eq!(o.owned, 0);
        assert_eq!((o.w_l, o.w_r, o.r1, o.r2), (40, 40, None, None));
        let o0 = worker_extract(set.as_mut(), &layout, 0, &ea, &ea.reversed(), &cfg);
        assert_eq!(o0.owned, 40);
    }

    #[test]
    fn cleanup_is_a_noop_when_workers_agree() {
        // Every block holds the same pattern, so every worker ends at the same cursors.
        let block = 8;
        let pattern: Vec<Point> = (0..block)
            .map(|i| Point::new(i as f64, if i < 4 { 1.0 } else { -1.0 }))
            .collect();
        let pts: Vec<Point> = (0..4).flat_map(|_| pattern.clone()).collect();
        let ea = DirectedEdge::new(Point::new(-10.0, 0.0), Point::new(10.0, 0.0));
        let eb = ea.reversed();
        let layout = WorkerLayout::new(1, block).unwrap();
        let mut set = PointSet::from_points(pts);
        let outs = parallel_step(set.as_mut(), &layout, &ea, &eb, &ExtractConfig::default());
        let bounds = MergeBounds::from_outcomes(&outs);
        assert_eq!(bounds.w_l_min, bounds.w_l_max);
        assert_eq!(bounds.w_r_min, bounds.w_r_max);
        let merged = merge_and_cleanup(set.as_mut(), &outs, &ea, &eb).unwrap();
        assert_eq!(merged.stats.cleanup_moves, 0);
        assert_eq!((merged.w_l, merged.w_r), (16, 16));
    }

    #[test]
    fn skewed_workers_need_cleanup() {
        // Worker 0 owns blocks full of S1, worker 1 blocks with only a few.
        let b = 8;
        let mut pts = Vec::new();
        for blk in 0..8 {
            for i in 0..b {
                let y = if blk % 2 == 0 || i == 0 {
                    1.0 + i as f64
                } else {
                    -1.0 - i as f64
                };
                pts.push(Point::new((blk * b + i) as f64, y));
            }
        }
        let ea = DirectedEdge::new(Point::new(-1.0, 0.0), Point::new(1000.0, 0.0));
        let eb = ea.reversed();
        let layout = WorkerLayout::new(2, b).unwrap();
        let mut set = PointSet::from_points(pts.clone());
        let outs = parallel_step(set.as_mut(), &layout, &ea, &eb, &ExtractConfig::default());
        assert!(outs[0].w_l > outs[1].w_l);
        let bounds = MergeBounds::from_outcomes(&outs);
        assert!(bounds.w_l_max > bounds.w_l_min);
        let merged = merge_and_cleanup(set.as_mut(), &outs, &ea, &eb).unwrap();
        let s1_expected = pts.iter().filter(|p| p.y > 0.0).count();
        assert_eq!(merged.w_l, s1_expected);
        assert_eq!(merged.w_r, s1_expected);
        assert!((0..64).all(|i| !set.get(i).x.is_nan()));
        assert!(merged.stats.cleanup_moves > 0);
    }

    #[test]
    fn overlapping_windows_fall_back_to_three_way() {
        // Worker 0 sees only S1, worker 1 only S2, so their windows cross.
        let b = 8;
        let pts: Vec<Point> = (0..64)
            .map(|i| Point::new(i as f64, if (i / b) % 2 == 0 { 1.0 } else { -1.0 }))
            .collect();
        let ea = DirectedEdge::new(Point::new(-1.0, 0.0), Point::new(1000.0, 0.0));
        let eb = ea.reversed();
        let layout = WorkerLayout::new(2, b).unwrap();
        let mut set = PointSet::from_points(pts.clone());
        let outs = parallel_step(set.as_mut(), &layout, &ea, &eb, &ExtractConfig::default());
        let bounds = MergeBounds::from_outcomes(&outs);
        assert!(!bounds.is_ordered());
        let merged = merge_and_cleanup(set.as_mut(), &outs, &ea, &eb).unwrap();
        assert_eq!((merged.w_l, merged.w_r), (32, 32));
        assert!((0..32).all(|i| set.get(i).y > 0.0));
        assert!((32..64).all(|i| set.get(i).y < 0.0));
        assert_eq!(sorted(pts), sorted(set.iter().collect()));
    }

    #[test]
    fn corrupted_window_is_reported() {
        let ea = DirectedEdge::new(Point::new(0.0, 0.0), Point::new(1.0, 0.0));
        let eb = ea.reversed();
        let mut set = PointSet::from_points(vec![
            Point::new(0.5, 1.0),
            Point::new(5.0, 0.0),
            Point::new(0.5, -1.0),
        ]);
        let fake = |w, w_l, w_r| WorkerOutcome {
            worker: w,
            owned: 1,
            w_l,
            w_r,
            r1: None,
            r2: None,
            stats: ExtractStats::default(),
            first_violation: None,
        };
        let outs = [fake(0, 0, 3), fake(1, 2, 3)];
        assert!(matches!(
            merge_and_cleanup(set.as_mut(), &outs, &ea, &eb),
            Err(Error::CorruptParallelStep { index: 1 })
        ));
    }

    #[test]
    fn parallel_matches_sequential_on_random_input() {
        for (seed, n) in [
            (1u64, 0usize),
            (2, 5),
            (3, 100),
            (4, 1000),
            (5, 4097),
            (6, 20000),
        ] {
            let pts = lcg_points(n, seed, 1 << 20);
            let ea = DirectedEdge::new(Point::new(-1048576.0, 5.0), Point::new(1048576.0, -9.0));
            let eb = ea.reversed();
            for lanes in LaneWidth::ALL {
                let cfg = ExtractConfig {
                    check_invariants: true,
                    ..ExtractConfig::with_lanes(lanes)
                };
                let mut a = PointSet::from_points(pts.clone());
                let seq = extract_subsets(a.as_mut(), &ea, &eb, &cfg);
                for workers in 1..=8 {
                    for block in [8, 64] {
                        let mut b = PointSet::from_points(pts.clone());
                        let layout = WorkerLayout::new(workers, block).unwrap();
                        let par = parallel_extract(b.as_mut(), &ea, &eb, &layout, &cfg).unwrap();
                        assert_eq!(
                            (seq.w_l, seq.w_r, seq.r1, seq.r2),
                            (par.w_l, par.w_r, par.r1, par.r2)
                        );
                        let s1 =
                            |s: &PointSet, r: Range<usize>| sorted(r.map(|i| s.get(i)).collect());
                        assert_eq!(s1(&a, 0..seq.w_l), s1(&b, 0..par.w_l));
                        assert_eq!(s1(&a, seq.w_r..n), s1(&b, par.w_r..n));
                        assert_eq!(par.stats.violations, 0);
                        assert_eq!(par.stats.reads, n as u64);
                        assert_eq!(par.stats.writes, seq.stats.writes);
                    }
                }
            }
        }
    }
}
