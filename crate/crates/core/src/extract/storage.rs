//! Logical point arrays the extraction loop reads from and writes to.

use super::kernel::Block;
use crate::geometry::{Point, PointsMut};

pub(crate) trait Storage {
    fn len(&self) -> usize;

    /// Logical read; sees staged writes.
    fn point(&self, i: usize) -> Point;

    fn set_point(&mut self, i: usize, p: Point);

    /// Loads `D` points from `[at, at + D)`; `at` is a multiple of `D`
    /// relative to the start of the aligned read region.
    fn load<const D: usize>(&self, at: usize) -> Block<D>;

    /// Writes all `D` lanes to `[at, at + D)`; only the first `k` are meaningful.
    fn store_low<const D: usize>(&mut self, at: usize, b: &Block<D>, k: usize);

    /// Writes all `D` lanes to `[end - D, end)`; only the last `k` are meaningful.
    fn store_high<const D: usize>(&mut self, end: usize, b: &Block<D>, k: usize);

    /// Makes every staged write visible in the underlying arrays.
    fn flush(&mut self) {}
}

pub(crate) struct SliceStorage<'a> {
    xs: &'a mut [f64],
    ys: &'a mut [f64],
}

impl<'a> SliceStorage<'a> {
    pub fn new(points: PointsMut<'a>) -> Self {
        SliceStorage {
            xs: points.xs,
            ys: points.ys,
        }
    }
}

impl Storage for SliceStorage<'_> {
    #[inline(always)]
    fn len(&self) -> usize {
        self.xs.len()
    }

    #[inline(always)]
    fn point(&self, i: usize) -> Point {
        Point::new(self.xs[i], self.ys[i])
    }

    #[inline(always)]
    fn set_point(&mut self, i: usize, p: Point) {
        self.xs[i] = p.x;
        self.ys[i] = p.y;
    }

    #[inline(always)]
    fn load<const D: usize>(&self, at: usize) -> Block<D> {
        let mut b = Block::zeroed();
        b.x.copy_from_slice(&self.xs[at..at + D]);
        b.y.copy_from_slice(&self.ys[at..at + D]);
        b
    }

    #[inline(always)]
    fn store_low<const D: usize>(&mut self, at: usize, b: &Block<D>, _k: usize) {
        self.xs[at..at + D].copy_from_slice(&b.x);
        self.ys[at..at + D].copy_from_slice(&b.y);
    }

    #[inline(always)]
    fn store_high<const D: usize>(&mut self, end: usize, b: &Block<D>, _k: usize) {
        self.xs[end - D..end].copy_from_slice(&b.x);
        self.ys[end - D..end].copy_from_slice(&b.y);
    }
}

/// Elements held per side before a flush is attempted.
const FLUSH_AT: usize = 32;
const STAGE_CAP: usize = FLUSH_AT + 16;
/// Flush boundaries fall on multiples of a 64-byte line of doubles.
const LINE: usize = 8;

/// Write-combining storage: compressed writes land in four small staging
/// buffers (x/y for each side) and reach memory as whole aligned lines.
pub(crate) struct StagedStorage<'a> {
    inner: SliceStorage<'a>,
    /// Base offset of the slice within its cacheline, in elements.
    phase: usize,
    lo_base: usize,
    lo_end: usize,
    lo_x: [f64; STAGE_CAP],
    lo_y: [f64; STAGE_CAP],
    /// The high stage covers `[hi_start, hi_end)`, stored right-aligned.
    hi_start: usize,
    hi_end: usize,
    hi_x: [f64; STAGE_CAP],
    hi_y: [f64; STAGE_CAP],
}

impl<'a> StagedStorage<'a> {
    pub fn new(points: PointsMut<'a>) -> Self {
        let n = points.len();
        let phase = (points.xs.as_ptr() as usize / std::mem::size_of::<f64>()) % LINE;
        StagedStorage {
            inner: SliceStorage::new(points),
            phase,
            lo_base: 0,
            lo_end: 0,
            lo_x: [0.0; STAGE_CAP],
            lo_y: [0.0; STAGE_CAP],
            hi_start: n,
            hi_end: n,
            hi_x: [0.0; STAGE_CAP],
            hi_y: [0.0; STAGE_CAP],
        }
    }

    #[inline(always)]
    fn align_down(&self, i: usize) -> usize {
        ((i + self.phase) / LINE * LINE).saturating_sub(self.phase)
    }

    #[inline(always)]
    fn align_up(&self, i: usize) -> usize {
        (i + self.phase).div_ceil(LINE) * LINE - self.phase
    }

    fn flush_low(&mut self, upto: usize) {
        let count = upto - self.lo_base;
        self.inner.xs[self.lo_base..upto].copy_from_slice(&self.lo_x[..count]);
        self.inner.ys[self.lo_base..upto].copy_from_slice(&self.lo_y[..count]);
        self.lo_x.copy_within(count.., 0);
        self.lo_y.copy_within(count.., 0);
        self.lo_base = upto;
    }

    fn flush_high(&mut self, from: usize) {
        let count = self.hi_end - from;
        let src = STAGE_CAP - count;
        self.inner.xs[from..self.hi_end].copy_from_slice(&self.hi_x[src..]);
        self.inner.ys[from..self.hi_end].copy_from_slice(&self.hi_y[src..]);
        self.hi_x.copy_within(..src, count);
        self.hi_y.copy_within(..src, count);
        self.hi_end = from;
    }
}

impl Storage for StagedStorage<'_> {
    #[inline(always)]
    fn len(&self) -> usize {
        self.inner.len()
    }

    fn point(&self, i: usize) -> Point {
        if i >= self.lo_base && i < self.lo_end {
            let o = i - self.lo_base;
            Point::new(self.lo_x[o], self.lo_y[o])
        } else if i >= self.hi_start && i < self.hi_end {
            let o = STAGE_CAP - (self.hi_end - i);
            Point::new(self.hi_x[o], self.hi_y[o])
        } else {
            self.inner.point(i)
        }
    }

    fn set_point(&mut self, i: usize, p: Point) {
        debug_assert!(self.lo_end == self.lo_base && self.hi_start == self.hi_end);
        self.inner.set_point(i, p);
    }

    #[inline(always)]
    fn load<const D: usize>(&self, at: usize) -> Block<D> {
        self.inner.load(at)
    }

    #[inline(always)]
    fn store_low<const D: usize>(&mut self, at: usize, b: &Block<D>, k: usize) {
        if at - self.lo_base >= FLUSH_AT {
            let bnd = self.align_down(at);
            if bnd > self.lo_base {
                self.flush_low(bnd);
            }
        }
        let o = at - self.lo_base;
        self.lo_x[o..o + D].copy_from_slice(&b.x);
        self.lo_y[o..o + D].copy_from_slice(&b.y);
        self.lo_end = at + k;
    }

    #[inline(always)]
    fn store_high<const D: usize>(&mut self, end: usize, b: &Block<D>, k: usize) {
        if self.hi_end - end >= FLUSH_AT {
            let bnd = self.align_up(end);
            if bnd < self.hi_end {
                self.flush_high(bnd);
            }
        }
        let o = STAGE_CAP - (self.hi_end - end);
        self.hi_x[o - D..o].copy_from_slice(&b.x);
        self.hi_y[o - D..o].copy_from_slice(&b.y);
        self.hi_start = end - k;
    }

    fn flush(&mut self) {
        if self.lo_end > self.lo_base {
            self.flush_low(self.lo_end);
        }
        self.lo_base = self.lo_end;
        if self.hi_start < self.hi_end {
            self.flush_high(self.hi_start);
        }
        self.hi_end = self.hi_start;
    }
}
