//! Quickhull driver.
//!
//! Every call partitions its range in place into the points left of
//! `p -> r` (front) and left of `r -> q` (back), recurses on both, then moves
//! the second chain next to the first so that the call's own chain ends up
//! as a prefix of its range.

use std::sync::Mutex;

use rayon::ThreadPool;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::extract::{extract_subsets, ExtractConfig, ExtractOutcome, ExtractStats};
use crate::geometry::{find_extremes, find_extremes_par, DirectedEdge, Point, PointSet, PointsMut};
use crate::parallel::{parallel_extract, WorkerLayout, DEFAULT_BLOCK};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct HullConfig {
    pub workers: usize,
    /// Block size for the parallel extraction, in points.
    pub block: usize,
    pub extract: ExtractConfig,
    /// Deepest parallel recursion before switching to the explicit stack.
    pub depth_guard: usize,
    /// Ranges smaller than this are solved sequentially whatever the budget.
    pub parallel_cutoff: usize,
    /// Keep one [`CallRecord`] per partition step.
    pub trace: bool,
}

impl Default for HullConfig {
    fn default() -> Self {
        HullConfig {
            workers: 1,
            block: DEFAULT_BLOCK,
            extract: ExtractConfig::default(),
            depth_guard: 512,
            parallel_cutoff: 1 << 15,
            trace: false,
        }
    }
}

impl HullConfig {
    pub fn with_workers(workers: usize) -> Self {
        HullConfig {
            workers,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        WorkerLayout::new(self.workers, self.block)?;
        self.extract.validate()
    }
}

/// Hull vertices in clockwise order, starting at the leftmost (then lowest) point.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct HullPolygon {
    vertices: Vec<Point>,
}

impl HullPolygon {
    pub fn from_vertices(vertices: Vec<Point>) -> Self {
        HullPolygon { vertices }
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn into_vertices(self) -> Vec<Point> {
        self.vertices
    }

    /// Directed edges `v[i] -> v[i+1]`, closing back to the first vertex.
    pub fn edges(&self) -> impl Iterator<Item = DirectedEdge> + '_ {
        let h = self.vertices.len();
        (0..if h > 1 { h } else { 0 })
            .map(move |i| DirectedEdge::new(self.vertices[i], self.vertices[(i + 1) % h]))
    }
}

/// Sizes seen by one partition step.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CallRecord {
    pub size: usize,
    pub s1: usize,
    pub s2: usize,
    /// Length of the second child's chain, moved during assembly.
    pub chain2: usize,
    pub depth: usize,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct HullStats {
    /// Points read while locating the two extremes.
    pub extreme_reads: u64,
    pub extract: ExtractStats,
    /// Points moved while placing second chains.
    pub chain_moves: u64,
    /// Partition steps performed.
    pub calls: u64,
    pub max_depth: usize,
}

impl HullStats {
    fn absorb(&mut self, o: &HullStats) {
        self.extreme_reads += o.extreme_reads;
        self.extract += o.extract;
        self.chain_moves += o.chain_moves;
        self.calls += o.calls;
        self.max_depth = self.max_depth.max(o.max_depth);
    }

    fn note(&mut self, out: &ExtractOutcome, depth: usize) {
        self.extract += out.stats;
        self.calls += 1;
        self.max_depth = self.max_depth.max(depth);
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct HullRun {
    pub polygon: HullPolygon,
    pub stats: HullStats,
    /// Sorted by depth; empty unless tracing was enabled.
    pub trace: Vec<CallRecord>,
}

/// Splits `budget` workers between the two sides in proportion to their sizes.
///
/// A non-empty side gets at least one worker when `budget >= 2`, and an empty
/// side gets none. With nothing on either side everything goes to the first.
pub fn split_budget(budget: usize, sizes: (usize, usize)) -> (usize, usize) {
    let (s1, s2) = sizes;
    if s1 + s2 == 0 {
        return (budget, 0);
    }
    let share = (budget as f64 * s1 as f64 / (s1 + s2) as f64).round() as usize;
    let lo = usize::from(s1 > 0 && budget >= 2);
    let hi = budget - usize::from(s2 > 0);
    let t1 = share.max(lo).min(hi);
    (t1, budget - t1)
}

struct Ctx<'a> {
    cfg: &'a HullConfig,
    trace: Option<Mutex<Vec<CallRecord>>>,
}

impl Ctx<'_> {
    fn record(&self, rec: CallRecord) {
        if let Some(t) = &self.trace {
            t.lock().unwrap().push(rec);
        }
    }
}

/// Puts `r` and the second chain right after the first chain.
fn assemble(points: &mut PointsMut<'_>, h1: usize, r: Point, chain2_at: usize, h2: usize) -> usize {
    points.copy_within(chain2_at, h1 + 1, h2);
    points.set(h1, r);
    h1 + 1 + h2
}

enum Task {
    Solve {
        lo: usize,
        len: usize,
        p: Point,
        r: Option<Point>,
        q: Point,
        depth: usize,
    },
    Combine {
        lo: usize,
        len: usize,
        s1: usize,
        s2_at: usize,
        r: Point,
        depth: usize,
    },
}

/// Chain strictly between `p` and `q` for the points in `points`, all left of
/// `p -> q`, with `r` the farthest of them. Leaves the chain as a prefix and
/// returns its length.
fn solve_seq(
    mut points: PointsMut<'_>,
    p: Point,
    r: Option<Point>,
    q: Point,
    depth: usize,
    ctx: &Ctx<'_>,
) -> (usize, HullStats) {
    let mut stats = HullStats::default();
    let mut tasks = vec![Task::Solve {
        lo: 0,
        len: points.len(),
        p,
        r,
        q,
        depth,
    }];
    let mut results: Vec<usize> = Vec::new();
    while let Some(task) = tasks.pop() {
        match task {
            Task::Solve {
                lo,
                len,
                p,
                r,
                q,
                depth,
            } => {
                if len <= 1 {
                    results.push(len);
                    continue;
                }
                let r = r.expect("apex of a non-empty range");
                let ea = DirectedEdge::new(p, r);
                let eb = DirectedEdge::new(r, q);
                let out = extract_subsets(
                    points.reborrow().slice(lo, lo + len),
                    &ea,
                    &eb,
                    &ctx.cfg.extract,
                );
                stats.note(&out, depth);
                tasks.push(Task::Combine {
                    lo,
                    len,
                    s1: out.w_l,
                    s2_at: out.w_r,
                    r,
                    depth,
                });
                tasks.push(Task::Solve {
                    lo: lo + out.w_r,
                    len: len - out.w_r,
                    p: r,
                    r: out.r2,
                    q,
                    depth: depth + 1,
                });
                tasks.push(Task::Solve {
                    lo,
                    len: out.w_l,
                    p,
                    r: out.r1,
                    q: r,
                    depth: depth + 1,
                });
            }
            Task::Combine {
                lo,
                len,
                s1,
                s2_at,
                r,
                depth,
            } => {
                let h2 = results.pop().unwrap();
                let h1 = results.pop().unwrap();
                let mut range = points.reborrow().slice(lo, lo + len);
                results.push(assemble(&mut range, h1, r, s2_at, h2));
                stats.chain_moves += h2 as u64;
                ctx.record(CallRecord {
                    size: len,
                    s1,
                    s2: len - s2_at,
                    chain2: h2,
                    depth,
                });
            }
        }
    }
    (results.pop().unwrap(), stats)
}

fn solve_par(
    mut points: PointsMut<'_>,
    p: Point,
    r: Option<Point>,
    q: Point,
    budget: usize,
    depth: usize,
    ctx: &Ctx<'_>,
) -> Result<(usize, HullStats)> {
    let len = points.len();
    if budget < 2 || len < ctx.cfg.parallel_cutoff.max(2) || depth >= ctx.cfg.depth_guard {
        return Ok(solve_seq(points, p, r, q, depth, ctx));
    }
    let r = r.expect("apex of a non-empty range");
    let ea = DirectedEdge::new(p, r);
    let eb = DirectedEdge::new(r, q);
    let layout = WorkerLayout::new(budget, ctx.cfg.block)?;
    let out = parallel_extract(points.reborrow(), &ea, &eb, &layout, &ctx.cfg.extract)?;
    let mut stats = HullStats::default();
    stats.note(&out, depth);

    let (s1, s2) = (out.w_l, len - out.w_r);
    let (t1, t2) = split_budget(budget, (s1, s2));
    let (left, rest) = points.reborrow().split_at_mut(out.w_l);
    let (_, right) = rest.split_at_mut(out.w_r - out.w_l);
    let (a, b) = if t1 >= 1 && t2 >= 1 {
        rayon::join(
            || solve_par(left, p, out.r1, r, t1, depth + 1, ctx),
            || solve_par(right, r, out.r2, q, t2, depth + 1, ctx),
        )
    } else {
        (
            solve_par(left, p, out.r1, r, t1.max(1), depth + 1, ctx),
            solve_par(right, r, out.r2, q, t2.max(1), depth + 1, ctx),
        )
    };
    let ((h1, st1), (h2, st2)) = (a?, b?);
    stats.absorb(&st1);
    stats.absorb(&st2);
    let h = assemble(&mut points, h1, r, out.w_r, h2);
    stats.chain_moves += h2 as u64;
    ctx.record(CallRecord {
        size: len,
        s1,
        s2,
        chain2: h2,
        depth,
    });
    Ok((h, stats))
}

fn hull_in_place(mut points: PointsMut<'_>, cfg: &HullConfig) -> Result<HullRun> {
    let n = points.len();
    if let Some(index) = (0..n).find(|&i| !points.get(i).is_finite()) {
        return Err(Error::NonFinite { index });
    }
    if n == 0 {
        return Ok(HullRun::default());
    }
    let ctx = Ctx {
        cfg,
        trace: cfg.trace.then(|| Mutex::new(Vec::new())),
    };
    let (ip, iq) = if cfg.workers > 1 && n >= cfg.parallel_cutoff {
        find_extremes_par(points.xs, points.ys, n.div_ceil(cfg.workers).max(4096))?
    } else {
        find_extremes(points.xs, points.ys)?
    };
    let (p, q) = (points.get(ip), points.get(iq));
    let mut stats = HullStats {
        extreme_reads: n as u64,
        ..HullStats::default()
    };
    if p == q {
        return Ok(HullRun {
            polygon: HullPolygon::from_vertices(vec![p]),
            stats,
            trace: Vec::new(),
        });
    }

    // Partition about the bootstrap edge: above p -> q to the front, below to the back.
    let ea = DirectedEdge::new(p, q);
    let eb = ea.reversed();
    let out = if cfg.workers > 1 && n >= cfg.parallel_cutoff {
        let layout = WorkerLayout::new(cfg.workers, cfg.block)?;
        parallel_extract(points.reborrow(), &ea, &eb, &layout, &cfg.extract)?
    } else {
        extract_subsets(points.reborrow(), &ea, &eb, &cfg.extract)
    };
    stats.note(&out, 0);
    let (s1, s2) = (out.w_l, n - out.w_r);
    let (t1, t2) = split_budget(cfg.workers, (s1, s2));
    let (left, rest) = points.reborrow().split_at_mut(out.w_l);
    let (_, right) = rest.split_at_mut(out.w_r - out.w_l);
    let (a, b) = if t1 >= 1 && t2 >= 1 {
        rayon::join(
            || solve_par(left, p, out.r1, q, t1, 1, &ctx),
            || solve_par(right, q, out.r2, p, t2, 1, &ctx),
        )
    } else {
        (
            solve_par(left, p, out.r1, q, t1.max(1), 1, &ctx),
            solve_par(right, q, out.r2, p, t2.max(1), 1, &ctx),
        )
    };
    let ((h1, st1), (h2, st2)) = (a?, b?);
    stats.absorb(&st1);
    stats.absorb(&st2);
    points.copy_within(out.w_r, h1, h2);
    stats.chain_moves += h2 as u64;
    ctx.record(CallRecord {
        size: n,
        s1,
        s2,
        chain2: h2,
        depth: 0,
    });

    let mut vertices = Vec::with_capacity(h1 + h2 + 2);
    vertices.push(p);
    vertices.extend((0..h1).map(|i| points.get(i)));
    vertices.push(q);
    vertices.extend((h1..h1 + h2).map(|i| points.get(i)));
    let mut trace = ctx
        .trace
        .map(|t| t.into_inner().unwrap())
        .unwrap_or_default();
    trace.sort_by_key(|r| (r.depth, std::cmp::Reverse(r.size)));
    Ok(HullRun {
        polygon: HullPolygon::from_vertices(vertices),
        stats,
        trace,
    })
}

/// Reusable hull runner; owns a worker pool when more than one worker is configured.
pub struct HullEngine {
    cfg: HullConfig,
    pool: Option<ThreadPool>,
}

impl HullEngine {
    pub fn new(cfg: HullConfig) -> Result<Self> {
        cfg.validate()?;
        let pool = if cfg.workers > 1 {
            Some(
                rayon::ThreadPoolBuilder::new()
                    .num_threads(cfg.workers)
                    .build()
                    .map_err(|e| Error::InvalidConfig(e.to_string()))?,
            )
        } else {
            None
        };
        Ok(HullEngine { cfg, pool })
    }

    pub fn config(&self) -> &HullConfig {
        &self.cfg
    }

    /// Computes the hull, reordering `points` in the process.
    pub fn run_in_place(&self, points: PointsMut<'_>) -> Result<HullRun> {
        match &self.pool {
            Some(pool) => pool.install(|| hull_in_place(points, &self.cfg)),
            None => hull_in_place(points, &self.cfg),
        }
    }

    pub fn run(&self, points: &PointSet) -> Result<HullRun> {
        let mut work = points.clone();
        self.run_in_place(work.as_mut())
    }
}

/// Convex hull of `points` (left untouched).
pub fn convex_hull(points: &PointSet, cfg: &HullConfig) -> Result<HullPolygon> {
    Ok(HullEngine::new(*cfg)?.run(points)?.polygon)
}
