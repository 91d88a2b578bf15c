//! Single-worker, in-place extraction of two disjoint subsets.
//!
//! Given edges A and B, [`extract_subsets`] permutes a range so that the points
//! left of A form a prefix `[0, w_l)` and the points left of B (and not of A)
//! form a suffix `[w_r, n)`. Everything else is discarded into the middle,
//! whose contents are unspecified afterwards. The farthest point of each
//! subset is found in the same pass.
//!
//! The loop reads `d` points at a time from whichever side has the smaller
//! read/write gap, compresses the selected lanes and writes them at the two
//! write cursors. The first and last `d` points are buffered up front so the
//! writes never overtake the reads.

mod check;
pub(crate) mod kernel;
pub(crate) mod storage;

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{is_better_apex, is_left_of, DirectedEdge, Point, PointsMut};
use check::InvariantChecker;
use kernel::{Block, Kernel, LaneApex, Portable, LOW};
use storage::{SliceStorage, StagedStorage, Storage};

/// Points processed per step.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum LaneWidth {
    L2,
    L4,
    L8,
}

impl LaneWidth {
    pub const ALL: [LaneWidth; 3] = [LaneWidth::L2, LaneWidth::L4, LaneWidth::L8];

    pub fn get(self) -> usize {
        match self {
            LaneWidth::L2 => 2,
            LaneWidth::L4 => 4,
            LaneWidth::L8 => 8,
        }
    }

    pub fn from_lanes(d: usize) -> Result<Self> {
        match d {
            2 => Ok(LaneWidth::L2),
            4 => Ok(LaneWidth::L4),
            8 => Ok(LaneWidth::L8),
            _ => Err(Error::InvalidConfig(format!(
                "lane width must be 2, 4 or 8, got {d}"
            ))),
        }
    }
}

impl fmt::Display for LaneWidth {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.get())
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum SimdBackend {
    /// Best instruction set detected at run time.
    #[default]
    Auto,
    Portable,
    Avx2,
    Avx512,
}

impl SimdBackend {
    /// Backend that will actually run for `lanes` on this machine.
    pub fn resolve(self, lanes: LaneWidth) -> SimdBackend {
        let avx512 = has_avx512();
        let avx2 = has_avx2();
        match (self, lanes) {
            (SimdBackend::Auto, LaneWidth::L8) if avx512 => SimdBackend::Avx512,
            (SimdBackend::Auto, LaneWidth::L4) if avx512 => SimdBackend::Avx512,
            (SimdBackend::Auto, LaneWidth::L4) if avx2 => SimdBackend::Avx2,
            (SimdBackend::Avx512, LaneWidth::L4 | LaneWidth::L8) if avx512 => SimdBackend::Avx512,
            (SimdBackend::Avx2, LaneWidth::L4) if avx2 => SimdBackend::Avx2,
            _ => SimdBackend::Portable,
        }
    }
}

fn has_avx512() -> bool {
    #[cfg(target_arch = "x86_64")]
    {
        is_x86_feature_detected!("avx512f") && is_x86_feature_detected!("avx512vl")
    }
    #[cfg(not(target_arch = "x86_64"))]
    {
        false
    }
}

fn has_avx2() -> bool {
    #[cfg(target_arch = "x86_64")]
    {
        is_x86_feature_detected!("avx2")
    }
    #[cfg(not(target_arch = "x86_64"))]
    {
        false
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ExtractConfig {
    pub lanes: LaneWidth,
    pub backend: SimdBackend,
    /// Stage compressed writes in small buffers and flush whole lines.
    pub write_combining: bool,
    /// Verify the loop invariant after every iteration (slow).
    pub check_invariants: bool,
}

impl Default for ExtractConfig {
    fn default() -> Self {
        ExtractConfig {
            lanes: LaneWidth::L8,
            backend: SimdBackend::Auto,
            write_combining: false,
            check_invariants: false,
        }
    }
}

impl ExtractConfig {
    pub fn with_lanes(lanes: LaneWidth) -> Self {
        ExtractConfig {
            lanes,
            ..Default::default()
        }
    }

    /// Rejects an explicitly requested backend this machine cannot run.
    pub fn validate(&self) -> Result<()> {
        match self.backend {
            SimdBackend::Auto | SimdBackend::Portable => Ok(()),
            b if b.resolve(self.lanes) == b => Ok(()),
            b => Err(Error::InvalidConfig(format!(
                "backend {b:?} is unavailable for {} lanes on this machine",
                self.lanes
            ))),
        }
    }
}

/// Element traffic and verification counters of one extraction.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExtractStats {
    /// Points read while classifying.
    pub reads: u64,
    /// Points written into their final subset.
    pub writes: u64,
    /// Additional moves and sentinel stores made by parallel cleanup.
    pub cleanup_moves: u64,
    pub checked_iterations: u64,
    pub violations: u64,
}

impl std::ops::AddAssign for ExtractStats {
    fn add_assign(&mut self, o: Self) {
        self.reads += o.reads;
        self.writes += o.writes;
        self.cleanup_moves += o.cleanup_moves;
        self.checked_iterations += o.checked_iterations;
        self.violations += o.violations;
    }
}

/// Result of one extraction: `[0, w_l)` is S1, `[w_r, n)` is S2.
#[derive(Clone, Debug, PartialEq)]
pub struct ExtractOutcome {
    pub w_l: usize,
    pub w_r: usize,
    /// Farthest point of S1 from edge A.
    pub r1: Option<Point>,
    /// Farthest point of S2 from edge B.
    pub r2: Option<Point>,
    pub stats: ExtractStats,
    pub first_violation: Option<String>,
}

impl ExtractOutcome {
    pub fn s1_len(&self) -> usize {
        self.w_l
    }

    pub fn s2_len(&self, n: usize) -> usize {
        n - self.w_r
    }
}

/// Order-preserving compression of the lanes selected by `mask`.
///
/// Returns the number of selected points and the points themselves.
pub fn compress_select(xs: &[f64], ys: &[f64], mask: u32) -> (usize, Vec<Point>) {
    assert!(
        xs.len() == ys.len() && xs.len() <= 8,
        "block of at most 8 lanes"
    );
    let mask = mask & ((1u32 << xs.len()) - 1);
    let k = mask.count_ones() as usize;
    let picked = LOW[mask as usize][..k]
        .iter()
        .map(|&lane| Point::new(xs[lane as usize], ys[lane as usize]))
        .collect();
    (k, picked)
}

/// Lane masks for a block of up to 8 points. A point left of both edges is
/// reported in `maskA` only.
pub fn classify_block(block: &[Point], ea: &DirectedEdge, eb: &DirectedEdge) -> (u32, u32) {
    assert!(block.len() <= 8, "block of at most 8 lanes");
    block
        .iter()
        .enumerate()
        .fold((0, 0), |(ma, mb), (lane, &u)| {
            let a = is_left_of(u, ea);
            let b = is_left_of(u, eb) && !a;
            (ma | (a as u32) << lane, mb | (b as u32) << lane)
        })
}

/// Extracts S1 (left of `ea`) to the front and S2 (left of `eb`, not of `ea`)
/// to the back of `points`, in place.
pub fn extract_subsets(
    points: PointsMut<'_>,
    ea: &DirectedEdge,
    eb: &DirectedEdge,
    cfg: &ExtractConfig,
) -> ExtractOutcome {
    if cfg.write_combining {
        run_storage(&mut StagedStorage::new(points), ea, eb, cfg)
    } else {
        run_storage(&mut SliceStorage::new(points), ea, eb, cfg)
    }
}

pub(crate) fn run_storage<S: Storage>(
    st: &mut S,
    ea: &DirectedEdge,
    eb: &DirectedEdge,
    cfg: &ExtractConfig,
) -> ExtractOutcome {
    let mut checker = cfg
        .check_invariants
        .then(|| InvariantChecker::new(st, cfg.lanes.get()));
    let chk = checker.as_mut();
    let mut out = match (cfg.lanes, cfg.backend.resolve(cfg.lanes)) {
        #[cfg(target_arch = "x86_64")]
        (LaneWidth::L8, SimdBackend::Avx512) => unsafe { native::avx512_8(st, ea, eb, chk) },
        #[cfg(target_arch = "x86_64")]
        (LaneWidth::L4, SimdBackend::Avx512) => unsafe { native::avx512_4(st, ea, eb, chk) },
        #[cfg(target_arch = "x86_64")]
        (LaneWidth::L4, SimdBackend::Avx2) => unsafe { native::avx2_4(st, ea, eb, chk) },
        (LaneWidth::L2, _) => extract_blocks::<S, Portable, 2>(st, ea, eb, chk),
        (LaneWidth::L4, _) => extract_blocks::<S, Portable, 4>(st, ea, eb, chk),
        (LaneWidth::L8, _) => extract_blocks::<S, Portable, 8>(st, ea, eb, chk),
    };
    if let Some(c) = checker {
        out.stats.checked_iterations = c.iterations;
        out.stats.violations = c.violations;
        out.first_violation = c.first_violation;
    }
    out
}

#[cfg(target_arch = "x86_64")]
mod native {
    use super::kernel::x86::{Avx2x4, Avx512x4, Avx512x8};
    use super::*;

    #[target_feature(enable = "avx512f,avx512vl,popcnt")]
    pub(super) unsafe fn avx512_8<S: Storage>(
        st: &mut S,
        ea: &DirectedEdge,
        eb: &DirectedEdge,
        chk: Option<&mut InvariantChecker>,
    ) -> ExtractOutcome {
        extract_blocks::<S, Avx512x8, 8>(st, ea, eb, chk)
    }

    #[target_feature(enable = "avx512f,avx512vl,popcnt")]
    pub(super) unsafe fn avx512_4<S: Storage>(
        st: &mut S,
        ea: &DirectedEdge,
        eb: &DirectedEdge,
        chk: Option<&mut InvariantChecker>,
    ) -> ExtractOutcome {
        extract_blocks::<S, Avx512x4, 4>(st, ea, eb, chk)
    }

    #[target_feature(enable = "avx2,popcnt")]
    pub(super) unsafe fn avx2_4<S: Storage>(
        st: &mut S,
        ea: &DirectedEdge,
        eb: &DirectedEdge,
        chk: Option<&mut InvariantChecker>,
    ) -> ExtractOutcome {
        extract_blocks::<S, Avx2x4, 4>(st, ea, eb, chk)
    }
}

/// Scalar placement of already-read points, continuing at the two cursors.
#[inline]
fn place_scalar<S: Storage>(
    st: &mut S,
    pts: &[Point],
    ea: &DirectedEdge,
    eb: &DirectedEdge,
    wl: &mut usize,
    wr: &mut usize,
    r1: &mut Option<Point>,
    r2: &mut Option<Point>,
) {
    for &u in pts {
        if is_left_of(u, ea) {
            st.set_point(*wl, u);
            *wl += 1;
            if r1.is_none_or(|cur| is_better_apex(u, cur, ea)) {
                *r1 = Some(u);
            }
        } else if is_left_of(u, eb) {
            *wr -= 1;
            st.set_point(*wr, u);
            if r2.is_none_or(|cur| is_better_apex(u, cur, eb)) {
                *r2 = Some(u);
            }
        }
    }
}

/// The block loop. Ranges shorter than two blocks go through the scalar path.
#[inline(always)]
pub(crate) fn extract_blocks<S: Storage, K: Kernel<D>, const D: usize>(
    st: &mut S,
    ea: &DirectedEdge,
    eb: &DirectedEdge,
    mut chk: Option<&mut InvariantChecker>,
) -> ExtractOutcome {
    let n = st.len();
    let (mut r1, mut r2) = (None, None);
    if n < 2 * D {
        let mut tmp = [Point::default(); 16];
        for (i, slot) in tmp[..n].iter_mut().enumerate() {
            *slot = st.point(i);
        }
        let (mut wl, mut wr) = (0, n);
        place_scalar(st, &tmp[..n], ea, eb, &mut wl, &mut wr, &mut r1, &mut r2);
        return finish(n, wl, wr, r1, r2);
    }

    // The right buffer absorbs the remainder so both read cursors stay D-aligned.
    let rem = (n - 2 * D) % D;
    let mut buf = [Point::default(); 24];
    let nbuf = 2 * D + rem;
    for i in 0..D {
        buf[i] = st.point(i);
    }
    for j in 0..D + rem {
        buf[D + j] = st.point(n - D - rem + j);
    }

    let (mut wl, mut rl, mut rr, mut wr) = (0, D, n - D - rem, n);
    let mut apex_a = LaneApex::<D>::new();
    let mut apex_b = LaneApex::<D>::new();
    while rl < rr {
        // Read from the side whose write gap is smaller; computed without a branch.
        let left = usize::from(rl - wl <= wr - rr);
        let at = left * rl + (1 - left) * (rr - D);
        rl += left * D;
        rr -= (1 - left) * D;
        let blk: Block<D> = st.load::<D>(at);
        let (ma, mb) = K::classify(&blk, ea, eb);
        let ka = ma.count_ones() as usize;
        let kb = mb.count_ones() as usize;
        st.store_low(wl, &K::compress_low(&blk, ma), ka);
        wl += ka;
        st.store_high(wr, &K::compress_high(&blk, mb), kb);
        wr -= kb;
        K::track(&mut apex_a, &blk, ma, ea);
        K::track(&mut apex_b, &blk, mb, eb);
        debug_assert!(rl - wl >= D || wr - rr >= D);
        if let Some(c) = chk.as_deref_mut() {
            c.check(st, [wl, rl, rr, wr], ea, eb, &buf[..D], &buf[D..nbuf]);
        }
    }
    st.flush();

    r1 = apex_a.reduce(ea);
    r2 = apex_b.reduce(eb);
    place_scalar(st, &buf[..nbuf], ea, eb, &mut wl, &mut wr, &mut r1, &mut r2);
    finish(n, wl, wr, r1, r2)
}

fn finish(n: usize, wl: usize, wr: usize, r1: Option<Point>, r2: Option<Point>) -> ExtractOutcome {
    ExtractOutcome {
        w_l: wl,
        w_r: wr,
        r1,
        r2,
        stats: ExtractStats {
            reads: n as u64,
            writes: (wl + (n - wr)) as u64,
            ..Default::default()
        },
        first_violation: None,
    }
}
