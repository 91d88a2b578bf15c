//! Per-block classification, compression and apex tracking.
//!
//! Every kernel evaluates the predicates with the same operation sequence as
//! [`crate::geometry`], so all backends agree lane for lane.

use crate::geometry::{is_better_apex, is_left_of, DirectedEdge, Point};

/// `D` consecutive points in structure-of-arrays form.
#[derive(Clone, Copy, Debug)]
#[repr(C, align(64))]
pub(crate) struct Block<const D: usize> {
    pub x: [f64; D],
    pub y: [f64; D],
}

impl<const D: usize> Block<D> {
    #[inline(always)]
    pub fn zeroed() -> Self {
        Block {
            x: [0.0; D],
            y: [0.0; D],
        }
    }

    #[inline(always)]
    pub fn point(&self, lane: usize) -> Point {
        Point::new(self.x[lane], self.y[lane])
    }
}

/// Per-lane running apex: the best candidate seen so far in each lane.
#[derive(Clone, Copy, Debug)]
pub(crate) struct LaneApex<const D: usize> {
    pub best: Block<D>,
    pub valid: u32,
}

impl<const D: usize> LaneApex<D> {
    pub fn new() -> Self {
        LaneApex {
            best: Block::zeroed(),
            valid: 0,
        }
    }

    /// Folds the lanes in ascending order into a single apex.
    pub fn reduce(&self, e: &DirectedEdge) -> Option<Point> {
        let mut out: Option<Point> = None;
        for lane in 0..D {
            if self.valid >> lane & 1 == 1 {
                let cand = self.best.point(lane);
                out = match out {
                    Some(cur) if !is_better_apex(cand, cur, e) => Some(cur),
                    _ => Some(cand),
                };
            }
        }
        out
    }
}

pub(crate) trait Kernel<const D: usize> {
    /// `(maskA, maskB)`; a lane set in `maskA` is never set in `maskB`.
    fn classify(b: &Block<D>, ea: &DirectedEdge, eb: &DirectedEdge) -> (u32, u32);

    /// Selected lanes moved to lanes `0..k`, in order.
    fn compress_low(b: &Block<D>, mask: u32) -> Block<D>;

    /// Selected lanes moved to lanes `D-k..D`, in order.
    fn compress_high(b: &Block<D>, mask: u32) -> Block<D>;

    fn track(apex: &mut LaneApex<D>, b: &Block<D>, mask: u32, e: &DirectedEdge);
}

const fn low_table() -> [[u8; 8]; 256] {
    let mut t = [[0u8; 8]; 256];
    let mut m = 0;
    while m < 256 {
        let mut k = 0;
        let mut lane = 0;
        while lane < 8 {
            if m >> lane & 1 == 1 {
                t[m][k] = lane as u8;
                k += 1;
            }
            lane += 1;
        }
        m += 1;
    }
    t
}

const fn high_table(d: usize) -> [[u8; 8]; 256] {
    let low = low_table();
    let mut t = [[0u8; 8]; 256];
    let mut m = 0;
    while m < (1 << d) {
        let k = (m as u32).count_ones() as usize;
        let mut j = 0;
        while j < k {
            t[m][d - k + j] = low[m][j];
            j += 1;
        }
        m += 1;
    }
    t
}

pub(crate) static LOW: [[u8; 8]; 256] = low_table();
static HIGH2: [[u8; 8]; 256] = high_table(2);
static HIGH4: [[u8; 8]; 256] = high_table(4);
static HIGH8: [[u8; 8]; 256] = high_table(8);

#[inline(always)]
fn high_for(d: usize) -> &'static [[u8; 8]; 256] {
    match d {
        2 => &HIGH2,
        4 => &HIGH4,
        _ => &HIGH8,
    }
}

/// Table-driven kernel usable on any target.
pub(crate) struct Portable;

impl<const D: usize> Kernel<D> for Portable {
    #[inline(always)]
    fn classify(b: &Block<D>, ea: &DirectedEdge, eb: &DirectedEdge) -> (u32, u32) {
        let mut ma = 0u32;
        let mut mb = 0u32;
        for lane in 0..D {
            let u = b.point(lane);
            let a = is_left_of(u, ea);
            let c = is_left_of(u, eb) & !a;
            ma |= (a as u32) << lane;
            mb |= (c as u32) << lane;
        }
        (ma, mb)
    }

    #[inline(always)]
    fn compress_low(b: &Block<D>, mask: u32) -> Block<D> {
        let perm = &LOW[mask as usize];
        let mut out = Block::zeroed();
        for lane in 0..D {
            let src = perm[lane] as usize;
            out.x[lane] = b.x[src];
            out.y[lane] = b.y[src];
        }
        out
    }

    #[inline(always)]
    fn compress_high(b: &Block<D>, mask: u32) -> Block<D> {
        let perm = &high_for(D)[mask as usize];
        let mut out = Block::zeroed();
        for lane in 0..D {
            let src = perm[lane] as usize;
            out.x[lane] = b.x[src];
            out.y[lane] = b.y[src];
        }
        out
    }

    #[inline(always)]
    fn track(apex: &mut LaneApex<D>, b: &Block<D>, mask: u32, e: &DirectedEdge) {
        for lane in 0..D {
            let take = (mask >> lane & 1 == 1)
                & ((apex.valid >> lane & 1 == 0)
                    | is_better_apex(b.point(lane), apex.best.point(lane), e));
            apex.best.x[lane] = if take { b.x[lane] } else { apex.best.x[lane] };
            apex.best.y[lane] = if take { b.y[lane] } else { apex.best.y[lane] };
        }
        apex.valid |= mask;
    }
}

#[cfg(target_arch = "x86_64")]
pub(crate) mod x86 {
    use super::*;
    use std::arch::x86_64::*;

    /// AVX-512 kernel over 8 lanes (`vcompresspd` / `vexpandpd`).
    pub(crate) struct Avx512x8;
    /// AVX-512VL kernel over 4 lanes.
    pub(crate) struct Avx512x4;
    /// AVX2 kernel over 4 lanes; compression through a permutation table.
    pub(crate) struct Avx2x4;

    #[inline(always)]
    fn high_mask(k: u32, d: u32) -> u8 {
        ((((1u32 << k) - 1) << (d - k)) & 0xff) as u8
    }

    #[inline(always)]
    unsafe fn left_mask8(x: __m512d, y: __m512d, e: &DirectedEdge) -> __mmask8 {
        let px = _mm512_set1_pd(e.p.x);
        let py = _mm512_set1_pd(e.p.y);
        let qx = _mm512_set1_pd(e.q.x);
        let qy = _mm512_set1_pd(e.q.y);
        let lhs = _mm512_mul_pd(_mm512_sub_pd(px, x), _mm512_sub_pd(qy, y));
        let rhs = _mm512_mul_pd(_mm512_sub_pd(py, y), _mm512_sub_pd(qx, x));
        _mm512_cmp_pd_mask::<_CMP_GT_OQ>(lhs, rhs)
    }

    impl Kernel<8> for Avx512x8 {
        #[inline(always)]
        fn classify(b: &Block<8>, ea: &DirectedEdge, eb: &DirectedEdge) -> (u32, u32) {
            unsafe {
                let x = _mm512_loadu_pd(b.x.as_ptr());
                let y = _mm512_loadu_pd(b.y.as_ptr());
                let a = left_mask8(x, y, ea);
                let c = left_mask8(x, y, eb) & !a;
                (a as u32, c as u32)
            }
        }

        #[inline(always)]
        fn compress_low(b: &Block<8>, mask: u32) -> Block<8> {
            unsafe {
                let m = mask as __mmask8;
                let mut out = Block::zeroed();
                _mm512_storeu_pd(
                    out.x.as_mut_ptr(),
                    _mm512_maskz_compress_pd(m, _mm512_loadu_pd(b.x.as_ptr())),
                );
                _mm512_storeu_pd(
                    out.y.as_mut_ptr(),
                    _mm512_maskz_compress_pd(m, _mm512_loadu_pd(b.y.as_ptr())),
                );
                out
            }
        }

        #[inline(always)]
        fn compress_high(b: &Block<8>, mask: u32) -> Block<8> {
            unsafe {
                let m = mask as __mmask8;
                let hi = high_mask(mask.count_ones(), 8);
                let cx = _mm512_maskz_compress_pd(m, _mm512_loadu_pd(b.x.as_ptr()));
                let cy = _mm512_maskz_compress_pd(m, _mm512_loadu_pd(b.y.as_ptr()));
                let mut out = Block::zeroed();
                _mm512_storeu_pd(out.x.as_mut_ptr(), _mm512_maskz_expand_pd(hi, cx));
                _mm512_storeu_pd(out.y.as_mut_ptr(), _mm512_maskz_expand_pd(hi, cy));
                out
            }
        }

        #[inline(always)]
        fn track(apex: &mut LaneApex<8>, b: &Block<8>, mask: u32, e: &DirectedEdge) {
            unsafe {
                let ux = _mm512_loadu_pd(b.x.as_ptr());
                let uy = _mm512_loadu_pd(b.y.as_ptr());
                let bx = _mm512_loadu_pd(apex.best.x.as_ptr());
                let by = _mm512_loadu_pd(apex.best.y.as_ptr());
                let dx = _mm512_set1_pd(e.q.x - e.p.x);
                let dy = _mm512_set1_pd(e.q.y - e.p.y);
                let ddx = _mm512_sub_pd(ux, bx);
                let ddy = _mm512_sub_pd(uy, by);
                let lhs = _mm512_mul_pd(dy, ddx);
                let rhs = _mm512_mul_pd(dx, ddy);
                let along = _mm512_add_pd(_mm512_mul_pd(dx, ddx), _mm512_mul_pd(dy, ddy));
                let lt = _mm512_cmp_pd_mask::<_CMP_LT_OQ>(lhs, rhs);
                let eq = _mm512_cmp_pd_mask::<_CMP_EQ_OQ>(lhs, rhs);
                let fwd = _mm512_cmp_pd_mask::<_CMP_GT_OQ>(along, _mm512_setzero_pd());
                let better = lt | (eq & fwd);
                let take = (mask as u8) & (!(apex.valid as u8) | better);
                _mm512_storeu_pd(apex.best.x.as_mut_ptr(), _mm512_mask_mov_pd(bx, take, ux));
                _mm512_storeu_pd(apex.best.y.as_mut_ptr(), _mm512_mask_mov_pd(by, take, uy));
                apex.valid |= mask;
            }
        }
    }

    #[inline(always)]
    unsafe fn left_mask4(x: __m256d, y: __m256d, e: &DirectedEdge) -> __m256d {
        let px = _mm256_set1_pd(e.p.x);
        let py = _mm256_set1_pd(e.p.y);
        let qx = _mm256_set1_pd(e.q.x);
        let qy = _mm256_set1_pd(e.q.y);
        let lhs = _mm256_mul_pd(_mm256_sub_pd(px, x), _mm256_sub_pd(qy, y));
        let rhs = _mm256_mul_pd(_mm256_sub_pd(py, y), _mm256_sub_pd(qx, x));
        _mm256_cmp_pd::<_CMP_GT_OQ>(lhs, rhs)
    }

    /// Apex comparison shared by the 4-lane kernels; returns a lane mask.
    #[inline(always)]
    unsafe fn better4(ux: __m256d, uy: __m256d, bx: __m256d, by: __m256d, e: &DirectedEdge) -> u32 {
        let dx = _mm256_set1_pd(e.q.x - e.p.x);
        let dy = _mm256_set1_pd(e.q.y - e.p.y);
        let ddx = _mm256_sub_pd(ux, bx);
        let ddy = _mm256_sub_pd(uy, by);
        let lhs = _mm256_mul_pd(dy, ddx);
        let rhs = _mm256_mul_pd(dx, ddy);
        let along = _mm256_add_pd(_mm256_mul_pd(dx, ddx), _mm256_mul_pd(dy, ddy));
        let lt = _mm256_cmp_pd::<_CMP_LT_OQ>(lhs, rhs);
        let eq = _mm256_cmp_pd::<_CMP_EQ_OQ>(lhs, rhs);
        let fwd = _mm256_cmp_pd::<_CMP_GT_OQ>(along, _mm256_setzero_pd());
        _mm256_movemask_pd(_mm256_or_pd(lt, _mm256_and_pd(eq, fwd))) as u32
    }

    #[inline(always)]
    unsafe fn track4(apex: &mut LaneApex<4>, b: &Block<4>, mask: u32, e: &DirectedEdge) {
        let ux = _mm256_loadu_pd(b.x.as_ptr());
        let uy = _mm256_loadu_pd(b.y.as_ptr());
        let bx = _mm256_loadu_pd(apex.best.x.as_ptr());
        let by = _mm256_loadu_pd(apex.best.y.as_ptr());
        let take = mask & (!apex.valid | better4(ux, uy, bx, by, e)) & 0xf;
        let sel = _mm256_castsi256_pd(_mm256_loadu_si256(
            LANE_SELECT4[take as usize].as_ptr() as *const __m256i
        ));
        _mm256_storeu_pd(apex.best.x.as_mut_ptr(), _mm256_blendv_pd(bx, ux, sel));
        _mm256_storeu_pd(apex.best.y.as_mut_ptr(), _mm256_blendv_pd(by, uy, sel));
        apex.valid |= mask;
    }

    impl Kernel<4> for Avx512x4 {
        #[inline(always)]
        fn classify(b: &Block<4>, ea: &DirectedEdge, eb: &DirectedEdge) -> (u32, u32) {
            <Avx2x4 as Kernel<4>>::classify(b, ea, eb)
        }

        #[inline(always)]
        fn compress_low(b: &Block<4>, mask: u32) -> Block<4> {
            unsafe {
                let m = mask as __mmask8;
                let mut out = Block::zeroed();
                _mm256_storeu_pd(
                    out.x.as_mut_ptr(),
                    _mm256_maskz_compress_pd(m, _mm256_loadu_pd(b.x.as_ptr())),
                );
                _mm256_storeu_pd(
                    out.y.as_mut_ptr(),
                    _mm256_maskz_compress_pd(m, _mm256_loadu_pd(b.y.as_ptr())),
                );
                out
            }
        }

        #[inline(always)]
        fn compress_high(b: &Block<4>, mask: u32) -> Block<4> {
            unsafe {
                let m = mask as __mmask8;
                let hi = high_mask(mask.count_ones(), 4);
                let cx = _mm256_maskz_compress_pd(m, _mm256_loadu_pd(b.x.as_ptr()));
                let cy = _mm256_maskz_compress_pd(m, _mm256_loadu_pd(b.y.as_ptr()));
                let mut out = Block::zeroed();
                _mm256_storeu_pd(out.x.as_mut_ptr(), _mm256_maskz_expand_pd(hi, cx));
                _mm256_storeu_pd(out.y.as_mut_ptr(), _mm256_maskz_expand_pd(hi, cy));
                out
            }
        }

        #[inline(always)]
        fn track(apex: &mut LaneApex<4>, b: &Block<4>, mask: u32, e: &DirectedEdge) {
            unsafe { track4(apex, b, mask, e) }
        }
    }

    const fn perm4_table(high: bool) -> [[i32; 8]; 16] {
        let mut t = [[0i32; 8]; 16];
        let mut m = 0;
        while m < 16 {
            let k = (m as u32).count_ones() as usize;
            let mut j = if high { 4 - k } else { 0 };
            let mut lane = 0;
            while lane < 4 {
                if m >> lane & 1 == 1 {
                    t[m][2 * j] = 2 * lane;
                    t[m][2 * j + 1] = 2 * lane + 1;
                    j += 1;
                }
                lane += 1;
            }
            m += 1;
        }
        t
    }

    const fn lane_select4() -> [[i64; 4]; 16] {
        let mut t = [[0i64; 4]; 16];
        let mut m = 0;
        while m < 16 {
            let mut lane = 0;
            while lane < 4 {
                if m >> lane & 1 == 1 {
                    t[m][lane] = -1;
                }
                lane += 1;
            }
            m += 1;
        }
        t
    }

    static PERM4_LOW: [[i32; 8]; 16] = perm4_table(false);
    static PERM4_HIGH: [[i32; 8]; 16] = perm4_table(true);
    static LANE_SELECT4: [[i64; 4]; 16] = lane_select4();

    #[inline(always)]
    unsafe fn permute4(b: &Block<4>, perm: &[i32; 8]) -> Block<4> {
        let idx = _mm256_loadu_si256(perm.as_ptr() as *const __m256i);
        let px = _mm256_permutevar8x32_ps(_mm256_castpd_ps(_mm256_loadu_pd(b.x.as_ptr())), idx);
        let py = _mm256_permutevar8x32_ps(_mm256_castpd_ps(_mm256_loadu_pd(b.y.as_ptr())), idx);
        let mut out = Block::zeroed();
        _mm256_storeu_pd(out.x.as_mut_ptr(), _mm256_castps_pd(px));
        _mm256_storeu_pd(out.y.as_mut_ptr(), _mm256_castps_pd(py));
        out
    }

    impl Kernel<4> for Avx2x4 {
        #[inline(always)]
        fn classify(b: &Block<4>, ea: &DirectedEdge, eb: &DirectedEdge) -> (u32, u32) {
            unsafe {
                let x = _mm256_loadu_pd(b.x.as_ptr());
                let y = _mm256_loadu_pd(b.y.as_ptr());
                let a = _mm256_movemask_pd(left_mask4(x, y, ea)) as u32;
                let c = _mm256_movemask_pd(left_mask4(x, y, eb)) as u32 & !a;
                (a, c)
            }
        }

        #[inline(always)]
        fn compress_low(b: &Block<4>, mask: u32) -> Block<4> {
            unsafe { permute4(b, &PERM4_LOW[mask as usize]) }
        }

        #[inline(always)]
        fn compress_high(b: &Block<4>, mask: u32) -> Block<4> {
            unsafe { permute4(b, &PERM4_HIGH[mask as usize]) }
        }

        #[inline(always)]
        fn track(apex: &mut LaneApex<4>, b: &Block<4>, mask: u32, e: &DirectedEdge) {
            unsafe { track4(apex, b, mask, e) }
        }
    }
}
