//! C ABI: two coordinate arrays in, hull vertex indices out.

use std::collections::HashMap;

use crate::geometry::PointSet;
use crate::hull::{convex_hull, HullConfig};

/// Invalid arguments or non-finite coordinates.
pub const VQHULL_EINVAL: isize = -1;
/// `out_cap` is smaller than the hull.
pub const VQHULL_ERANGE: isize = -2;

/// Writes the indices of the hull vertices, clockwise from the leftmost
/// point, to `out` and returns their count, or a negative error code.
///
/// # Safety
/// `xs` and `ys` must be valid for `n` reads and `out` for `out_cap` writes.
#[no_mangle]
pub unsafe extern "C" fn vqhull_convex_hull(
    xs: *const f64,
    ys: *const f64,
    n: usize,
    workers: usize,
    out: *mut usize,
    out_cap: usize,
) -> isize {
    if n > 0 && (xs.is_null() || ys.is_null()) {
        return VQHULL_EINVAL;
    }
    let (xs, ys) = if n == 0 {
        (&[][..], &[][..])
    } else {
        (
            std::slice::from_raw_parts(xs, n),
            std::slice::from_raw_parts(ys, n),
        )
    };
    let Ok(set) = PointSet::from_finite_coords(xs.to_vec(), ys.to_vec()) else {
        return VQHULL_EINVAL;
    };
    let Ok(hull) = convex_hull(&set, &HullConfig::with_workers(workers.max(1))) else {
        return VQHULL_EINVAL;
    };
    if hull.len() > out_cap || (out.is_null() && !hull.is_empty()) {
        return VQHULL_ERANGE;
    }
    let mut index = HashMap::with_capacity(n);
    for (i, p) in set.iter().enumerate() {
        index.entry(p.bits()).or_insert(i);
    }
    for (k, v) in hull.vertices().iter().enumerate() {
        *out.add(k) = index[&v.bits()];
    }
    hull.len() as isize
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn indices_of_square() {
        let xs = [0.5, 0.0, 1.0, 1.0, 0.0];
        let ys = [0.5, 0.0, 0.0, 1.0, 1.0];
        let mut out = [usize::MAX; 8];
        let h = unsafe { vqhull_convex_hull(xs.as_ptr(), ys.as_ptr(), 5, 1, out.as_mut_ptr(), 8) };
        assert_eq!(h, 4);
        assert_eq!(&out[..4], &[1, 4, 3, 2]);
        let h = unsafe { vqhull_convex_hull(xs.as_ptr(), ys.as_ptr(), 5, 1, out.as_mut_ptr(), 2) };
        assert_eq!(h, VQHULL_ERANGE);
        let bad = [f64::INFINITY, 0.0];
        let h = unsafe { vqhull_convex_hull(bad.as_ptr(), ys.as_ptr(), 2, 1, out.as_mut_ptr(), 8) };
        assert_eq!(h, VQHULL_EINVAL);
        let h = unsafe {
            vqhull_convex_hull(
                std::ptr::null(),
                std::ptr::null(),
                0,
                1,
                out.as_mut_ptr(),
                8,
            )
        };
        assert_eq!(h, 0);
    }
}
