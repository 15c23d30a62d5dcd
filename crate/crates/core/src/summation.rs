//! Deterministic floating point reductions.
//!
//! Every sum here has a fixed association order that depends only on the
//! input length, never on how many threads happen to run. Parallel callers
//! split work into fixed-size blocks, reduce each block with [`pairwise_sum`]
//! and then combine the block results in index order.

/// Rows handled by one parallel task in the double-sum kernels.
pub const ROW_BLOCK: usize = 64;

const LANES: usize = 8;
const BASE: usize = 128;

/// Pairwise (cascade) summation with an 8-lane unrolled base case.
///
/// Error grows like O(log n) ulps instead of O(n) for a naive loop.
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    if xs.len() <= BASE {
        return lane_sum(xs);
    }
    let mid = xs.len() / 2;
    pairwise_sum(&xs[..mid]) + pairwise_sum(&xs[mid..])
}

fn lane_sum(xs: &[f64]) -> f64 {
    let mut acc = [0.0f64; LANES];
    let mut chunks = xs.chunks_exact(LANES);
    for c in &mut chunks {
        for (a, x) in acc.iter_mut().zip(c) {
            *a += *x;
        }
    }
    for (a, x) in acc.iter_mut().zip(chunks.remainder()) {
        *a += *x;
    }
    tree8(acc)
}

#[inline]
pub(crate) fn tree8(a: [f64; LANES]) -> f64 {
    ((a[0] + a[1]) + (a[2] + a[3])) + ((a[4] + a[5]) + (a[6] + a[7]))
}

/// Sums `f(i)` for `i in 0..n` using the same association order as
/// [`pairwise_sum`] but without materializing the terms.
pub fn pairwise_sum_by<F: Fn(usize) -> f64>(n: usize, f: F) -> f64 {
    fn rec<F: Fn(usize) -> f64>(lo: usize, hi: usize, f: &F) -> f64 {
        let len = hi - lo;
        if len <= BASE {
            let mut acc = [0.0f64; LANES];
            let full = lo + (len / LANES) * LANES;
            let mut i = lo;
            while i < full {
                for (k, a) in acc.iter_mut().enumerate() {
                    *a += f(i + k);
                }
                i += LANES;
            }
            for (k, a) in acc.iter_mut().enumerate().take(hi - full) {
                *a += f(full + k);
            }
            return tree8(acc);
        }
        let mid = lo + len / 2;
        rec(lo, mid, f) + rec(mid, hi, f)
    }
    rec(0, n, &f)
}

/// Dot-like reduction of `f(i)` over equal-length slices, lane-unrolled.
/// Used in the inner loops of the double sums.
#[inline]
pub(crate) fn lane_sum_by<F: Fn(usize) -> f64>(n: usize, f: F) -> f64 {
    let mut acc = [0.0f64; LANES];
    let full = (n / LANES) * LANES;
    let mut i = 0;
    while i < full {
        acc[0] += f(i);
        acc[1] += f(i + 1);
        acc[2] += f(i + 2);
        acc[3] += f(i + 3);
        acc[4] += f(i + 4);
        acc[5] += f(i + 5);
        acc[6] += f(i + 6);
        acc[7] += f(i + 7);
        i += LANES;
    }
    for (k, a) in acc.iter_mut().enumerate().take(n - full) {
        *a += f(full + k);
    }
    tree8(acc)
}

/// Sequential sum from the smallest magnitude upwards. Used where the terms
/// span many decades.
pub fn ascending_sum(xs: &[f64]) -> f64 {
    let mut v = xs.to_vec();
    v.sort_by(|a, b| a.abs().total_cmp(&b.abs()));
    v.iter().sum()
}
