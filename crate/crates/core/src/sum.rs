//! Order-independent summation.

use alloc::vec::Vec;

/// Sums `terms` after sorting them, so any reordering of the input gives a
/// bitwise identical result.
pub(crate) fn canonical_sum(terms: &mut [f64]) -> f64 {
    terms.sort_unstable_by(f64::total_cmp);
    terms.iter().sum()
}

/// [`canonical_sum`] over an iterator, reusing `scratch`.
pub(crate) fn canonical_sum_iter(scratch: &mut Vec<f64>, terms: impl Iterator<Item = f64>) -> f64 {
    scratch.clear();
    scratch.extend(terms);
    canonical_sum(scratch)
}

/// `ceil(p * n)` for a probability `p`, robust to representation error in
/// `p` (so that `0.7 * 10` counts as 7, not 8).
pub(crate) fn ceil_count(p: f64, n: usize) -> usize {
    let x = p * n as f64;
    let k = libm::ceil(x - 4.0 * f64::EPSILON * x.abs());
    if k <= 0.0 {
        0
    } else {
        k as usize
    }
}
