//! Bracketing on a boolean predicate.

use crate::error::{Error, Result};

/// Locates the point where `pred` switches from `true` (at `lo`) to `false`
/// (at `hi`), shrinking the bracket until it is narrower than `tol`.
///
/// Stops early when the bracket can no longer be split in floating point.
/// Returns the midpoint of the final bracket.
pub fn bisect_predicate<F>(mut lo: f64, mut hi: f64, tol: f64, max_iter: usize, pred: F) -> Result<f64>
where
    F: Fn(f64) -> bool,
{
    debug_assert!(lo < hi, "empty bracket [{lo}, {hi}]");
    for _ in 0..max_iter {
        if hi - lo <= tol {
            return Ok(0.5 * (lo + hi));
        }
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            return Ok(mid);
        }
        if pred(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    if hi - lo <= tol {
        Ok(0.5 * (lo + hi))
    } else {
        Err(Error::BudgetExceeded { iterations: max_iter })
    }
}
