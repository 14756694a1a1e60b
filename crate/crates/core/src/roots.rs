//! Bracketing root finders used by the threshold and fixed-point searches.

use crate::error::{Error, Result};

/// Bisection on a continuous function with a sign change on `[lo, hi]`.
///
/// Stops once the bracket is narrower than `width` and returns its midpoint.
pub fn bisect<F>(mut f: F, mut lo: f64, mut hi: f64, width: f64) -> Result<f64>
where
    F: FnMut(f64) -> f64,
{
    let mut f_lo = f(lo);
    let f_hi = f(hi);
    if f_lo == 0.0 {
        return Ok(lo);
    }
    if f_hi == 0.0 {
        return Ok(hi);
    }
    if f_lo.signum() == f_hi.signum() || f_lo.is_nan() || f_hi.is_nan() {
        return Err(Error::NotBracketed { lo, hi, f_lo, f_hi });
    }
    while hi - lo > width {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let f_mid = f(mid);
        if f_mid == 0.0 {
            return Ok(mid);
        }
        if f_mid.signum() == f_lo.signum() {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Bisection on a boolean predicate that is false at `lo` and true at `hi`.
///
/// Returns the smallest point (to within `width`) where the predicate was
/// observed to hold. The predicate need not be monotone; the result is a
/// transition point of the predicate inside the bracket.
pub fn bisect_predicate<P>(mut pred: P, mut lo: f64, mut hi: f64, width: f64) -> Result<f64>
where
    P: FnMut(f64) -> bool,
{
    if pred(lo) || !pred(hi) {
        return Err(Error::InvalidArgument(format!(
            "predicate must be false at {lo} and true at {hi}"
        )));
    }
    while hi - lo > width {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if pred(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

/// Locates every sign change of `f` on a uniform grid of `n` intervals and
/// refines each one by bisection.
pub fn sign_changes<F>(f: F, lo: f64, hi: f64, n: usize, width: f64) -> Vec<f64>
where
    F: Fn(f64) -> f64,
{
    let step = (hi - lo) / n as f64;
    let mut roots = Vec::new();
    let mut a = lo;
    let mut fa = f(a);
    for i in 1..=n {
        let b = if i == n { hi } else { lo + step * i as f64 };
        let fb = f(b);
        if fa != 0.0 && fb != 0.0 && fa.signum() != fb.signum() {
            if let Ok(root) = bisect(&f, a, b, width) {
                roots.push(root);
            }
        }
        a = b;
        fa = fb;
    }
    roots
}
