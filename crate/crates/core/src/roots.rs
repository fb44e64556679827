//! Bracketing root finder.

use crate::error::{Error, Result};
use crate::scalar::{lit, Real};

/// Bisection for a sign change of `f` on `[lo, hi]`, stopping when the
/// bracket is narrower than `x_tol` or cannot be split further.
pub fn bisect<T: Real, F: FnMut(T) -> Result<T>>(mut f: F, mut lo: T, mut hi: T, x_tol: T) -> Result<T> {
    let mut flo = f(lo)?;
    let fhi = f(hi)?;
    if flo == T::zero() {
        return Ok(lo);
    }
    if fhi == T::zero() {
        return Ok(hi);
    }
    if flo.signum() == fhi.signum() {
        return Err(Error::InvalidParameter(format!(
            "bisect: no sign change on [{}, {}]",
            lo.to_f64().unwrap_or(f64::NAN),
            hi.to_f64().unwrap_or(f64::NAN)
        )));
    }
    for _ in 0..2000 {
        let mid = lo + (hi - lo) / lit(2.0);
        if hi - lo <= x_tol || mid <= lo || mid >= hi {
            return Ok(mid);
        }
        let fm = f(mid)?;
        if fm == T::zero() {
            return Ok(mid);
        }
        if fm.signum() == flo.signum() {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    Err(Error::NoConvergence("bisect"))
}
