//! Safeguarded 1-D root finding on a sign-changing bracket.

use crate::error::{Error, Result};

/// Newton iteration confined to a bracket, falling back to bisection
/// whenever a step leaves the bracket or fails to shrink the residual.
///
/// `f` must change sign over `[lo, hi]`; `index` only labels the bracket in
/// the error should the sign check fail. Converges when `|f| <= f_tol` or
/// the bracket collapses to a few ulp.
pub fn bracketed_root<F, D>(
    mut f: F,
    mut df: D,
    seed: f64,
    mut lo: f64,
    mut hi: f64,
    f_tol: f64,
    index: usize,
) -> Result<f64>
where
    F: FnMut(f64) -> f64,
    D: FnMut(f64) -> f64,
{
    let mut flo = f(lo);
    let fhi = f(hi);
    if flo == 0.0 {
        return Ok(lo);
    }
    if fhi == 0.0 {
        return Ok(hi);
    }
    if flo.signum() == fhi.signum() {
        return Err(Error::BracketFailure { index, lo, hi });
    }

    let mut x = seed.clamp(lo, hi);
    for _ in 0..80 {
        let fx = f(x);
        if fx.abs() <= f_tol {
            return Ok(x);
        }
        // Shrink the bracket with the fresh sample before stepping.
        if fx.signum() == flo.signum() {
            lo = x;
            flo = fx;
        } else {
            hi = x;
        }
        let d = df(x);
        let newton = x - fx / d;
        x = if d != 0.0 && newton > lo && newton < hi {
            newton
        } else {
            0.5 * (lo + hi)
        };
        if hi - lo <= 4.0 * f64::EPSILON * hi.abs().max(1.0) {
            return Ok(0.5 * (lo + hi));
        }
    }
    Ok(x)
}
