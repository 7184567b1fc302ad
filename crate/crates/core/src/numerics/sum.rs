//! Neumaier-compensated summation.
//!
//! Rate functions here are sums of up to ~1e7 terms spanning many orders of
//! magnitude; naive accumulation loses the small-tau increments the scaling
//! fits live on. Neumaier's variant of Kahan summation keeps the running
//! error term correct even when an addend exceeds the partial sum.

use crate::error::{Error, Result};

/// Running compensated sum. `total()` folds the error term back in.
#[derive(Clone, Copy, Debug, Default)]
pub struct Accumulator {
    sum: f64,
    comp: f64,
}

impl Accumulator {
    #[inline]
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, v: f64) {
        let t = self.sum + v;
        // |sum| >= |v|: low-order bits of v were lost, recover them; else the
        // roles swap. Branch-free forms exist but this keeps the invariant
        // visible.
        if self.sum.abs() >= v.abs() {
            self.comp += (self.sum - t) + v;
        } else {
            self.comp += (v - t) + self.sum;
        }
        self.sum = t;
    }

    #[inline]
    pub fn total(&self) -> f64 {
        self.sum + self.comp
    }
}

/// Compensated sum of a sequence. Non-finite inputs propagate into the
/// result; use [`checked_compensated_sum`] to get an error instead.
pub fn compensated_sum<I>(terms: I) -> f64
where
    I: IntoIterator<Item = f64>,
{
    let mut acc = Accumulator::new();
    for v in terms {
        acc.add(v);
    }
    acc.total()
}

/// Like [`compensated_sum`] but rejects NaN/inf inputs, naming the first
/// offending index.
pub fn checked_compensated_sum(terms: &[f64]) -> Result<f64> {
    if let Some(index) = terms.iter().position(|v| !v.is_finite()) {
        return Err(Error::NonFinite { index });
    }
    Ok(compensated_sum(terms.iter().copied()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn recovers_term_swallowed_by_large_cancellation() {
        // Naive left-to-right summation returns 0 here.
        assert_eq!(compensated_sum([1e16, 1.0, -1e16]), 1.0);
    }

    #[test]
    fn empty_sum_is_zero() {
        assert_eq!(compensated_sum([]), 0.0);
    }

    #[test]
    fn tenth_times_ten_is_one_exactly() {
        let total = compensated_sum(std::iter::repeat(0.1).take(10));
        assert_eq!(total, 1.0);
    }

    #[test]
    fn non_finite_is_flagged_with_index() {
        let err = checked_compensated_sum(&[1.0, f64::NAN, 2.0]).unwrap_err();
        match err {
            Error::NonFinite { index } => assert_eq!(index, 1),
            other => panic!("unexpected error: {other}"),
        }
        // The unchecked path propagates instead of erroring. The compensation
        // term goes through inf - inf, so the poison may surface as NaN.
        assert!(!compensated_sum([1.0, f64::INFINITY]).is_finite());
    }

    #[test]
    fn harmonic_series_matches_high_precision_reference() {
        // sum_{k=1}^{1e6} 1/k, reference from 40-digit arithmetic.
        let total = compensated_sum((1..=1_000_000).map(|k| 1.0 / k as f64));
        assert!((total - 14.392726722865723).abs() < 1e-12);
    }
}
