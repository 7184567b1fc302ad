//! Ordinary least squares for a straight line.
//!
//! The scaling analyses fit log-log and log-linear models with at most a few
//! hundred points, so a centered two-pass formulation is plenty and avoids
//! the catastrophic cancellation of the textbook sum-of-squares form.

use crate::error::{Error, Result};
use crate::numerics::sum::compensated_sum;
use serde::Serialize;

/// Result of a straight-line fit `y = intercept + slope * x`.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct FitResult {
    pub slope: f64,
    pub intercept: f64,
    /// Coefficient of determination, clamped to [0, 1]. A constant input
    /// reproduced exactly reports 1.
    pub r_squared: f64,
    pub n_points: usize,
    /// Range of the abscissa actually used, (min, max).
    pub window: (f64, f64),
}

/// [`FitResult`] plus standard errors of the two coefficients.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct FitDetail {
    pub fit: FitResult,
    pub slope_se: f64,
    pub intercept_se: f64,
}

fn validate(xs: &[f64], ys: &[f64]) -> Result<()> {
    if xs.len() != ys.len() {
        return Err(Error::Domain(format!(
            "xs and ys must have equal length, got {} and {}",
            xs.len(),
            ys.len()
        )));
    }
    if xs.len() < 2 {
        return Err(Error::Domain(format!(
            "linear fit needs at least 2 points, got {}",
            xs.len()
        )));
    }
    if let Some(i) = xs.iter().chain(ys.iter()).position(|v| !v.is_finite()) {
        return Err(Error::Domain(format!(
            "fit input contains a non-finite value (flat index {i})"
        )));
    }
    Ok(())
}

/// Least-squares straight line through `(xs, ys)`.
pub fn linear_fit(xs: &[f64], ys: &[f64]) -> Result<FitResult> {
    Ok(linear_fit_detailed(xs, ys)?.fit)
}

/// Least-squares fit with coefficient standard errors. With fewer than three
/// points the residual variance is undefined and both errors report zero.
pub fn linear_fit_detailed(xs: &[f64], ys: &[f64]) -> Result<FitDetail> {
    validate(xs, ys)?;
    let n = xs.len() as f64;
    let mx = compensated_sum(xs.iter().copied()) / n;
    let my = compensated_sum(ys.iter().copied()) / n;
    let sxx = compensated_sum(xs.iter().map(|&x| (x - mx) * (x - mx)));
    let sxy = compensated_sum(xs.iter().zip(ys).map(|(&x, &y)| (x - mx) * (y - my)));
    if sxx == 0.0 {
        return Err(Error::Domain(
            "linear fit is degenerate: all abscissa values are equal".into(),
        ));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;

    let ss_res = compensated_sum(
        xs.iter()
            .zip(ys)
            .map(|(&x, &y)| {
                let r = y - (intercept + slope * x);
                r * r
            }),
    );
    let ss_tot = compensated_sum(ys.iter().map(|&y| (y - my) * (y - my)));
    // ss_tot == 0 means the data are constant; ss_res is then zero too (the
    // fit reproduces a constant exactly) and the fit is perfect by
    // convention.
    let r_squared = if ss_tot == 0.0 {
        1.0
    } else {
        (1.0 - ss_res / ss_tot).clamp(0.0, 1.0)
    };

    let (lo, hi) = xs
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &x| {
            (lo.min(x), hi.max(x))
        });

    let (slope_se, intercept_se) = if xs.len() > 2 {
        let var = (ss_res / (n - 2.0)).max(0.0);
        (
            (var / sxx).sqrt(),
            (var * (1.0 / n + mx * mx / sxx)).sqrt(),
        )
    } else {
        (0.0, 0.0)
    };

    Ok(FitDetail {
        fit: FitResult {
            slope,
            intercept,
            r_squared,
            n_points: xs.len(),
            window: (lo, hi),
        },
        slope_se,
        intercept_se,
    })
}
