//! Finite differences on uniform grids.

use crate::error::{Error, Result};

/// Which derivative [`central_derivative`] evaluates.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DerivativeOrder {
    First,
    Second,
}

/// Differentiated samples plus the grid spacing they were computed with.
#[derive(Clone, Debug)]
pub struct DerivativeSeries {
    pub step: f64,
    pub values: Vec<f64>,
}

/// Relative tolerance for the uniform-grid check. Grids here are built by
/// multiplying an index by a step, so spacings agree to a few ulp; 1e-9
/// leaves room for that while still catching genuinely ragged inputs.
const GRID_RTOL: f64 = 1e-9;

fn check_uniform(xs: &[f64]) -> Result<f64> {
    let step = xs[1] - xs[0];
    if step <= 0.0 || !step.is_finite() {
        return Err(Error::Domain(format!(
            "grid must be strictly increasing, leading spacing is {step:e}"
        )));
    }
    for (i, w) in xs.windows(2).enumerate().skip(1) {
        let deviation = ((w[1] - w[0]) - step).abs();
        if deviation > GRID_RTOL * step.abs() {
            return Err(Error::NonUniformGrid {
                index: i + 1,
                expected: step,
                deviation,
            });
        }
    }
    Ok(step)
}

/// Second-order accurate derivative of sampled data on a uniform grid.
///
/// Interior points use central stencils; the endpoints use one-sided
/// stencils of the same order, so the output has the same length as the
/// input. Needs at least `2*order + 1` points.
pub fn central_derivative(
    xs: &[f64],
    ys: &[f64],
    order: DerivativeOrder,
) -> Result<DerivativeSeries> {
    if xs.len() != ys.len() {
        return Err(Error::Domain(format!(
            "xs and ys must have equal length, got {} and {}",
            xs.len(),
            ys.len()
        )));
    }
    let need = match order {
        DerivativeOrder::First => 3,
        DerivativeOrder::Second => 5,
    };
    if xs.len() < need {
        return Err(Error::Domain(format!(
            "{order:?} derivative needs at least {need} points, got {}",
            xs.len()
        )));
    }
    let h = check_uniform(xs)?;
    let n = ys.len();
    let mut values = vec![0.0; n];
    match order {
        DerivativeOrder::First => {
            values[0] = (-3.0 * ys[0] + 4.0 * ys[1] - ys[2]) / (2.0 * h);
            for i in 1..n - 1 {
                values[i] = (ys[i + 1] - ys[i - 1]) / (2.0 * h);
            }
            values[n - 1] = (3.0 * ys[n - 1] - 4.0 * ys[n - 2] + ys[n - 3]) / (2.0 * h);
        }
        DerivativeOrder::Second => {
            let h2 = h * h;
            values[0] = (2.0 * ys[0] - 5.0 * ys[1] + 4.0 * ys[2] - ys[3]) / h2;
            for i in 1..n - 1 {
                values[i] = (ys[i - 1] - 2.0 * ys[i] + ys[i + 1]) / h2;
            }
            values[n - 1] =
                (2.0 * ys[n - 1] - 5.0 * ys[n - 2] + 4.0 * ys[n - 3] - ys[n - 4]) / h2;
        }
    }
    Ok(DerivativeSeries { step: h, values })
}
