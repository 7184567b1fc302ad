//! Critical times, critical exponents, and transition-order classification.
//!
//! Near a critical time `t_c` the rate increment
//! `delta_gamma(tau) = |gamma(t_c(1+tau)) - gamma(t_c)|` follows either a
//! power law `A tau^xi` or a logarithmic law; which one, and with what
//! exponent, is the fingerprint of the transition. Everything here samples
//! `delta_gamma` on log-spaced proximity grids and runs both regressions,
//! keeping the r^2 of each so the model choice is auditable.
//!
//! Proximity is always the normalized `tau = (t - t_c)/t_c`, and `t_c` is
//! quoted in units of the spectrum's `period_hint`.

use crate::dynamics::{decoherence_rate, return_rate, ThermalState};
use crate::error::{Error, Result};
use crate::numerics::{linear_fit, linear_fit_detailed, FitResult};
use crate::spectrum::{ModeSpectrum, SpectrumKind};
use rayon::prelude::*;
use serde::Serialize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum ScalingModel {
    PowerLaw,
    Logarithmic,
}

/// Which side of the critical time to sample.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Side {
    Above,
    Below,
    Both,
}

/// Outcome of a scaling fit at one critical time.
#[derive(Clone, Debug, Serialize)]
pub struct ScalingFit {
    /// Critical time, units of period_hint.
    pub t_c: f64,
    /// Winning model by r^2.
    pub model: ScalingModel,
    /// Exponent xi for PowerLaw; None for Logarithmic.
    pub exponent: Option<f64>,
    /// A in `A tau^xi`, or the slope of the log law.
    pub prefactor: f64,
    /// Regression record of the winning model (abscissa is ln tau).
    pub fit: FitResult,
    pub r2_power: f64,
    pub r2_log: f64,
    #[serde(rename = "window")]
    pub tau_window: (f64, f64),
    pub n_samples: usize,
}

/// Transition order: the classifier's ladder, or Analytic when the rate
/// function shows no detectable non-smoothness at the candidate time.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum TransitionOrder {
    Order(u8),
    Analytic,
}

// ---------------------------------------------------------------------------
// Critical-time candidates.
// ---------------------------------------------------------------------------

/// Candidate critical times in units of period_hint: integer multiples for
/// combs (and power-law dispersions, whose pseudo-period is 2 pi / omega0),
/// half-integer multiples for membranes, whose echo kinks at both the full
/// and the half recurrence.
pub fn candidate_critical_times(spectrum: &ModeSpectrum, n_periods: usize) -> Result<Vec<f64>> {
    if n_periods < 1 {
        return Err(Error::Domain("n_periods must be at least 1".into()));
    }
    Ok(match spectrum.kind {
        SpectrumKind::Comb | SpectrumKind::PowerLawDispersion => {
            (1..=n_periods).map(|n| n as f64).collect()
        }
        SpectrumKind::Membrane => (1..=2 * n_periods).map(|n| 0.5 * n as f64).collect(),
    })
}

// ---------------------------------------------------------------------------
// delta-gamma sampling and the two regression models.
// ---------------------------------------------------------------------------

fn rate_at(spectrum: &ModeSpectrum, t_abs: f64, thermal: Option<&ThermalState>) -> f64 {
    match thermal {
        Some(th) => decoherence_rate(spectrum, t_abs, th),
        None => return_rate(spectrum, t_abs),
    }
}

/// Log-spaced proximity samples and their rate increments
/// `|gamma(t_c(1 +/- tau)) - gamma(t_c)|`: the raw sweep behind every fit
/// here, exposed because it is also the plottable artifact. `tau` values
/// are positive; the side determines whether `t_c(1+tau)`, `t_c(1-tau)`,
/// or both are sampled (Both concatenates above then below).
pub fn sample_delta(
    spectrum: &ModeSpectrum,
    t_c: f64,
    window: (f64, f64),
    n_samples: usize,
    thermal: Option<&ThermalState>,
    side: Side,
) -> Result<(Vec<f64>, Vec<f64>)> {
    let t_c_abs = t_c * spectrum.period_hint;
    let base = rate_at(spectrum, t_c_abs, thermal);
    let (lo, hi) = window;
    let ratio = hi / lo;
    let taus: Vec<f64> = (0..n_samples)
        .map(|i| lo * ratio.powf(i as f64 / (n_samples - 1) as f64))
        .collect();

    let signs: &[f64] = match side {
        Side::Above => &[1.0],
        Side::Below => &[-1.0],
        Side::Both => &[1.0, -1.0],
    };
    let mut all_taus = Vec::with_capacity(taus.len() * signs.len());
    let mut deltas = Vec::with_capacity(taus.len() * signs.len());
    for &sign in signs {
        let d: Vec<f64> = taus
            .par_iter()
            .map(|&tau| (rate_at(spectrum, t_c_abs * (1.0 + sign * tau), thermal) - base).abs())
            .collect();
        all_taus.extend_from_slice(&taus);
        deltas.extend(d);
    }
    if let Some(i) = deltas.iter().position(|&d| !(d > 0.0)) {
        return Err(Error::EmptyWindow { tau: all_taus[i] });
    }
    Ok((all_taus, deltas))
}

/// Both candidate regressions on one (tau, delta) sample set.
#[derive(Clone, Copy, Debug)]
pub struct ModelFits {
    /// ln delta vs ln tau.
    pub power: FitResult,
    /// delta vs ln tau.
    pub log: FitResult,
}

/// Fit the power-law and logarithmic models on positive samples. Exposed so
/// synthetic series can exercise the exact recovery path the spectra use.
pub fn fit_models(taus: &[f64], deltas: &[f64]) -> Result<ModelFits> {
    if taus.len() != deltas.len() || taus.len() < 2 {
        return Err(Error::Domain(
            "model fits need equal-length tau/delta lists with at least 2 points".into(),
        ));
    }
    if let Some(i) = taus.iter().position(|&t| !(t > 0.0)) {
        return Err(Error::Domain(format!("tau values must be positive, index {i}")));
    }
    if let Some(i) = deltas.iter().position(|&d| !(d > 0.0)) {
        return Err(Error::EmptyWindow { tau: taus[i] });
    }
    let ln_tau: Vec<f64> = taus.iter().map(|&t| t.ln()).collect();
    let ln_delta: Vec<f64> = deltas.iter().map(|&d| d.ln()).collect();
    Ok(ModelFits {
        power: linear_fit(&ln_tau, &ln_delta)?,
        log: linear_fit(&ln_tau, deltas)?,
    })
}

/// Extract the critical behavior of the (optionally thermal) rate near
/// `t_c`: sample `delta_gamma` on a log-spaced window and keep the better of
/// the power-law and logarithmic regressions.
///
/// The window must respect the finite-size floor `tau >= 1/N`: closer than
/// that the discrete bath resolves individual modes and the scaling regime
/// ends.
pub fn fit_scaling(
    spectrum: &ModeSpectrum,
    t_c: f64,
    tau_window: (f64, f64),
    n_samples: usize,
    thermal: Option<&ThermalState>,
    side: Side,
) -> Result<ScalingFit> {
    let (lo, hi) = tau_window;
    let floor = (1.0 / spectrum.size as f64).max(1e-10);
    if !(lo >= floor) {
        return Err(Error::Domain(format!(
            "tau window low {lo:e} is below the finite-size floor {floor:e}"
        )));
    }
    if !(hi < 0.5) || !(hi > lo) {
        return Err(Error::Domain(format!(
            "tau window must satisfy low < high < 0.5, got [{lo:e}, {hi:e}]"
        )));
    }
    if n_samples < 10 {
        return Err(Error::Domain(format!(
            "scaling fit needs at least 10 samples, got {n_samples}"
        )));
    }
    if !(t_c > 0.0) || !t_c.is_finite() {
        return Err(Error::Domain(format!("t_c must be positive, got {t_c}")));
    }
    let (taus, deltas) = sample_delta(spectrum, t_c, tau_window, n_samples, thermal, side)?;
    let fits = fit_models(&taus, &deltas)?;
    let power_wins = fits.power.r_squared >= fits.log.r_squared;
    let (model, fit) = if power_wins {
        (ScalingModel::PowerLaw, fits.power)
    } else {
        (ScalingModel::Logarithmic, fits.log)
    };
    Ok(ScalingFit {
        t_c,
        model,
        exponent: power_wins.then_some(fit.slope),
        prefactor: if power_wins { fit.intercept.exp() } else { fit.slope },
        fit,
        r2_power: fits.power.r_squared,
        r2_log: fits.log.r_squared,
        tau_window,
        n_samples: taus.len(),
    })
}

// ---------------------------------------------------------------------------
// Short-time crossover.
// ---------------------------------------------------------------------------

/// Below `tau ~ 1/N` every cosine in the rate sum is still in its quadratic
/// regime, so `delta_gamma ~ tau^2` regardless of alpha; the scaling law
/// only takes over outside the finite-size floor. This fits the power law
/// separately on the inner window [1e-2/N, 1e-1/N] and the outer window
/// [10/N, 1e-2] and reports the inner exponent together with the tau where
/// the two fitted lines cross.
pub fn short_time_crossover(spectrum: &ModeSpectrum, t_c: f64) -> Result<(f64, f64)> {
    if spectrum.kind != SpectrumKind::Comb {
        return Err(Error::Domain(
            "short-time crossover analysis requires a comb spectrum".into(),
        ));
    }
    let n = spectrum.size as f64;
    let outer_lo = 10.0 / n;
    if outer_lo >= 1e-2 {
        return Err(Error::InsufficientResolution(format!(
            "outer window [10/N, 1e-2] is empty for N = {}; need N > 1000",
            spectrum.size
        )));
    }
    let inner = (1e-2 / n, 1e-1 / n);
    let outer = (outer_lo, 1e-2);
    let (ti, di) = sample_delta(spectrum, t_c, inner, 25, None, Side::Above)?;
    let (to, do_) = sample_delta(spectrum, t_c, outer, 25, None, Side::Above)?;
    let inner_fit = fit_models(&ti, &di)?.power;
    let outer_fit = fit_models(&to, &do_)?.power;
    let dxi = inner_fit.slope - outer_fit.slope;
    if dxi.abs() < 1e-9 {
        return Err(Error::InsufficientResolution(
            "inner and outer exponents coincide; no crossover detectable".into(),
        ));
    }
    let tau_break = ((outer_fit.intercept - inner_fit.intercept) / dxi).exp();
    Ok((tau_break, inner_fit.slope))
}

// ---------------------------------------------------------------------------
// Size scaling.
// ---------------------------------------------------------------------------

/// Rate at fixed proximity `tau` from the `t_c_index`-th critical time, for
/// a family of fresh combs of the given sizes. Linear in size while
/// `L << 1/tau`, flat once `L >> 1/tau`.
pub fn size_scaling(
    alpha: f64,
    sizes: &[usize],
    tau: f64,
    t_c_index: usize,
) -> Result<Vec<(usize, f64)>> {
    if sizes.is_empty() {
        return Err(Error::Domain("sizes must be nonempty".into()));
    }
    if !sizes.windows(2).all(|w| w[0] < w[1]) {
        return Err(Error::Domain("sizes must be strictly increasing".into()));
    }
    if !(tau > 0.0) || !tau.is_finite() {
        return Err(Error::Domain(format!("tau must be positive, got {tau}")));
    }
    if t_c_index < 1 {
        return Err(Error::Domain("t_c_index must be at least 1".into()));
    }
    let t = t_c_index as f64 * (1.0 + tau);
    sizes
        .par_iter()
        .map(|&l| {
            let comb = ModeSpectrum::comb(l, 1.0, alpha, 1.0)?;
            Ok((l, return_rate(&comb, t)))
        })
        .collect()
}

// ---------------------------------------------------------------------------
// Transition order.
// ---------------------------------------------------------------------------

/// Five-point first derivative of the rate at absolute time `x`, step `h`.
fn d1_5pt(spectrum: &ModeSpectrum, x: f64, h: f64) -> f64 {
    (return_rate(spectrum, x - 2.0 * h) - 8.0 * return_rate(spectrum, x - h)
        + 8.0 * return_rate(spectrum, x + h)
        - return_rate(spectrum, x + 2.0 * h))
        / (12.0 * h)
}

/// Measured jump of the first derivative across `t_c`: the intercept of a
/// linear fit of `J(delta) = |gamma'(t_c(1+delta)) - gamma'(t_c(1-delta))|`
/// over a decade of delta in [10/N, 100/N], extrapolated to delta = 0.
/// Stencil spacing is delta * t_c / 8, well inside each flank.
pub fn first_derivative_jump(spectrum: &ModeSpectrum, t_c: f64) -> Result<(f64, f64, f64)> {
    if !(t_c > 0.0) || !t_c.is_finite() {
        return Err(Error::Domain(format!("t_c must be positive, got {t_c}")));
    }
    let t_c_abs = t_c * spectrum.period_hint;
    let n = spectrum.size as f64;
    let (lo, hi) = (10.0 / n, 100.0 / n);
    let m = 11usize;
    let deltas: Vec<f64> = (0..m)
        .map(|i| lo * (hi / lo).powf(i as f64 / (m - 1) as f64))
        .collect();
    let jumps: Vec<f64> = deltas
        .par_iter()
        .map(|&d| {
            let u = d * t_c_abs;
            let h = u / 8.0;
            (d1_5pt(spectrum, t_c_abs + u, h) - d1_5pt(spectrum, t_c_abs - u, h)).abs()
        })
        .collect();
    let detail = linear_fit_detailed(&deltas, &jumps)?;
    let max_jump = jumps.iter().fold(0.0f64, |a, &b| a.max(b));
    Ok((detail.fit.intercept, detail.intercept_se, max_jump))
}

/// Does the first derivative of gamma jump across t_c? Declared when the
/// extrapolated intercept clears 3 sigma and a relative floor that guards
/// against declaring jumps out of pure rounding noise.
fn d1_jump_declared(spectrum: &ModeSpectrum, t_c: f64) -> Result<bool> {
    let (intercept, se, max_jump) = first_derivative_jump(spectrum, t_c)?;
    Ok(intercept > 3.0 * se && intercept > 1e-6 * max_jump)
}

/// Classify the non-analyticity of the rate function at a candidate
/// critical time.
///
/// The rate increment above `t_c` is fitted over `delta in [10/N, 100/N]`
/// against both a power law and a log law:
///
/// * log law wins outright: the rate itself has a logarithmic cusp,
///   order 0;
/// * measured exponent below 1.25: either a slope kink (first derivative
///   jumps: order 1) or a slope-divergence without a jump (order 2),
///   distinguished by the extrapolated derivative-jump test;
/// * exponent in [1.25, 2.5): order 2; in [2.5, 3.5]: order 3;
/// * anything steeper is indistinguishable from smooth at this resolution:
///   Analytic.
///
/// A direct two-sided difference of gamma is useless here: combs are exactly
/// periodic and even about their critical times, so every symmetric
/// difference of gamma (and of its second derivative) cancels identically
/// whatever the transition order. The exponent of the one-sided increment is
/// the robust observable.
pub fn transition_order(spectrum: &ModeSpectrum, t_c: f64) -> Result<TransitionOrder> {
    match spectrum.kind {
        SpectrumKind::Comb | SpectrumKind::Membrane => {}
        SpectrumKind::PowerLawDispersion => {
            return Err(Error::Domain(
                "transition order is defined for comb and membrane spectra".into(),
            ))
        }
    }
    if !(t_c > 0.0) || !t_c.is_finite() {
        return Err(Error::Domain(format!("t_c must be positive, got {t_c}")));
    }
    let n = spectrum.size as f64;
    let window = (10.0 / n, 100.0 / n);
    let (taus, deltas) = sample_delta(spectrum, t_c, window, 11, None, Side::Above)?;
    let fits = fit_models(&taus, &deltas)?;
    if fits.log.r_squared > fits.power.r_squared {
        return Ok(TransitionOrder::Order(0));
    }
    let xi = fits.power.slope;
    Ok(if xi < 1.25 {
        if d1_jump_declared(spectrum, t_c)? {
            TransitionOrder::Order(1)
        } else {
            TransitionOrder::Order(2)
        }
    } else if xi < 2.5 {
        TransitionOrder::Order(2)
    } else if xi <= 3.5 {
        TransitionOrder::Order(3)
    } else {
        TransitionOrder::Analytic
    })
}
