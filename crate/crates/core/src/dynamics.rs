//! Time-domain quantities of the dephasing problem.
//!
//! Everything reduces to weighted trigonometric sums over the bath:
//!
//! * return rate `gamma(t) = sum_k c_k (1 - cos omega_k t)` with weights
//!   `c_k = (lambda_k / omega_k)^2`,
//! * its analytic continuation `gamma(z)` to complex time,
//! * the echo modulus `|G| = exp(-gamma)`,
//! * the accumulated phase `sum_k c_k (omega_k t - sin omega_k t)` (the
//!   linear ramp is separable and can be dropped),
//! * the thermal rate `Gamma(t) = sum_k c_k coth(hbar omega_k / 2 k_B T)
//!   (1 - cos omega_k t)`, evaluated as `coth = 2 n_occ + 1`.
//!
//! Sums run in mode order under compensated accumulation, so grid evaluation
//! can parallelize over time points without losing bit stability.

use crate::constants::{HBAR, K_B};
use crate::error::{Error, Result};
use crate::numerics::{central_derivative, Accumulator, DerivativeOrder};
use crate::spectrum::ModeSpectrum;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

// ---------------------------------------------------------------------------
// Thermal occupation.
// ---------------------------------------------------------------------------

/// Bose occupation rule `n(omega) = 1 / (exp(x omega) - 1)`, stored through
/// the single scale `x = hbar / (k_B T)` (infinite at T = 0).
#[derive(Clone, Copy, Debug, Serialize)]
pub struct ThermalState {
    inv_thermal_omega: f64,
}

impl ThermalState {
    /// Zero temperature: every mode empty, coth factor exactly 1.
    pub fn zero() -> Self {
        Self {
            inv_thermal_omega: f64::INFINITY,
        }
    }

    /// Fix the occupation of a reference frequency (the fundamental):
    /// `n(omega0) = n_th` pins `x = ln(1 + 1/n_th) / omega0`.
    pub fn from_fundamental_occupation(omega0: f64, n_th: f64) -> Result<Self> {
        if !(omega0 > 0.0) || !omega0.is_finite() {
            return Err(Error::Domain(format!(
                "reference frequency must be positive, got {omega0}"
            )));
        }
        if !(n_th >= 0.0) {
            return Err(Error::Domain(format!(
                "occupation n_th must be non-negative, got {n_th}"
            )));
        }
        if n_th == 0.0 {
            return Ok(Self::zero());
        }
        Ok(Self {
            inv_thermal_omega: (1.0 / n_th).ln_1p() / omega0,
        })
    }

    /// Physical temperature in kelvin, frequencies in rad/s.
    pub fn from_temperature_si(kelvin: f64) -> Result<Self> {
        if !(kelvin >= 0.0) {
            return Err(Error::Domain(format!(
                "temperature must be non-negative, got {kelvin} K"
            )));
        }
        if kelvin == 0.0 {
            return Ok(Self::zero());
        }
        Ok(Self {
            inv_thermal_omega: HBAR / (K_B * kelvin),
        })
    }

    pub fn is_zero_temperature(&self) -> bool {
        self.inv_thermal_omega.is_infinite()
    }

    /// Mean occupation of a mode at `omega`.
    pub fn occupation(&self, omega: f64) -> f64 {
        if self.is_zero_temperature() {
            0.0
        } else {
            // expm1 keeps precision when x*omega is tiny (n up to ~1e2 means
            // arguments down to ~1e-2 and below).
            1.0 / (self.inv_thermal_omega * omega).exp_m1()
        }
    }

    /// `coth(hbar omega / 2 k_B T) = 2 n(omega) + 1`; exactly 1 at T = 0.
    pub fn coth_factor(&self, omega: f64) -> f64 {
        if self.is_zero_temperature() {
            1.0
        } else {
            2.0 * self.occupation(omega) + 1.0
        }
    }
}

// ---------------------------------------------------------------------------
// Scalar evaluations.
// ---------------------------------------------------------------------------

/// Shared kernel for the T = 0 and thermal rates. `None` and a
/// zero-temperature state run the identical instruction sequence, so the two
/// entry points agree bitwise at T = 0.
fn rate_kernel(spectrum: &ModeSpectrum, t: f64, thermal: Option<&ThermalState>) -> f64 {
    let mut acc = Accumulator::new();
    for (&w, &l) in spectrum.frequencies.iter().zip(&spectrum.couplings) {
        let c = {
            let r = l / w;
            r * r
        };
        let cf = match thermal {
            Some(th) => th.coth_factor(w),
            None => 1.0,
        };
        // 2 sin^2(wt/2) instead of 1 - cos(wt): the latter loses all digits
        // near revivals where the rate itself is the small residual.
        let s = (0.5 * w * t).sin();
        acc.add(c * cf * (2.0 * s * s));
    }
    acc.total()
}

/// Return rate `gamma(t)` at zero temperature. Non-negative; exactly 0 at
/// t = 0.
pub fn return_rate(spectrum: &ModeSpectrum, t: f64) -> f64 {
    rate_kernel(spectrum, t, None)
}

/// Thermal decoherence exponent `Gamma(t) >= gamma(t)`.
pub fn decoherence_rate(spectrum: &ModeSpectrum, t: f64, thermal: &ThermalState) -> f64 {
    rate_kernel(spectrum, t, Some(thermal))
}

/// Analytic continuation of the return rate to complex time.
///
/// `1 - cos(w(a+ib)) = (1 - cos(wa) cosh(wb)) + i sin(wa) sinh(wb)`; the
/// real and imaginary parts accumulate separately. Real `z` routes through
/// [`return_rate`] so points on the axis agree with it bitwise, and the
/// split form above is even/odd in `b`, which makes conjugate symmetry
/// exact.
pub fn return_rate_complex(spectrum: &ModeSpectrum, z: Complex64) -> Result<Complex64> {
    if !z.re.is_finite() || !z.im.is_finite() {
        return Err(Error::Domain(format!("complex time must be finite, got {z}")));
    }
    let max_im = spectrum.max_admissible_im();
    if z.im.abs() > max_im {
        return Err(Error::ImagOverflow {
            requested: z.im.abs(),
            max_im,
        });
    }
    if z.im == 0.0 {
        return Ok(Complex64::new(return_rate(spectrum, z.re), 0.0));
    }
    Ok(rate_complex_unchecked(spectrum, z))
}

/// The complex kernel without the guard, for inner loops that have already
/// bounded their region. Overflow produces infinities, never UB.
pub(crate) fn rate_complex_unchecked(spectrum: &ModeSpectrum, z: Complex64) -> Complex64 {
    let mut re = Accumulator::new();
    let mut im = Accumulator::new();
    for (&w, &l) in spectrum.frequencies.iter().zip(&spectrum.couplings) {
        let c = {
            let r = l / w;
            r * r
        };
        let (sa, ca) = (w * z.re).sin_cos();
        let b = w * z.im;
        re.add(c * (1.0 - ca * b.cosh()));
        im.add(c * (sa * b.sinh()));
    }
    Complex64::new(re.total(), im.total())
}

/// Derivative `gamma'(z) = sum_k c_k omega_k sin(omega_k z)`, needed by the
/// Newton polish of the zero finder.
pub(crate) fn rate_derivative_unchecked(spectrum: &ModeSpectrum, z: Complex64) -> Complex64 {
    let mut re = Accumulator::new();
    let mut im = Accumulator::new();
    for (&w, &l) in spectrum.frequencies.iter().zip(&spectrum.couplings) {
        let c = {
            let r = l / w;
            r * r
        };
        let (sa, ca) = (w * z.re).sin_cos();
        let b = w * z.im;
        re.add(c * w * (sa * b.cosh()));
        im.add(c * w * (ca * b.sinh()));
    }
    Complex64::new(re.total(), im.total())
}

/// Echo modulus `|G(t)| = exp(-gamma(t))`, in (0, 1].
pub fn loschmidt_modulus(spectrum: &ModeSpectrum, t: f64) -> f64 {
    (-return_rate(spectrum, t)).exp()
}

/// Accumulated phase. With `include_linear` the per-mode term is
/// `omega t - sin(omega t)`; without it only the oscillatory `-sin` part
/// remains (the linear ramp carries no non-analyticity).
pub fn geometric_phase(spectrum: &ModeSpectrum, t: f64, include_linear: bool) -> f64 {
    let mut acc = Accumulator::new();
    for (&w, &l) in spectrum.frequencies.iter().zip(&spectrum.couplings) {
        let c = {
            let r = l / w;
            r * r
        };
        let wt = w * t;
        let v = if include_linear { wt - wt.sin() } else { -wt.sin() };
        acc.add(c * v);
    }
    acc.total()
}

// ---------------------------------------------------------------------------
// Grid evaluation.
// ---------------------------------------------------------------------------

/// Uniform time grid in units of the spectrum's `period_hint`.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct TimeGrid {
    pub start: f64,
    pub end: f64,
    pub points: usize,
}

impl TimeGrid {
    pub fn new(start: f64, end: f64, points: usize) -> Result<Self> {
        if points < 2 {
            return Err(Error::Domain(format!(
                "time grid needs at least 2 points, got {points}"
            )));
        }
        if !(end > start) || !start.is_finite() || !end.is_finite() {
            return Err(Error::Domain(format!(
                "time grid needs finite end > start, got [{start}, {end}]"
            )));
        }
        Ok(Self { start, end, points })
    }

    pub fn times(&self) -> Vec<f64> {
        let h = (self.end - self.start) / (self.points - 1) as f64;
        (0..self.points).map(|i| self.start + i as f64 * h).collect()
    }
}

/// Sampled rate function on a uniform grid. Times are in units of the
/// spectrum's `period_hint`; derivatives (when requested) are with respect
/// to that same unit.
#[derive(Clone, Debug, Serialize)]
pub struct RateSeries {
    pub times: Vec<f64>,
    pub gamma: Vec<f64>,
    pub d1: Option<Vec<f64>>,
    pub d2: Option<Vec<f64>>,
    /// Occupation of the fundamental mode when a thermal state was supplied.
    pub temperature_tag: Option<f64>,
}

/// Evaluate the (optionally thermal) rate on a grid, in parallel over time
/// points. Mode order inside each point is fixed, so the output is
/// bit-stable for any worker count.
pub fn rate_series(
    spectrum: &ModeSpectrum,
    grid: &TimeGrid,
    thermal: Option<&ThermalState>,
    with_derivatives: bool,
) -> Result<RateSeries> {
    let times = grid.times();
    let unit = spectrum.period_hint;
    let gamma: Vec<f64> = times
        .par_iter()
        .map(|&t| rate_kernel(spectrum, t * unit, thermal))
        .collect();
    let (d1, d2) = if with_derivatives {
        let d1 = central_derivative(&times, &gamma, DerivativeOrder::First)?;
        let d2 = central_derivative(&times, &gamma, DerivativeOrder::Second)?;
        (Some(d1.values), Some(d2.values))
    } else {
        (None, None)
    };
    Ok(RateSeries {
        times,
        gamma,
        d1,
        d2,
        temperature_tag: thermal.map(|th| th.occupation(spectrum.frequencies[0])),
    })
}

/// Free-induction decay: the off-diagonal coherence
/// `initial_coherence * exp(-Gamma(t))`. Populations are constant under pure
/// dephasing and are not computed. `initial_coherence` must lie in
/// [0, 0.5], the physical range of a spin off-diagonal element.
#[derive(Clone, Debug, Serialize)]
pub struct FidSeries {
    pub rate: RateSeries,
    pub coherence: Vec<f64>,
}

pub fn fid_series(
    spectrum: &ModeSpectrum,
    grid: &TimeGrid,
    thermal: &ThermalState,
    initial_coherence: f64,
) -> Result<FidSeries> {
    if !(0.0..=0.5).contains(&initial_coherence) {
        return Err(Error::Domain(format!(
            "initial_coherence must lie in [0, 0.5], got {initial_coherence}"
        )));
    }
    let rate = rate_series(spectrum, grid, Some(thermal), false)?;
    let coherence = rate
        .gamma
        .iter()
        .map(|&g| initial_coherence * (-g).exp())
        .collect();
    Ok(FidSeries { rate, coherence })
}
