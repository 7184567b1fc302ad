//! Bath spectra: the mode tables every other module consumes.
//!
//! Three families:
//!
//! * **Comb**: the linear-dispersion bath `omega_k = 2 pi k / tau0`,
//!   k = 1..N. All modes share the period `tau0`, which is what produces
//!   exact rate-function zeros at integer multiples of it.
//! * **Power-law dispersion**: `omega_k = (k+1)^beta omega0`, k = 0..N-1.
//!   `beta = 1` reproduces an integer comb; any other `beta` detunes the
//!   modes and destroys the exact revivals.
//! * **Membrane**: frequencies and couplings imported from the physical
//!   membrane mode table; asymptotically a comb with spacing `delta`.
//!
//! Couplings follow `lambda_k = coupling_scale * omega_k^{alpha/2}`, so the
//! weight of mode k in the rate function is `(lambda_k/omega_k)^2 =
//! coupling_scale^2 * omega_k^{alpha-2}`.

use crate::error::{Error, Result};
use crate::membrane::MembraneModes;
use crate::numerics::compensated_sum;
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum SpectrumKind {
    Comb,
    PowerLawDispersion,
    Membrane,
}

/// A finite bath: strictly increasing positive frequencies and their
/// non-negative couplings, plus the metadata downstream analyses key on.
///
/// Immutable by convention: nothing in this crate mutates a spectrum after
/// construction, so it can be shared freely across threads.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ModeSpectrum {
    pub kind: SpectrumKind,
    /// Spectral-density exponent: couplings scale as omega^{alpha/2}.
    pub alpha: f64,
    /// Dispersion exponent; 1 for linear dispersion.
    pub beta: f64,
    /// Number of modes.
    pub size: usize,
    /// Natural recurrence time: tau0 for combs, 2 pi / delta for membranes,
    /// 2 pi / omega0 for power-law dispersions. Times in higher-level APIs
    /// are quoted in units of this.
    pub period_hint: f64,
    /// Angular frequencies, strictly increasing.
    pub frequencies: Vec<f64>,
    /// Couplings, same units as frequencies (hbar = 1).
    pub couplings: Vec<f64>,
}

/// Binned spectral density: per-bin sums of lambda^2.
#[derive(Clone, Debug, Serialize)]
pub struct SpectralDensityHistogram {
    /// n_bins + 1 edges, uniform over [0, max omega].
    pub bin_edges: Vec<f64>,
    /// Sum of couplings squared per bin.
    pub mass: Vec<f64>,
}

fn coupling_law(frequencies: &[f64], alpha: f64, scale: f64) -> Vec<f64> {
    // alpha = 0 must give exactly `scale`, not scale * pow(w, 0.0), to keep
    // flat couplings bitwise flat.
    if alpha == 0.0 {
        vec![scale; frequencies.len()]
    } else {
        frequencies
            .iter()
            .map(|&w| scale * w.powf(0.5 * alpha))
            .collect()
    }
}

impl ModeSpectrum {
    fn validate(&self) -> Result<()> {
        if self.size == 0 {
            return Err(Error::Domain("spectrum must contain at least one mode".into()));
        }
        if self.frequencies.len() != self.size || self.couplings.len() != self.size {
            return Err(Error::Domain(format!(
                "size {} disagrees with {} frequencies / {} couplings",
                self.size,
                self.frequencies.len(),
                self.couplings.len()
            )));
        }
        if !(self.period_hint > 0.0) || !self.period_hint.is_finite() {
            return Err(Error::Domain(format!(
                "period_hint must be positive and finite, got {}",
                self.period_hint
            )));
        }
        let mut prev = 0.0;
        for (i, &w) in self.frequencies.iter().enumerate() {
            if !(w > prev) || !w.is_finite() {
                return Err(Error::Domain(format!(
                    "frequencies must be strictly increasing and positive; index {i} has {w}"
                )));
            }
            prev = w;
        }
        if let Some(i) = self.couplings.iter().position(|&l| !(l >= 0.0) || !l.is_finite()) {
            return Err(Error::Domain(format!(
                "couplings must be non-negative and finite; index {i} has {}",
                self.couplings[i]
            )));
        }
        Ok(())
    }

    /// Comb bath `omega_k = 2 pi k / tau0`, k = 1..=n_modes. The k = 0 mode
    /// carries zero frequency and is excluded by construction.
    pub fn comb(n_modes: usize, tau0: f64, alpha: f64, coupling_scale: f64) -> Result<Self> {
        if !(tau0 > 0.0) || !tau0.is_finite() {
            return Err(Error::Domain(format!("tau0 must be positive, got {tau0}")));
        }
        if !(coupling_scale > 0.0) || !coupling_scale.is_finite() {
            return Err(Error::Domain(format!(
                "coupling_scale must be positive, got {coupling_scale}"
            )));
        }
        if !alpha.is_finite() {
            return Err(Error::Domain("alpha must be finite".into()));
        }
        let base = 2.0 * std::f64::consts::PI / tau0;
        // k * base keeps frequencies[k] = (k+1) * frequencies[0] exact: both
        // sides round the same product.
        let frequencies: Vec<f64> = (1..=n_modes).map(|k| k as f64 * base).collect();
        let couplings = coupling_law(&frequencies, alpha, coupling_scale);
        let s = Self {
            kind: SpectrumKind::Comb,
            alpha,
            beta: 1.0,
            size: n_modes,
            period_hint: tau0,
            frequencies,
            couplings,
        };
        s.validate()?;
        Ok(s)
    }

    /// Power-law dispersion `omega_k = (k+1)^beta omega0`, k = 0..n_modes.
    pub fn power_law(
        n_modes: usize,
        omega0: f64,
        beta: f64,
        alpha: f64,
        coupling_scale: f64,
    ) -> Result<Self> {
        if !(omega0 > 0.0) || !omega0.is_finite() {
            return Err(Error::Domain(format!("omega0 must be positive, got {omega0}")));
        }
        if !(beta > 0.0) || !beta.is_finite() {
            return Err(Error::Domain(format!("beta must be positive, got {beta}")));
        }
        if !(coupling_scale > 0.0) || !coupling_scale.is_finite() {
            return Err(Error::Domain(format!(
                "coupling_scale must be positive, got {coupling_scale}"
            )));
        }
        // beta = 1 short-circuits powf so the result is bit-identical to a
        // comb with tau0 = 2 pi / omega0.
        let frequencies: Vec<f64> = if beta == 1.0 {
            (1..=n_modes).map(|k| k as f64 * omega0).collect()
        } else {
            (1..=n_modes).map(|k| (k as f64).powf(beta) * omega0).collect()
        };
        let couplings = coupling_law(&frequencies, alpha, coupling_scale);
        let s = Self {
            kind: SpectrumKind::PowerLawDispersion,
            alpha,
            beta,
            size: n_modes,
            period_hint: 2.0 * std::f64::consts::PI / omega0,
            frequencies,
            couplings,
        };
        s.validate()?;
        Ok(s)
    }

    /// Adopt a membrane mode table as a bath. Frequencies and couplings pass
    /// through unchanged; the recurrence time is 2 pi / delta.
    pub fn from_membrane(modes: &MembraneModes) -> Result<Self> {
        let s = Self {
            kind: SpectrumKind::Membrane,
            alpha: 0.0,
            beta: 1.0,
            size: modes.omega.len(),
            period_hint: 2.0 * std::f64::consts::PI / modes.delta,
            frequencies: modes.omega.clone(),
            couplings: modes.coupling.clone(),
        };
        s.validate()?;
        Ok(s)
    }

    /// Rate-function weights `(lambda_k / omega_k)^2`.
    pub fn reduced_weights(&self) -> Vec<f64> {
        self.frequencies
            .iter()
            .zip(&self.couplings)
            .map(|(&w, &l)| {
                let r = l / w;
                r * r
            })
            .collect()
    }

    /// Sum of the rate-function weights: the saturation value the rate
    /// function oscillates under (and twice which it never exceeds).
    pub fn weight_sum(&self) -> f64 {
        compensated_sum(self.reduced_weights())
    }

    pub fn omega_max(&self) -> f64 {
        *self.frequencies.last().expect("validated spectra are nonempty")
    }

    /// Largest |Im z| the complex rate function admits before cosh overflow:
    /// 700 / omega_max.
    pub fn max_admissible_im(&self) -> f64 {
        700.0 / self.omega_max()
    }

    /// Re-validate an externally supplied spectrum (e.g. deserialized JSON).
    pub fn checked(self) -> Result<Self> {
        self.validate()?;
        Ok(self)
    }
}

/// Histogram of `lambda_k^2` over uniform bins spanning `[0, max omega]`.
/// The top mode lands in the last bin, not a phantom overflow bin.
pub fn spectral_density(spectrum: &ModeSpectrum, n_bins: usize) -> Result<SpectralDensityHistogram> {
    if n_bins == 0 {
        return Err(Error::Domain("n_bins must be at least 1".into()));
    }
    let top = spectrum.omega_max();
    let width = top / n_bins as f64;
    let bin_edges: Vec<f64> = (0..=n_bins).map(|i| i as f64 * width).collect();
    let mut mass = vec![0.0; n_bins];
    for (&w, &l) in spectrum.frequencies.iter().zip(&spectrum.couplings) {
        let bin = ((w / width) as usize).min(n_bins - 1);
        mass[bin] += l * l;
    }
    Ok(SpectralDensityHistogram { bin_edges, mass })
}
