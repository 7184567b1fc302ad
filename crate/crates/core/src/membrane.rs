//! Axisymmetric normal modes of a clamped circular membrane under high
//! tension, probed by a spin through a magnetic field gradient.
//!
//! Only the radially symmetric modes enter: a centered probe has zero
//! overlap with every azimuthal mode. Mode `n` has profile
//! `J0(zeta_n r / R)` with `J0(zeta_n) = 0`, frequency
//! `Omega_n = (zeta_n / R) sqrt(Y h eps / rho)`, and effective mass
//! `M_n = pi R^2 rho J1(zeta_n)^2`. Because `zeta J1(zeta)^2 -> 2/pi`, the
//! product `M_n Omega_n` is asymptotically mode-independent, which is what
//! makes the spin couplings `Lambda_n = g mu_B eta x_n / hbar` uniform.
//!
//! The module also evaluates the Duffing and cross-mode stiffness ratios
//! that justify treating the membrane as a harmonic bath in the first
//! place: both are quadratic in the thermal occupation and of order 1e-16
//! per occupation quantum, so the harmonic model survives up to very high
//! temperature.

use crate::constants::{G_E, HBAR, MU_B};
use crate::error::{Error, Result};
use crate::numerics::{bessel_j0_zeros, j1};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Physical description of the membrane and its spin probe. SI units.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct MembraneParams {
    /// Membrane radius, m.
    pub radius: f64,
    /// Membrane thickness, m.
    pub thickness: f64,
    /// Young's modulus, Pa.
    pub young_modulus: f64,
    /// Areal mass density, kg/m^2.
    pub density_2d: f64,
    /// Built-in tensile strain, dimensionless.
    pub strain: f64,
    /// Magnetic field gradient at the probe, T/m. Rescales every coupling
    /// uniformly and cancels from exponents and zero locations.
    pub gradient: f64,
    /// Probe g-factor.
    pub g_factor: f64,
    /// Bohr magneton, J/T.
    pub bohr_magneton: f64,
    /// Poisson ratio. Accepted for completeness; it only enters through the
    /// bending rigidity, which the high-tension limit drops.
    #[serde(default)]
    pub poisson_ratio: Option<f64>,
    /// Target fundamental frequency in Hz when the radius was solved for
    /// rather than given. Metadata only.
    #[serde(default)]
    pub fundamental_target: Option<f64>,
}

/// h-BN thickness used by the stock parameter sets, m (3.3 angstrom).
pub const HBN_THICKNESS: f64 = 3.3e-10;
/// h-BN Young's modulus, Pa.
pub const HBN_YOUNG_MODULUS: f64 = 270e9;
/// h-BN areal density, kg/m^2.
pub const HBN_DENSITY_2D: f64 = 6.93e-7;
/// Default field gradient, T/m.
pub const DEFAULT_GRADIENT: f64 = 1e5;

/// Strain rule tying the built-in strain to the aspect ratio.
fn strain_rule(thickness: f64, radius: f64) -> f64 {
    1e7 * (thickness / radius) * (thickness / radius)
}

impl MembraneParams {
    /// Stock h-BN membrane of the given radius, strain set by the
    /// `1e7 (h/R)^2` rule.
    pub fn hbn(radius: f64) -> Self {
        Self {
            radius,
            thickness: HBN_THICKNESS,
            young_modulus: HBN_YOUNG_MODULUS,
            density_2d: HBN_DENSITY_2D,
            strain: strain_rule(HBN_THICKNESS, radius),
            gradient: DEFAULT_GRADIENT,
            g_factor: G_E,
            bohr_magneton: MU_B,
            poisson_ratio: None,
            fundamental_target: None,
        }
    }

    /// Stock h-BN membrane with the radius solved so the fundamental sits at
    /// `f_hz`. Under the strain rule `Omega_1 = zeta_1 sqrt(1e7 Y h^3 / rho) / R^2`,
    /// so the solve is closed-form.
    pub fn hbn_with_fundamental(f_hz: f64) -> Result<Self> {
        if !(f_hz > 0.0) {
            return Err(Error::Domain(format!(
                "fundamental_target must be positive, got {f_hz}"
            )));
        }
        let zeta1 = bessel_j0_zeros(1)?[0];
        let omega1 = 2.0 * std::f64::consts::PI * f_hz;
        let speed = (1e7 * HBN_YOUNG_MODULUS * HBN_THICKNESS.powi(3) / HBN_DENSITY_2D).sqrt();
        let radius = (zeta1 * speed / omega1).sqrt();
        let mut p = Self::hbn(radius);
        p.fundamental_target = Some(f_hz);
        Ok(p)
    }

    /// Check positivity of every physical field and the high-tension
    /// condition `strain >= 100 (h/R)^2`.
    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("radius", self.radius),
            ("thickness", self.thickness),
            ("young_modulus", self.young_modulus),
            ("density_2d", self.density_2d),
            ("strain", self.strain),
            ("gradient", self.gradient),
            ("g_factor", self.g_factor),
            ("bohr_magneton", self.bohr_magneton),
        ];
        for (name, v) in fields {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::Domain(format!(
                    "membrane parameter {name} must be positive and finite, got {v}"
                )));
            }
        }
        let aspect2 = (self.thickness / self.radius) * (self.thickness / self.radius);
        if self.strain < 100.0 * aspect2 {
            return Err(Error::Domain(format!(
                "strain {} is below the high-tension bound 100 (h/R)^2 = {:e}",
                self.strain,
                100.0 * aspect2
            )));
        }
        Ok(())
    }

    /// Transverse wave speed sqrt(Y h eps / rho), m/s.
    fn wave_speed(&self) -> f64 {
        (self.young_modulus * self.thickness * self.strain / self.density_2d).sqrt()
    }
}

/// Per-mode data of the axisymmetric spectrum.
#[derive(Clone, Debug, Serialize)]
pub struct MembraneModes {
    /// Bessel J0 zeros zeta_n.
    pub zeta: Vec<f64>,
    /// Angular frequencies Omega_n, rad/s. Strictly increasing.
    pub omega: Vec<f64>,
    /// Effective masses M_n, kg.
    pub mass: Vec<f64>,
    /// Zero-point amplitudes x_n = sqrt(hbar / 2 M_n Omega_n), m.
    pub xzpf: Vec<f64>,
    /// Spin couplings Lambda_n, reported in angular frequency (the joule
    /// value is Lambda_n * hbar).
    pub coupling: Vec<f64>,
    /// Asymptotic mode spacing Delta, rad/s: the mean consecutive gap over
    /// the upper half of the table.
    pub delta: f64,
}

/// Compute the first `n_modes` axisymmetric modes.
pub fn mode_table(params: &MembraneParams, n_modes: usize) -> Result<MembraneModes> {
    params.validate()?;
    if n_modes < 1 {
        return Err(Error::Domain("n_modes must be at least 1".into()));
    }
    let zeta = bessel_j0_zeros(n_modes)?;
    let speed = params.wave_speed();
    let area_density = std::f64::consts::PI * params.radius * params.radius * params.density_2d;
    let lambda_scale = params.g_factor * params.bohr_magneton * params.gradient / HBAR;

    let rows: Vec<(f64, f64, f64, f64)> = zeta
        .par_iter()
        .map(|&z| {
            let j1z = j1(z);
            let omega = z / params.radius * speed;
            let mass = area_density * j1z * j1z;
            let xzpf = (HBAR / (2.0 * mass * omega)).sqrt();
            (omega, mass, xzpf, lambda_scale * xzpf)
        })
        .collect();

    let omega: Vec<f64> = rows.iter().map(|r| r.0).collect();
    let mass: Vec<f64> = rows.iter().map(|r| r.1).collect();
    let xzpf: Vec<f64> = rows.iter().map(|r| r.2).collect();
    let coupling: Vec<f64> = rows.iter().map(|r| r.3).collect();

    // Mean gap over the upper half. With a single mode there is no gap; the
    // asymptotic spacing pi * speed / R (exact for large n) stands in.
    let n = omega.len();
    let delta = if n >= 2 {
        let mut start = n / 2;
        if start > n - 2 {
            start = 0;
        }
        let gaps: Vec<f64> = (start..n - 1).map(|i| omega[i + 1] - omega[i]).collect();
        gaps.iter().sum::<f64>() / gaps.len() as f64
    } else {
        std::f64::consts::PI * speed / params.radius
    };

    Ok(MembraneModes {
        zeta,
        omega,
        mass,
        xzpf,
        coupling,
        delta,
    })
}

/// Duffing negligibility ratio of mode `n` at thermal occupation
/// `n_occupation`: the quartic stiffness correction relative to the
/// harmonic energy,
/// `R_n = (hbar zeta_n / 8 pi R^3) eps^{-3/2} / sqrt(Y h rho) * occupation^2`.
///
/// Under the strain rule the R-dependence cancels and the prefactor is a
/// material constant, about 4.69e-16 per zeta per occupation squared for
/// h-BN.
pub fn anharmonicity_ratio(params: &MembraneParams, n: usize, n_occupation: f64) -> Result<f64> {
    params.validate()?;
    if n < 1 {
        return Err(Error::Domain("mode index n must be at least 1".into()));
    }
    if !(n_occupation >= 0.0) {
        return Err(Error::Domain(format!(
            "occupation must be non-negative, got {n_occupation}"
        )));
    }
    let zeta_n = *bessel_j0_zeros(n)?.last().expect("n >= 1");
    let coeff = HBAR * zeta_n
        / (8.0 * std::f64::consts::PI * params.radius.powi(3))
        * params.strain.powf(-1.5)
        / (params.young_modulus * params.thickness * params.density_2d).sqrt();
    Ok(coeff * n_occupation * n_occupation)
}

/// Cross-mode stiffness ratio
/// `R~_{n,m} = chi_nm (occ_n x_n)(occ_m x_m) / (1/2 sqrt(M_n M_m) Omega_n Omega_m)`
/// with `chi_nm = (Y h pi / 8 R^2) zeta_n^2 zeta_m^2 J1(zeta_n)^2 J1(zeta_m)^2`.
///
/// The normalization of chi is fixed by the diagonal identity
/// `R~_{n,n} = R_n`, which ties the cross-mode rate to the Duffing rate.
pub fn cross_coupling_ratio(
    params: &MembraneParams,
    n: usize,
    m: usize,
    occ_n: f64,
    occ_m: f64,
) -> Result<f64> {
    params.validate()?;
    if n < 1 || m < 1 {
        return Err(Error::Domain("mode indices must be at least 1".into()));
    }
    if !(occ_n >= 0.0) || !(occ_m >= 0.0) {
        return Err(Error::Domain("occupations must be non-negative".into()));
    }
    let table = mode_table(params, n.max(m))?;
    let (zn, zm) = (table.zeta[n - 1], table.zeta[m - 1]);
    let (j1n, j1m) = (j1(zn), j1(zm));
    let chi = params.young_modulus * params.thickness * std::f64::consts::PI
        / (8.0 * params.radius * params.radius)
        * (zn * zn * zm * zm)
        * (j1n * j1n * j1m * j1m);
    // chi x_n x_m is N/m, as is sqrt(M_n M_m) Omega_n Omega_m; the ratio is
    // dimensionless with no stray hbar.
    let numer = chi * (occ_n * table.xzpf[n - 1]) * (occ_m * table.xzpf[m - 1]);
    let denom = 0.5
        * (table.mass[n - 1] * table.mass[m - 1]).sqrt()
        * table.omega[n - 1]
        * table.omega[m - 1];
    Ok(numer / denom)
}
