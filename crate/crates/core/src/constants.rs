//! Physical constants (SI, CODATA 2018 exact/recommended values).

/// Reduced Planck constant, J s. Exact since the 2019 SI redefinition.
pub const HBAR: f64 = 1.054_571_817e-34;

/// Boltzmann constant, J/K. Exact.
pub const K_B: f64 = 1.380_649e-23;

/// Bohr magneton, J/T.
pub const MU_B: f64 = 9.274_010_0783e-24;

/// Electron g-factor magnitude.
pub const G_E: f64 = 2.002_319;
