//! Numerical laboratory for the pure dephasing of a probe coupled to a bath
//! of non-interacting bosonic modes.
//!
//! After a sudden switch-on of the couplings the probe's overlap with its
//! initial state (the Loschmidt echo) decays as `exp(-gamma(t))` with
//!
//! ```text
//! gamma(t) = sum_k (lambda_k / omega_k)^2 * (1 - cos(omega_k t))
//! ```
//!
//! This crate evaluates that rate function and everything the analysis of it
//! needs:
//!
//! * [`spectrum`] builds the mode tables (frequency combs, power-law
//!   dispersions, circular-membrane spectra) that define a bath,
//! * [`dynamics`] evaluates the rate function on real and complex time,
//!   together with geometric phases and finite-temperature coherence decay,
//! * [`fisher`] locates the complex-time zeros of the echo and reports where
//!   they pinch the real axis,
//! * [`scaling`] extracts critical exponents and classifies the
//!   non-analyticities of the rate function near its critical times,
//! * [`membrane`] computes the physical mode table of a clamped circular
//!   membrane resonator probed by a spin,
//! * [`numerics`] holds the self-contained kernels (compensated summation,
//!   Bessel functions, finite differences, least squares) the rest is built
//!   on.
//!
//! Everything is deterministic: the same inputs produce bitwise identical
//! outputs regardless of thread count.

pub mod constants;
pub mod dynamics;
pub mod error;
pub mod fisher;
pub mod membrane;
pub mod numerics;
pub mod scaling;
pub mod spectrum;

pub use error::{Error, Result};
pub use spectrum::{ModeSpectrum, SpectrumKind};

/// Crate version, re-exported so front-ends can stamp artifacts.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
