//! Self-contained numerical kernels.
//!
//! Everything here is hand-written against stated accuracy contracts so the
//! physics modules above it have a fixed, testable foundation: compensated
//! summation, ordinary least squares, finite differences, bracketed root
//! finding and the Bessel functions J0/J1 with their zero table.

mod bessel;
mod diff;
mod fit;
mod root;
mod sum;

pub use bessel::{bessel_j, bessel_j0_zeros, j0, j1};
pub use diff::{central_derivative, DerivativeOrder, DerivativeSeries};
pub use fit::{linear_fit, linear_fit_detailed, FitDetail, FitResult};
pub use root::bracketed_root;
pub use sum::{checked_compensated_sum, compensated_sum, Accumulator};
