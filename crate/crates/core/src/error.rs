//! Crate-wide error type.

/// Convenience alias used by every fallible operation in this crate.
pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// An argument violated a documented precondition. The message names the
    /// offending field and the constraint it broke.
    #[error("domain error: {0}")]
    Domain(String),

    /// A complex time was requested whose imaginary part would overflow the
    /// `cosh` factors of the rate function.
    #[error(
        "range error: |Im z| = {requested:e} exceeds the overflow guard; \
         the maximum admissible |Im z| for this spectrum is {max_im:e}"
    )]
    ImagOverflow { requested: f64, max_im: f64 },

    /// A grid that must be uniform was not.
    #[error(
        "non-uniform grid: spacing at index {index} deviates from the leading \
         spacing {expected:e} by {deviation:e}"
    )]
    NonUniformGrid {
        index: usize,
        expected: f64,
        deviation: f64,
    },

    /// A root bracket did not straddle a sign change. Zero tables are
    /// produced bracket by bracket, so this indicates an internal error
    /// rather than a recoverable miss.
    #[error("bracket [{lo}, {hi}] for zero #{index} does not straddle a sign change")]
    BracketFailure { index: usize, lo: f64, hi: f64 },

    /// A scaling window produced a non-positive rate increment, so its
    /// logarithm is undefined.
    #[error("scaling window error: delta-gamma is non-positive at tau = {tau:e}")]
    EmptyWindow { tau: f64 },

    /// The requested analysis needs more modes (or a finer grid) than the
    /// input provides.
    #[error("insufficient resolution: {0}")]
    InsufficientResolution(String),

    /// A summation input contained NaN or infinity.
    #[error("non-finite term at index {index}")]
    NonFinite { index: usize },
}
