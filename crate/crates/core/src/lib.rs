//! Weighted Savitzky-Golay smoothing filters.
//!
//! A Savitzky-Golay filter fits a low-degree polynomial to each window of `q`
//! samples and reports the fitted value at one position. Weighting the fit
//! residuals changes the taps. A constant weighting (the classic filter)
//! minimizes the output noise variance `r`. The quadratic weighting
//! `w_i = i (q + 1 - i) / 2` minimizes the smoothing parameter `s`, the
//! variance of successive output differences.
//!
//! ```
//! use weighted_savgol::{design_coefficients, smoothing_parameter, FilterSpec, WeightKind};
//!
//! let classic = design_coefficients(&FilterSpec::centered_with(25, 2, WeightKind::Constant)?)?;
//! let smooth = design_coefficients(&FilterSpec::centered_with(25, 2, WeightKind::Quadratic)?)?;
//! assert!(smoothing_parameter(&smooth) < smoothing_parameter(&classic));
//! # Ok::<(), weighted_savgol::Error>(())
//! ```
//!
//! Modules:
//!
//! * [`weights`]: weight families and the second-difference matrix.
//! * [`design`]: tap design by weighted least squares.
//! * [`metrics`]: `r`, `s`, closed forms, frequency response, Monte-Carlo checks.
//! * [`verify`]: numerical optimality certificate for the quadratic weights.
//! * [`filter`]: smoothing of records and streams.

pub mod design;
pub mod error;
pub mod filter;
pub mod metrics;
pub mod verify;
pub mod weights;

pub use design::{
    build_vandermonde, coefficient_weight_derivative, design_coefficients,
    design_via_orthonormal_basis, quadratic_weight_constant_fit, BasisMatrix, FilterCoefficients,
    FilterSpec,
};
pub use error::{Error, Result};
pub use filter::{smooth, stream_smooth, EdgePolicy, SignalSeries, StreamSmoother};
pub use metrics::{error_reduction_ratio, smoothing_parameter, MetricsReport};
pub use weights::{
    constant_weights, quadratic_weights, triangular_weights, weights_by_tridiagonal_solve,
    SecondDifferenceMatrix, WeightKind, WeightVector,
};

// Runs the code listings of the guide in book/ as doc-tests.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../README.md")]
    mod readme {}
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/weights.md")]
    mod weights {}
    #[doc = include_str!("../../../book/src/design.md")]
    mod design {}
    #[doc = include_str!("../../../book/src/metrics.md")]
    mod metrics {}
    #[doc = include_str!("../../../book/src/optimality.md")]
    mod optimality {}
    #[doc = include_str!("../../../book/src/smoothing.md")]
    mod smoothing {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
