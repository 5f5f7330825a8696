//! Noise metrics of FIR smoothing filters.
//!
//! For white input noise of unit variance:
//!
//! * the error reduction ratio `r = cᵀc` is the output noise variance;
//! * the smoothing parameter `s = cᵀTc / 2` is the variance of successive
//!   output differences relative to that of successive input differences.
//!
//! Smaller is better for both. A constant residual weighting minimizes `r`, a
//! quadratic one minimizes `s`; the closed forms and approximations in this
//! module quantify that tradeoff.

mod empirical;
mod spectrum;

pub use empirical::{empirical_ratios, ratio_standard_errors, EmpiricalRatios, MIN_SAMPLES};
pub use spectrum::{default_stopband_edge, frequency_response, nominal_cutoff, stopband_peak};

use crate::design::{design_coefficients, FilterCoefficients, FilterSpec};
use crate::error::{invalid, Result};
use crate::weights::{SecondDifferenceMatrix, WeightKind};

/// `r = Σ c_i²`.
pub fn error_reduction_ratio(c: impl AsRef<[f64]>) -> f64 {
    c.as_ref().iter().map(|x| x * x).sum()
}

/// Both forms of the smoothing parameter: half the sum of squared successive
/// differences of the zero-padded taps, and `cᵀTc / 2`.
pub fn smoothing_parameter_forms(c: impl AsRef<[f64]>) -> (f64, f64) {
    let c = c.as_ref();
    if c.is_empty() {
        return (0.0, 0.0);
    }
    let q = c.len();
    let mut diff_sum = c[0] * c[0] + c[q - 1] * c[q - 1];
    for pair in c.windows(2) {
        let d = pair[1] - pair[0];
        diff_sum += d * d;
    }
    let t = SecondDifferenceMatrix::new(q).expect("non-empty");
    (diff_sum / 2.0, t.quadratic_form(c) / 2.0)
}

/// `s = ½ [(0 - c_1)² + (c_1 - c_2)² + … + (c_q - 0)²]`.
pub fn smoothing_parameter(c: impl AsRef<[f64]>) -> f64 {
    let c = c.as_ref();
    let (by_differences, by_quadratic_form) = smoothing_parameter_forms(c);
    debug_assert!(
        (by_differences - by_quadratic_form).abs() <= 1e-12 * error_reduction_ratio(c).max(1e-300),
        "smoothing parameter forms disagree: {by_differences} vs {by_quadratic_form}"
    );
    by_differences
}

/// Exact `r` and `s` of the degree-0 filters under constant (`r0`, `s0`) and
/// quadratic (`r2`, `s2`) weights.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClosedForms {
    pub r0: f64,
    pub s0: f64,
    pub r2: f64,
    pub s2: f64,
}

impl ClosedForms {
    pub fn r0_over_r2(&self) -> f64 {
        self.r0 / self.r2
    }

    pub fn s0_over_s2(&self) -> f64 {
        self.s0 / self.s2
    }
}

fn check_odd_window(q: usize) -> Result<()> {
    if q == 0 || q.is_multiple_of(2) {
        return Err(invalid(format!(
            "window length must be a positive odd integer, got {q}"
        )));
    }
    Ok(())
}

/// Moving average: `r0 = 1/q`, `s0 = 1/q²`. Quadratic weights:
/// `r2 = (6/5) ((q+1)² + 1) / (q (q+1) (q+2))`, `s2 = 6 / (q (q+1) (q+2))`.
pub fn closed_forms(q: usize) -> Result<ClosedForms> {
    check_odd_window(q)?;
    let q = q as f64;
    let cubic = q * (q + 1.0) * (q + 2.0);
    Ok(ClosedForms {
        r0: 1.0 / q,
        s0: 1.0 / (q * q),
        r2: 1.2 * ((q + 1.0) * (q + 1.0) + 1.0) / cubic,
        s2: 6.0 / cubic,
    })
}

/// Large-window approximations of the constant-vs-quadratic (`…_s2`, `…_r2`)
/// and constant-vs-triangular (`s0_over_s1`) metric ratios.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RatioApproximations {
    pub r0_over_r2: f64,
    pub s0_over_s2: f64,
    pub s0_over_s1: f64,
}

/// Approximate ratios for a centered filter with half-window index `m` (1-based
/// center, `m = (q + 1) / 2`) and `n` even-power basis columns.
///
/// ```text
/// r0/r2 ≈ 1 - (1 - n/m)² / (2 (2n + 1))
/// s0/s2 ≈ 1 + 3m (1 - n/m)² / (2n + 1)²
/// s0/s1 ≈ 1 + 3m (1 - n/m)² / (2n + 3/2)²
/// ```
pub fn ratio_approximations(m: usize, n: usize) -> Result<RatioApproximations> {
    if n == 0 {
        return Err(invalid("basis size n must be at least 1"));
    }
    if m < n {
        return Err(invalid(format!("need m >= n, got m = {m}, n = {n}")));
    }
    let (mf, nf) = (m as f64, n as f64);
    let gap = (1.0 - nf / mf).powi(2);
    Ok(RatioApproximations {
        r0_over_r2: 1.0 - gap / (2.0 * (2.0 * nf + 1.0)),
        s0_over_s2: 1.0 + 3.0 * mf * gap / (2.0 * nf + 1.0).powi(2),
        s0_over_s1: 1.0 + 3.0 * mf * gap / (2.0 * nf + 1.5).powi(2),
    })
}

/// Degree-0 approximations in terms of the window length:
/// `r0/r2 ≈ (5/6)(1 + 1/q)` and `s0/s2 ≈ (q/6)(1 + 3/q)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DegreeZeroApproximations {
    pub r0_over_r2: f64,
    pub s0_over_s2: f64,
}

pub fn degree_zero_approximations(q: usize) -> Result<DegreeZeroApproximations> {
    check_odd_window(q)?;
    let q = q as f64;
    Ok(DegreeZeroApproximations {
        r0_over_r2: 5.0 / 6.0 * (1.0 + 1.0 / q),
        s0_over_s2: q / 6.0 * (1.0 + 3.0 / q),
    })
}

/// `r` and `s` of the centered filters of one window and degree under each of
/// the three generated weightings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeightingComparison {
    pub q: usize,
    pub n: usize,
    pub constant: (f64, f64),
    pub triangular: (f64, f64),
    pub quadratic: (f64, f64),
}

impl WeightingComparison {
    pub fn r0_over_r2(&self) -> f64 {
        self.constant.0 / self.quadratic.0
    }

    pub fn s0_over_s2(&self) -> f64 {
        self.constant.1 / self.quadratic.1
    }

    pub fn s0_over_s1(&self) -> f64 {
        self.constant.1 / self.triangular.1
    }

    /// Metrics of one weighting as `(r, s)`.
    pub fn get(&self, kind: WeightKind) -> Option<(f64, f64)> {
        match kind {
            WeightKind::Constant => Some(self.constant),
            WeightKind::Triangular => Some(self.triangular),
            WeightKind::Quadratic => Some(self.quadratic),
            WeightKind::Custom => None,
        }
    }
}

/// Design the three centered filters for `(q, degree)` and measure each.
/// These quotients are the exact counterparts of [`ratio_approximations`].
pub fn compare_weightings(q: usize, degree: usize) -> Result<WeightingComparison> {
    let measure = |kind: WeightKind| -> Result<(usize, (f64, f64))> {
        let spec = FilterSpec::centered_with(q, degree, kind)?;
        let c = design_coefficients(&spec)?;
        Ok((
            spec.n(),
            (error_reduction_ratio(&c), smoothing_parameter(&c)),
        ))
    };
    let (n, constant) = measure(WeightKind::Constant)?;
    let (_, triangular) = measure(WeightKind::Triangular)?;
    let (_, quadratic) = measure(WeightKind::Quadratic)?;
    Ok(WeightingComparison {
        q,
        n,
        constant,
        triangular,
        quadratic,
    })
}

/// Metrics of one designed filter, with the closed-form and approximate
/// references that apply to its shape.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricsReport {
    pub r: f64,
    pub s: f64,
    pub q: usize,
    pub n: usize,
    /// 1-based center index, for centered filters.
    pub m: Option<usize>,
    /// Present for centered degree-0 filters.
    pub closed_forms: Option<ClosedForms>,
    pub degree_zero_approximations: Option<DegreeZeroApproximations>,
    /// Present for centered filters.
    pub approximations: Option<RatioApproximations>,
}

impl MetricsReport {
    pub fn new(c: &FilterCoefficients) -> Self {
        let spec = c.spec();
        let centered = spec.is_centered();
        let m = centered.then(|| spec.position() + 1);
        let degree_zero = centered && spec.n() == 1;
        MetricsReport {
            r: error_reduction_ratio(c),
            s: smoothing_parameter(c),
            q: spec.q(),
            n: spec.n(),
            m,
            closed_forms: degree_zero.then(|| closed_forms(spec.q()).ok()).flatten(),
            degree_zero_approximations: degree_zero
                .then(|| degree_zero_approximations(spec.q()).ok())
                .flatten(),
            approximations: m.and_then(|m| ratio_approximations(m, spec.n()).ok()),
        }
    }
}
