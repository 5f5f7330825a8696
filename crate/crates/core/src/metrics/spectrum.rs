use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{invalid, Result};

use super::error_reduction_ratio;

/// `|H(ω)| = |Σ_k c_k e^{-iωk}|` on `num_points` uniformly spaced frequencies
/// covering `[0, π]` inclusive, as `(ω, magnitude)` pairs.
pub fn frequency_response(c: impl AsRef<[f64]>, num_points: usize) -> Result<Vec<(f64, f64)>> {
    if num_points < 2 {
        return Err(invalid("frequency response needs at least 2 points"));
    }
    let c = c.as_ref();
    let step = PI / (num_points - 1) as f64;
    Ok((0..num_points)
        .map(|i| {
            let omega = if i + 1 == num_points {
                PI
            } else {
                i as f64 * step
            };
            (omega, magnitude_at(c, omega))
        })
        .collect())
}

pub(crate) fn magnitude_at(c: &[f64], omega: f64) -> f64 {
    c.iter()
        .enumerate()
        .map(|(k, &ck)| Complex64::from_polar(ck, -omega * k as f64))
        .sum::<Complex64>()
        .norm()
}

/// Largest `|H(ω)|` over `[edge, π]`, sampled at `num_points` uniformly spaced
/// frequencies (both ends included).
pub fn stopband_peak(c: impl AsRef<[f64]>, edge: f64, num_points: usize) -> Result<f64> {
    if !(0.0..=PI).contains(&edge) {
        return Err(invalid(format!("stopband edge {edge} outside [0, π]")));
    }
    if num_points < 2 {
        return Err(invalid("stopband sweep needs at least 2 points"));
    }
    let c = c.as_ref();
    let step = (PI - edge) / (num_points - 1) as f64;
    Ok((0..num_points)
        .map(|i| magnitude_at(c, edge + i as f64 * step))
        .fold(0.0, f64::max))
}

/// Cutoff proxy `π r`; a moving average of `q` taps gives `π / q`, half its
/// first null.
pub fn nominal_cutoff(c: impl AsRef<[f64]>) -> f64 {
    PI * error_reduction_ratio(c)
}

/// Three times [`nominal_cutoff`], capped at `π`.
pub fn default_stopband_edge(c: impl AsRef<[f64]>) -> f64 {
    (3.0 * nominal_cutoff(c)).min(PI)
}
