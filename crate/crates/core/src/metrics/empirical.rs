//! Monte-Carlo estimates of `r` and `s`.
//!
//! Noise is drawn from ChaCha8 seeded with `seed` through the ziggurat
//! standard normal sampler of `rand_distr`, so a given `(taps, sample_count,
//! seed)` always reproduces the same estimate.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{invalid, Result};

use super::error_reduction_ratio;

/// Smallest accepted `sample_count`.
pub const MIN_SAMPLES: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EmpiricalRatios {
    /// Output variance over input variance.
    pub r_hat: f64,
    /// Successive-difference variance of the output over that of the input.
    pub s_hat: f64,
}

/// Filter `sample_count + q` samples of white Gaussian noise with `c` and
/// measure the two variance ratios on the result.
pub fn empirical_ratios(
    c: impl AsRef<[f64]>,
    sample_count: usize,
    seed: u64,
) -> Result<EmpiricalRatios> {
    let c = c.as_ref();
    if c.is_empty() {
        return Err(invalid("empty filter"));
    }
    if sample_count < MIN_SAMPLES {
        return Err(invalid(format!(
            "need at least {MIN_SAMPLES} samples, got {sample_count}"
        )));
    }
    let q = c.len();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let noise: Vec<f64> = (0..sample_count + q)
        .map(|_| StandardNormal.sample(&mut rng))
        .collect();
    let output: Vec<f64> = noise
        .windows(q)
        .map(|w| w.iter().zip(c).map(|(x, k)| x * k).sum())
        .collect();

    Ok(EmpiricalRatios {
        r_hat: mean_square(&output) / mean_square(&noise),
        s_hat: mean_square_diff(&output) / mean_square_diff(&noise),
    })
}

fn mean_square(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>() / x.len() as f64
}

fn mean_square_diff(x: &[f64]) -> f64 {
    let sum: f64 = x.windows(2).map(|w| (w[1] - w[0]).powi(2)).sum();
    sum / (x.len() - 1) as f64
}

// Σ_k (Σ_i f_i g_{i+k})² over all lags.
fn squared_cross_correlation_sum(f: &[f64], g: &[f64]) -> f64 {
    let lags = f.len() as isize + g.len() as isize - 1;
    (0..lags)
        .map(|l| {
            let k = l - (f.len() as isize - 1);
            let rho: f64 = f
                .iter()
                .enumerate()
                .filter_map(|(i, fi)| {
                    let j = i as isize + k;
                    (j >= 0 && (j as usize) < g.len()).then(|| fi * g[j as usize])
                })
                .sum();
            rho * rho
        })
        .sum()
}

// Delta-method variance of mean((f*e)²) / mean((g*e)²) for unit white
// Gaussian e; uses Cov(mean a², mean b²) ≈ (2/N) Σ_k ρ_ab(k)².
fn ratio_variance(f: &[f64], g: &[f64], sample_count: usize) -> f64 {
    let a = error_reduction_ratio(f);
    let b = error_reduction_ratio(g);
    let ratio = a / b;
    let n = sample_count as f64;
    let var_a = 2.0 / n * squared_cross_correlation_sum(f, f);
    let var_b = 2.0 / n * squared_cross_correlation_sum(g, g);
    let cov = 2.0 / n * squared_cross_correlation_sum(f, g);
    ((var_a - 2.0 * ratio * cov + ratio * ratio * var_b) / (b * b)).max(0.0)
}

/// Large-sample standard errors of [`empirical_ratios`]' two estimates, as
/// `(se_r, se_s)`.
pub fn ratio_standard_errors(c: impl AsRef<[f64]>, sample_count: usize) -> (f64, f64) {
    let c = c.as_ref();
    let q = c.len();
    // output differences are the input filtered by the padded tap differences
    let diff_taps: Vec<f64> = (0..=q)
        .map(|k| {
            let prev = if k > 0 { c[k - 1] } else { 0.0 };
            let cur = if k < q { c[k] } else { 0.0 };
            prev - cur
        })
        .collect();
    let se_r = ratio_variance(c, &[1.0], sample_count).sqrt();
    let se_s = ratio_variance(&diff_taps, &[-1.0, 1.0], sample_count).sqrt();
    (se_r, se_s)
}
