//! Numerical certificate that quadratic residual weights minimize the
//! smoothing parameter.
//!
//! With `W = diag(w)`, `w = T⁻¹ 1`, the matrix `T W` has eigenvalues
//! `i (i + 1) / 2` and its eigenvectors are polynomials in the sample index of
//! increasing degree, orthogonal under `W`. Any polynomial fitting basis is
//! therefore spanned by eigenvectors, which makes the gradient of `s` with
//! respect to the weights vanish. The Hessian at that point is
//!
//! ```text
//! H_ij = g_i [(I - A Aᵀ W) T]_ij g_j,   g = A Aᵀ u,
//! ```
//!
//! and `(I - A Aᵀ W) T = T - A Λ Aᵀ` is positive semi-definite, so the
//! stationary point is a minimum. The functions here compute each of those
//! objects numerically so they can be checked against the closed forms.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::design::{
    design_coefficients, orthonormal_basis, weighted_gram_schmidt, BasisMatrix, FilterSpec,
};
use crate::error::{invalid, Result};
use crate::metrics::smoothing_parameter;
use crate::weights::{quadratic_weights, SecondDifferenceMatrix, WeightVector};

/// Tolerances used by [`verify_pair`]'s pass flags.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// Relative deviation of the `T W` spectrum from `i (i + 1) / 2`.
    pub eigenvalue: f64,
    /// Max entry of `Aᵀ W A - I`.
    pub orthonormality: f64,
    /// Max entry of `T W A - A Λ`.
    pub eigen_relation: f64,
    /// Max `|ds/dW_kk|` at the optimum.
    pub gradient: f64,
    /// Smallest admissible Hessian eigenvalue.
    pub hessian_floor: f64,
    /// Allowed decrease of `s` under a random perturbation.
    pub perturbation: f64,
    /// Agreement of the projected-operator spectrum with the closed forms.
    pub lambda_min: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            eigenvalue: 1e-8,
            orthonormality: 1e-9,
            eigen_relation: 1e-8,
            gradient: 1e-10,
            hessian_floor: -1e-10,
            perturbation: 1e-12,
            lambda_min: 1e-8,
        }
    }
}

/// Relative threshold below which an eigenvalue counts as zero.
pub const ZERO_EIGENVALUE_THRESHOLD: f64 = 1e-9;

fn sorted_symmetric_spectrum(mut m: DMatrix<f64>) -> Vec<f64> {
    let mt = m.transpose();
    m += mt;
    m *= 0.5;
    let mut values: Vec<f64> = SymmetricEigen::new(m).eigenvalues.iter().copied().collect();
    values.sort_by(f64::total_cmp);
    values
}

/// `i (i + 1) / 2` for `i = 1..=q`.
pub fn tw_eigenvalue_formula(q: usize) -> Vec<f64> {
    (1..=q).map(|i| (i * (i + 1)) as f64 / 2.0).collect()
}

/// Spectrum of `T W` for quadratic `W`, ascending.
///
/// Computed from the similar symmetric matrix `W^½ T W^½`.
pub fn eigenvalues_of_tw(q: usize) -> Result<Vec<f64>> {
    let w = quadratic_weights(q)?;
    let t = SecondDifferenceMatrix::new(q)?.to_dense();
    let root: Vec<f64> = w.values().iter().map(|v| v.sqrt()).collect();
    let similar = DMatrix::from_fn(q, q, |i, j| root[i] * t[(i, j)] * root[j]);
    Ok(sorted_symmetric_spectrum(similar))
}

/// `W`-orthonormal polynomial basis for quadratic `W` over a window of `q`
/// samples, with `Λ` filled in from Rayleigh quotients `aᵀ W T W a`.
///
/// With `even_only` the basis is built from the powers `0, 2, …, 2(n-1)`
/// (the columns used by centered filters); otherwise from `0, 1, …, n-1`.
pub fn tw_eigenbasis(q: usize, n: usize, even_only: bool) -> Result<BasisMatrix> {
    if n == 0 {
        return Err(invalid("basis needs at least one column"));
    }
    let rows = if even_only { q.div_ceil(2) } else { q };
    if n > rows {
        return Err(invalid(format!(
            "{n} columns exceed the {rows} available for q = {q}"
        )));
    }
    let w = quadratic_weights(q)?;
    let center = (q as f64 - 1.0) / 2.0;
    let reach = center.max(1.0);
    let abscissas: Vec<f64> = (0..q).map(|i| (i as f64 - center) / reach).collect();
    let step = if even_only { 2 } else { 1 };
    let powers: Vec<u32> = (0..n).map(|k| (k * step) as u32).collect();
    let raw = DMatrix::from_fn(q, n, |i, k| abscissas[i].powi(powers[k] as i32));
    let a = weighted_gram_schmidt(&raw, w.values())?;

    let t = SecondDifferenceMatrix::new(q)?;
    let lambdas = (0..n)
        .map(|k| {
            let wa: Vec<f64> = a
                .column(k)
                .iter()
                .zip(w.values())
                .map(|(x, w)| x * w)
                .collect();
            t.quadratic_form(&wa)
        })
        .collect();
    let mut basis = BasisMatrix::from_columns(abscissas, powers, a, true);
    basis.set_eigenvalues(lambdas);
    Ok(basis)
}

/// Largest entries of `Aᵀ W A - I` and `T W A - A Λ` for a basis from
/// [`tw_eigenbasis`].
pub fn eigenbasis_residuals(basis: &BasisMatrix) -> Result<(f64, f64)> {
    let a = basis.matrix();
    let (q, n) = (a.nrows(), a.ncols());
    let w = quadratic_weights(q)?.to_diagonal();
    let t = SecondDifferenceMatrix::new(q)?.to_dense();
    let lambdas = basis
        .eigenvalues()
        .ok_or_else(|| invalid("basis carries no eigenvalues"))?;
    let gram = a.transpose() * &w * a - DMatrix::<f64>::identity(n, n);
    let lambda = DMatrix::from_diagonal(&DVector::from_column_slice(lambdas));
    let relation = &t * &w * a - a * lambda;
    Ok((gram.amax(), relation.amax()))
}

fn check_centered_pair(q: usize, n: usize) -> Result<usize> {
    if q.is_multiple_of(2) {
        return Err(invalid(format!("window length must be odd, got {q}")));
    }
    let m = q.div_ceil(2);
    if n == 0 || n >= m {
        return Err(invalid(format!("need m > n >= 1, got m = {m}, n = {n}")));
    }
    Ok(m)
}

/// Centered spec with `n` even-power columns, i.e. degree `2(n - 1)`.
pub fn centered_spec(n: usize, weights: WeightVector) -> Result<FilterSpec> {
    FilterSpec::centered(2 * (n - 1), weights)
}

/// Analytic `ds/dW_kk` for every `k`, for the centered filter with `n`
/// even-power columns and weights `weights`:
///
/// ```text
/// ds/dW_kk = g_k [(I - A Aᵀ W) T c]_k,   g = A Aᵀ u,   c = W g
/// ```
pub fn smoothness_gradient(q: usize, n: usize, weights: &WeightVector) -> Result<Vec<f64>> {
    check_centered_pair(q, n)?;
    if weights.q() != q {
        return Err(invalid(
            "weight vector length differs from the window length",
        ));
    }
    let spec = centered_spec(n, weights.clone())?;
    let a = orthonormal_basis(&spec)?.matrix().clone();
    let w = weights.values();
    let g = &a * a.row(spec.position()).transpose();
    let c: Vec<f64> = g.iter().zip(w).map(|(g, w)| g * w).collect();
    let tc = DVector::from_vec(SecondDifferenceMatrix::new(q)?.apply(&c));
    let w_tc = DVector::from_iterator(q, tc.iter().zip(w).map(|(x, w)| x * w));
    let projected = &tc - &a * (a.transpose() * w_tc);
    Ok((0..q).map(|k| g[k] * projected[k]).collect())
}

/// `s` of the centered filter with `n` even-power columns under `weights`.
pub fn smoothness_at(n: usize, weights: &WeightVector) -> Result<f64> {
    let spec = centered_spec(n, weights.clone())?;
    Ok(smoothing_parameter(design_coefficients(&spec)?))
}

/// Hessian of `s` in the diagonal weights at the quadratic weights,
/// `H_ij = g_i [(I - A Aᵀ W) T]_ij g_j`, symmetrized.
pub fn hessian(q: usize, n: usize) -> Result<DMatrix<f64>> {
    check_centered_pair(q, n)?;
    let weights = quadratic_weights(q)?;
    let spec = centered_spec(n, weights.clone())?;
    let a = orthonormal_basis(&spec)?.matrix().clone();
    let w = weights.to_diagonal();
    let t = SecondDifferenceMatrix::new(q)?.to_dense();
    let g = &a * a.row(spec.position()).transpose();
    let operator = (DMatrix::<f64>::identity(q, q) - &a * a.transpose() * &w) * t;
    let h = DMatrix::from_fn(q, q, |i, j| g[i] * operator[(i, j)] * g[j]);
    Ok((&h + h.transpose()) * 0.5)
}

/// Eigenvalues of the symmetric matrix `T - A Λ A^T`, ascending, for the first
/// `n` eigenvectors of `T W` (polynomials of degree `0..n`).
pub fn projected_operator_spectrum(q: usize, n: usize) -> Result<Vec<f64>> {
    if n == 0 || n >= q {
        return Err(invalid(format!("need 1 <= n < q, got q = {q}, n = {n}")));
    }
    let basis = tw_eigenbasis(q, n, false)?;
    Ok(projected_spectrum_of(&basis))
}

fn projected_spectrum_of(basis: &BasisMatrix) -> Vec<f64> {
    let a = basis.matrix();
    let q = a.nrows();
    let lambda = DMatrix::from_diagonal(&DVector::from_column_slice(
        basis.eigenvalues().expect("eigenbasis carries Λ"),
    ));
    let t = SecondDifferenceMatrix::new(q).expect("q >= 1").to_dense();
    sorted_symmetric_spectrum(t - a * lambda * a.transpose())
}

/// Split a spectrum into (count of zero eigenvalues, smallest nonzero one),
/// with zero meaning `|λ| <= 1e-9 · max|λ|`.
pub fn classify_spectrum(spectrum: &[f64]) -> (usize, Option<f64>) {
    let scale = spectrum.iter().fold(0.0f64, |a, b| a.max(b.abs()));
    let threshold = ZERO_EIGENVALUE_THRESHOLD * scale;
    let zeros = spectrum.iter().filter(|l| l.abs() <= threshold).count();
    let min_nonzero = spectrum
        .iter()
        .copied()
        .filter(|l| l.abs() > threshold)
        .min_by(f64::total_cmp);
    (zeros, min_nonzero)
}

/// Smallest nonzero eigenvalue of `T - A Λ Aᵀ`.
pub fn lambda_min(q: usize, n: usize) -> Result<f64> {
    let spectrum = projected_operator_spectrum(q, n)?;
    classify_spectrum(&spectrum)
        .1
        .ok_or_else(|| invalid("projected operator has no nonzero eigenvalue"))
}

/// `2 [1 - cos(2π / (q + 1))]`, the `n = 1` value of [`lambda_min`].
pub fn lambda_min_single_column(q: usize) -> f64 {
    2.0 * (1.0 - (2.0 * std::f64::consts::PI / (q as f64 + 1.0)).cos())
}

/// `4 - 2/(q + 1) - 2 / C(2q, q)`, the `n = q - 1` value of [`lambda_min`].
pub fn lambda_min_one_short(q: usize) -> f64 {
    4.0 - 2.0 / (q as f64 + 1.0) - 2.0 * inverse_central_binomial(q)
}

/// `1 / C(2q, q)`; exact integer arithmetic up to `q = 30`, logarithms beyond.
pub fn inverse_central_binomial(q: usize) -> f64 {
    if q <= 30 {
        // C(2q, k) for k = 0..=q built incrementally stays below C(60, 30) < 2^60
        let mut c: u64 = 1;
        for k in 0..q as u64 {
            c = c * (2 * q as u64 - k) / (k + 1);
        }
        1.0 / c as f64
    } else {
        let ln: f64 = (1..=q).map(|i| ((q + i) as f64 / i as f64).ln()).sum();
        (-ln).exp()
    }
}

/// Whether `λ_min(q, n)` strictly increases over `n = 1..q`.
pub fn lambda_min_monotonicity(q: usize) -> Result<bool> {
    if q < 3 {
        return Err(invalid("monotonicity needs q >= 3"));
    }
    let values = (1..q)
        .map(|n| lambda_min(q, n))
        .collect::<Result<Vec<_>>>()?;
    Ok(values.windows(2).all(|w| w[0] < w[1]))
}

/// Smallest `s(W') - s(W)` over `trials` random perturbations
/// `W' = W (1 + ε δ)`, `δ` uniform in `[-1, 1]` per weight, at the quadratic
/// weights. Non-negative (up to rounding) when `W` is a local minimum.
pub fn perturbation_margin(
    q: usize,
    n: usize,
    trials: usize,
    epsilon: f64,
    seed: u64,
) -> Result<f64> {
    check_centered_pair(q, n)?;
    if !(0.0..1.0).contains(&epsilon) {
        return Err(invalid("perturbation size must lie in [0, 1)"));
    }
    let base = quadratic_weights(q)?;
    let s0 = smoothness_at(n, &base)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut margin = f64::INFINITY;
    for _ in 0..trials {
        let perturbed: Vec<f64> = base
            .values()
            .iter()
            .map(|w| w * (1.0 + epsilon * rng.random_range(-1.0..=1.0)))
            .collect();
        let s = smoothness_at(n, &WeightVector::custom(perturbed)?)?;
        margin = margin.min(s - s0);
    }
    Ok(margin)
}

/// Pass/fail of each check in a [`VerificationReport`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Checks {
    pub tw_spectrum: bool,
    pub orthonormality: bool,
    pub eigen_relation: bool,
    pub stationarity: bool,
    pub hessian_psd: bool,
    pub perturbation: bool,
    pub projected_operator: bool,
    pub lambda_min_formula: bool,
}

impl Checks {
    pub fn all(&self) -> bool {
        self.tw_spectrum
            && self.orthonormality
            && self.eigen_relation
            && self.stationarity
            && self.hessian_psd
            && self.perturbation
            && self.projected_operator
            && self.lambda_min_formula
    }

    /// Names of the failing checks.
    pub fn failures(&self) -> Vec<&'static str> {
        [
            ("tw_spectrum", self.tw_spectrum),
            ("orthonormality", self.orthonormality),
            ("eigen_relation", self.eigen_relation),
            ("stationarity", self.stationarity),
            ("hessian_psd", self.hessian_psd),
            ("perturbation", self.perturbation),
            ("projected_operator", self.projected_operator),
            ("lambda_min_formula", self.lambda_min_formula),
        ]
        .into_iter()
        .filter_map(|(name, ok)| (!ok).then_some(name))
        .collect()
    }
}

/// Numeric evidence for one `(q, n)` pair of a centered filter.
#[derive(Debug, Clone, PartialEq)]
pub struct VerificationReport {
    pub q: usize,
    pub n: usize,
    pub eigenvalues_tw: Vec<f64>,
    pub eigenvalue_max_rel_deviation: f64,
    pub orthonormality_error: f64,
    pub eigen_relation_error: f64,
    pub gradient: Vec<f64>,
    pub max_abs_gradient: f64,
    pub hessian_spectrum: Vec<f64>,
    pub hessian_min_eigenvalue: f64,
    pub perturbation_margin: f64,
    /// Zero eigenvalues of `T - A Λ Aᵀ` (expected: `n`).
    pub projected_zero_count: usize,
    pub projected_max_eigenvalue: f64,
    pub lambda_min_observed: f64,
    /// Closed-form `λ_min` when `n = 1` or `n = q - 1`.
    pub lambda_min_formula: Option<f64>,
    pub checks: Checks,
}

/// Run every check for the centered filter of window `q` with `n` even-power
/// columns (`m > n >= 1`). `seed` drives the perturbation trials.
pub fn verify_pair(
    q: usize,
    n: usize,
    trials: usize,
    seed: u64,
    tol: &Tolerances,
) -> Result<VerificationReport> {
    check_centered_pair(q, n)?;

    let eigenvalues_tw = eigenvalues_of_tw(q)?;
    let eigenvalue_max_rel_deviation = eigenvalues_tw
        .iter()
        .zip(tw_eigenvalue_formula(q))
        .map(|(got, want)| ((got - want) / want).abs())
        .fold(0.0, f64::max);

    let basis = tw_eigenbasis(q, n, true)?;
    let (orthonormality_error, eigen_relation_error) = eigenbasis_residuals(&basis)?;

    let weights = quadratic_weights(q)?;
    let gradient = smoothness_gradient(q, n, &weights)?;
    let max_abs_gradient = gradient.iter().fold(0.0f64, |a, b| a.max(b.abs()));

    let hessian_spectrum = sorted_symmetric_spectrum(hessian(q, n)?);
    let hessian_min_eigenvalue = hessian_spectrum[0];

    let perturbation_margin = perturbation_margin(q, n, trials, 1e-2, seed)?;

    let projected = projected_operator_spectrum(q, n)?;
    let (projected_zero_count, lambda_min_observed) = classify_spectrum(&projected);
    let lambda_min_observed = lambda_min_observed.unwrap_or(0.0);
    let projected_max_eigenvalue = *projected.last().expect("q >= 3");
    let lambda_min_formula = if n == 1 {
        Some(lambda_min_single_column(q))
    } else if n == q - 1 {
        Some(lambda_min_one_short(q))
    } else {
        None
    };

    let checks = Checks {
        tw_spectrum: eigenvalue_max_rel_deviation <= tol.eigenvalue,
        orthonormality: orthonormality_error <= tol.orthonormality,
        eigen_relation: eigen_relation_error <= tol.eigen_relation,
        stationarity: max_abs_gradient <= tol.gradient,
        hessian_psd: hessian_min_eigenvalue >= tol.hessian_floor,
        perturbation: perturbation_margin >= -tol.perturbation,
        projected_operator: projected_zero_count == n
            && lambda_min_observed > 0.0
            && projected_max_eigenvalue < 4.0,
        lambda_min_formula: lambda_min_formula
            .is_none_or(|f| (f - lambda_min_observed).abs() <= tol.lambda_min),
    };

    Ok(VerificationReport {
        q,
        n,
        eigenvalues_tw,
        eigenvalue_max_rel_deviation,
        orthonormality_error,
        eigen_relation_error,
        gradient,
        max_abs_gradient,
        hessian_spectrum,
        hessian_min_eigenvalue,
        perturbation_margin,
        projected_zero_count,
        projected_max_eigenvalue,
        lambda_min_observed,
        lambda_min_formula,
        checks,
    })
}

/// All `(q, n)` pairs with odd `q` in `3..=max_window` and
/// `1 <= n <= min(max_n, m - 1)`, sorted by `(q, n)`.
pub fn verification_grid(max_window: usize, max_n: usize) -> Vec<(usize, usize)> {
    (3..=max_window)
        .step_by(2)
        .flat_map(|q| {
            let m = q.div_ceil(2);
            (1..=max_n.min(m - 1)).map(move |n| (q, n))
        })
        .collect()
}
