//! Savitzky-Golay coefficient design by weighted least squares.
//!
//! A filter is the row of the weighted hat matrix that evaluates the local
//! polynomial fit at one position of the window:
//!
//! ```text
//! c = W X (Xᵀ W X)⁻¹ Xᵀ u
//! ```
//!
//! where `X` holds powers of the window abscissas, `W` is the diagonal
//! residual weight matrix and `u` selects the evaluation position. Smoothing
//! is then the dot product `ŷ = cᵀ y` of the taps with each window of input.
//!
//! Two routes are implemented. [`design_coefficients`] solves the normal
//! equations with a Cholesky factorization; [`design_via_orthonormal_basis`]
//! orthonormalizes the basis under the `W` inner product and forms
//! `c = W A Aᵀ u`. They share no numerical code beyond building the power
//! columns and are used to check each other.

use nalgebra::{DMatrix, DVector};

use crate::error::{invalid, Error, Result};
use crate::weights::{quadratic_weights, WeightKind, WeightVector};

/// Window length, polynomial degree, residual weights and evaluation position
/// of a Savitzky-Golay filter.
///
/// `position` is a 0-based index into the window. A spec is *centered* when the
/// window length is odd and `position == (q - 1) / 2`; centered filters are
/// symmetric and only the even powers of the basis contribute, so the degree is
/// canonicalized down to the nearest even number.
#[derive(Debug, Clone, PartialEq)]
pub struct FilterSpec {
    degree: usize,
    weights: WeightVector,
    position: usize,
}

impl FilterSpec {
    /// A filter evaluated at `position` (0-based) within the window.
    pub fn new(degree: usize, weights: WeightVector, position: usize) -> Result<Self> {
        let q = weights.q();
        if position >= q {
            return Err(invalid(format!(
                "evaluation position {position} outside a window of {q} samples"
            )));
        }
        let spec = Self {
            degree,
            weights,
            position,
        };
        let rows = spec.independent_rows();
        let columns = spec.n();
        if columns > rows {
            return Err(Error::OverParameterized { columns, rows });
        }
        Ok(spec)
    }

    /// A linear-phase filter evaluated at the center of an odd window.
    pub fn centered(degree: usize, weights: WeightVector) -> Result<Self> {
        let q = weights.q();
        if q.is_multiple_of(2) {
            return Err(invalid(format!(
                "centered filters need an odd window length, got {q}"
            )));
        }
        Self::new(degree, weights, (q - 1) / 2)
    }

    /// Centered filter with generated weights of the given kind.
    pub fn centered_with(q: usize, degree: usize, kind: WeightKind) -> Result<Self> {
        Self::centered(degree, kind.generate(q)?)
    }

    pub fn q(&self) -> usize {
        self.weights.q()
    }

    /// Degree as requested.
    pub fn degree(&self) -> usize {
        self.degree
    }

    /// Degree of the highest power actually used by the basis.
    pub fn canonical_degree(&self) -> usize {
        if self.is_centered() {
            self.degree - self.degree % 2
        } else {
            self.degree
        }
    }

    pub fn weights(&self) -> &WeightVector {
        &self.weights
    }

    pub fn position(&self) -> usize {
        self.position
    }

    /// 0-based center index `(q - 1) / 2` for odd windows.
    pub fn center(&self) -> Option<usize> {
        let q = self.q();
        (q % 2 == 1).then_some((q - 1) / 2)
    }

    pub fn is_centered(&self) -> bool {
        self.center() == Some(self.position)
    }

    /// Number of basis columns.
    pub fn n(&self) -> usize {
        if self.is_centered() {
            self.degree / 2 + 1
        } else {
            self.degree + 1
        }
    }

    /// Exponents of the basis columns: even powers when centered, all powers
    /// up to the degree otherwise.
    pub fn powers(&self) -> Vec<u32> {
        let step = if self.is_centered() { 2 } else { 1 };
        (0..self.n()).map(|k| (k * step) as u32).collect()
    }

    // Even powers on a symmetric grid only see |x|, of which there are m
    // distinct values.
    fn independent_rows(&self) -> usize {
        if self.is_centered() {
            self.position + 1
        } else {
            self.q()
        }
    }

    /// Same degree and position with a different weight vector of equal length.
    pub fn with_weights(&self, weights: WeightVector) -> Result<Self> {
        if weights.q() != self.q() {
            return Err(invalid("replacement weights must keep the window length"));
        }
        Ok(Self {
            weights,
            ..self.clone()
        })
    }
}

/// Filter taps together with the spec that produced them.
#[derive(Debug, Clone, PartialEq)]
pub struct FilterCoefficients {
    taps: Vec<f64>,
    spec: FilterSpec,
}

impl FilterCoefficients {
    pub fn taps(&self) -> &[f64] {
        &self.taps
    }

    pub fn spec(&self) -> &FilterSpec {
        &self.spec
    }

    pub fn q(&self) -> usize {
        self.taps.len()
    }

    pub fn into_taps(self) -> Vec<f64> {
        self.taps
    }

    /// Pair externally supplied taps with a spec, e.g. after reading them back
    /// from a coefficient file.
    pub fn from_parts(taps: Vec<f64>, spec: FilterSpec) -> Result<Self> {
        if taps.len() != spec.q() {
            return Err(invalid(format!(
                "{} taps for a window of {} samples",
                taps.len(),
                spec.q()
            )));
        }
        if let Some(i) = taps.iter().position(|t| !t.is_finite()) {
            return Err(Error::NonFinite { index: i });
        }
        Ok(Self { taps, spec })
    }
}

impl AsRef<[f64]> for FilterCoefficients {
    fn as_ref(&self) -> &[f64] {
        &self.taps
    }
}

/// A `q x n` basis over the window abscissas.
///
/// Either raw power columns `x^p` or the same span orthonormalized under the
/// weighted inner product `⟨a, b⟩ = aᵀ W b`.
#[derive(Debug, Clone, PartialEq)]
pub struct BasisMatrix {
    abscissas: Vec<f64>,
    powers: Vec<u32>,
    columns: DMatrix<f64>,
    orthonormal: bool,
    eigenvalues: Option<Vec<f64>>,
}

impl BasisMatrix {
    pub fn abscissas(&self) -> &[f64] {
        &self.abscissas
    }

    pub fn powers(&self) -> &[u32] {
        &self.powers
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.columns
    }

    pub fn is_orthonormal(&self) -> bool {
        self.orthonormal
    }

    /// Diagonal of `Λ` when the columns are known eigenvectors of `T W`.
    pub fn eigenvalues(&self) -> Option<&[f64]> {
        self.eigenvalues.as_deref()
    }

    pub(crate) fn from_columns(
        abscissas: Vec<f64>,
        powers: Vec<u32>,
        columns: DMatrix<f64>,
        orthonormal: bool,
    ) -> Self {
        Self {
            abscissas,
            powers,
            columns,
            orthonormal,
            eigenvalues: None,
        }
    }

    pub(crate) fn set_eigenvalues(&mut self, values: Vec<f64>) {
        self.eigenvalues = Some(values);
    }

    pub fn nrows(&self) -> usize {
        self.columns.nrows()
    }

    pub fn ncols(&self) -> usize {
        self.columns.ncols()
    }
}

/// Power columns over the integer grid `x_i = i - position`, so that the
/// evaluation point sits at `x = 0`.
pub fn build_vandermonde(spec: &FilterSpec) -> BasisMatrix {
    build_vandermonde_with_spacing(spec, 1.0)
}

/// Like [`build_vandermonde`] with abscissas `spacing * (i - position)`.
///
/// The designed taps do not depend on the spacing.
pub fn build_vandermonde_with_spacing(spec: &FilterSpec, spacing: f64) -> BasisMatrix {
    let q = spec.q();
    let abscissas: Vec<f64> = (0..q)
        .map(|i| spacing * (i as f64 - spec.position() as f64))
        .collect();
    let powers = spec.powers();
    let columns = DMatrix::from_fn(q, powers.len(), |i, k| abscissas[i].powi(powers[k] as i32));
    BasisMatrix {
        abscissas,
        powers,
        columns,
        orthonormal: false,
        eigenvalues: None,
    }
}

// Rescaled so the farthest abscissa is at distance one; keeps the power
// columns within [-1, 1].
fn unit_scaled_vandermonde(spec: &FilterSpec) -> BasisMatrix {
    let reach = spec.position().max(spec.q() - 1 - spec.position()).max(1);
    build_vandermonde_with_spacing(spec, 1.0 / reach as f64)
}

// The taps are invariant to a common weight scale; dividing by the largest
// weight makes that invariance hold to rounding.
fn normalized_weights(weights: &WeightVector) -> Vec<f64> {
    let top = weights.values().iter().fold(0.0f64, |a, &b| a.max(b));
    weights.values().iter().map(|w| w / top).collect()
}

fn selector_row(basis: &DMatrix<f64>, position: usize) -> DVector<f64> {
    basis.row(position).transpose()
}

fn identity_taps(spec: &FilterSpec) -> FilterCoefficients {
    FilterCoefficients {
        taps: vec![1.0],
        spec: spec.clone(),
    }
}

/// Taps minimizing the weighted residual sum `ρᵀ W ρ` of the local fit,
/// solved through the normal equations `(Xᵀ W X) z = Xᵀ u`, `c = W X z`.
pub fn design_coefficients(spec: &FilterSpec) -> Result<FilterCoefficients> {
    if spec.q() == 1 {
        return Ok(identity_taps(spec));
    }
    let basis = unit_scaled_vandermonde(spec);
    let x = basis.matrix();
    let w = normalized_weights(spec.weights());

    let wx = DMatrix::from_fn(x.nrows(), x.ncols(), |i, k| w[i] * x[(i, k)]);
    let normal = x.transpose() * &wx;
    // Jacobi equilibration: solve (D G D) y = D b, z = D y with D = diag(G)^-1/2
    let equilibrate: DVector<f64> = normal.diagonal().map(|g| 1.0 / g.sqrt());
    let scaled = DMatrix::from_fn(normal.nrows(), normal.ncols(), |i, k| {
        equilibrate[i] * normal[(i, k)] * equilibrate[k]
    });
    let rhs = selector_row(x, spec.position()).component_mul(&equilibrate);
    let chol = scaled.cholesky().ok_or_else(|| {
        Error::DesignFailure("normal matrix XᵀWX is not positive definite".into())
    })?;
    let z = chol.solve(&rhs).component_mul(&equilibrate);
    let taps = (&wx * z).as_slice().to_vec();
    Ok(FilterCoefficients {
        taps,
        spec: spec.clone(),
    })
}

/// Orthonormalize the columns of `columns` under `⟨a, b⟩ = Σ w_i a_i b_i`.
///
/// Modified Gram-Schmidt, run twice. Fails when a column is (numerically) in
/// the span of the previous ones.
pub fn weighted_gram_schmidt(columns: &DMatrix<f64>, weights: &[f64]) -> Result<DMatrix<f64>> {
    assert_eq!(columns.nrows(), weights.len());
    let inner = |a: &[f64], b: &[f64]| -> f64 {
        a.iter()
            .zip(b)
            .zip(weights)
            .map(|((x, y), w)| x * y * w)
            .sum()
    };

    let mut basis = columns.clone();
    let q = basis.nrows();
    for k in 0..basis.ncols() {
        let original_norm = inner(basis.column(k).as_slice(), basis.column(k).as_slice()).sqrt();
        for _pass in 0..2 {
            for prev in 0..k {
                let proj = inner(basis.column(prev).as_slice(), basis.column(k).as_slice());
                for i in 0..q {
                    let v = basis[(i, prev)];
                    basis[(i, k)] -= proj * v;
                }
            }
        }
        let norm = inner(basis.column(k).as_slice(), basis.column(k).as_slice()).sqrt();
        if norm.is_nan() || norm <= 1e-12 * original_norm {
            return Err(Error::DesignFailure(format!(
                "basis column {k} is linearly dependent on earlier columns"
            )));
        }
        basis.column_mut(k).unscale_mut(norm);
    }
    Ok(basis)
}

/// The basis of `spec` orthonormalized under its weight matrix, so that
/// `Aᵀ W A = I`. Column `k` is a polynomial of degree `powers[k]`.
pub fn orthonormal_basis(spec: &FilterSpec) -> Result<BasisMatrix> {
    let mut basis = unit_scaled_vandermonde(spec);
    basis.columns = weighted_gram_schmidt(&basis.columns, spec.weights().values())?;
    basis.orthonormal = true;
    Ok(basis)
}

/// `c = W A Aᵀ u` with `A` from [`orthonormal_basis`].
pub fn design_via_orthonormal_basis(spec: &FilterSpec) -> Result<FilterCoefficients> {
    if spec.q() == 1 {
        return Ok(identity_taps(spec));
    }
    let basis = orthonormal_basis(spec)?;
    let a = basis.matrix();
    let projected = a * selector_row(a, spec.position());
    let w = spec.weights().values();
    let taps = projected.iter().zip(w).map(|(p, w)| p * w).collect();
    Ok(FilterCoefficients {
        taps,
        spec: spec.clone(),
    })
}

/// Degree-0 taps under quadratic weights, `c_i = 6 i (q + 1 - i) / (q (q + 1) (q + 2))`
/// for `i = 1..=q`. These are the quadratic weights rescaled to unit sum.
pub fn quadratic_weight_constant_fit(q: usize) -> Result<FilterCoefficients> {
    let spec = FilterSpec::centered(0, quadratic_weights(q)?)?;
    let qf = q as f64;
    let denom = qf * (qf + 1.0) * (qf + 2.0);
    let taps = (1..=q)
        .map(|i| {
            let i = i as f64;
            6.0 * i * (qf + 1.0 - i) / denom
        })
        .collect();
    Ok(FilterCoefficients { taps, spec })
}

/// Derivative of every tap with respect to the diagonal weight `W_kk`
/// (0-based `k`):
///
/// ```text
/// dc/dW_kk = (I - W A Aᵀ) E_k A Aᵀ u
/// ```
///
/// with `E_k` the selector of diagonal element `k` and `A` the `W`-orthonormal
/// basis. Equivalent to differentiating the normal-equation form.
pub fn coefficient_weight_derivative(spec: &FilterSpec, k: usize) -> Result<Vec<f64>> {
    let q = spec.q();
    if k >= q {
        return Err(invalid(format!(
            "weight index {k} outside a window of {q} samples"
        )));
    }
    if q == 1 {
        return Ok(vec![0.0]);
    }
    let basis = orthonormal_basis(spec)?;
    let a = basis.matrix();
    let projected = a * selector_row(a, spec.position());
    let g_k = projected[k];
    // (I - W A Aᵀ) e_k = e_k - W A (row k of A)ᵀ
    let through_basis = a * selector_row(a, k);
    let w = spec.weights().values();
    let derivative = (0..q)
        .map(|i| {
            let identity = if i == k { 1.0 } else { 0.0 };
            g_k * (identity - w[i] * through_basis[i])
        })
        .collect();
    Ok(derivative)
}
