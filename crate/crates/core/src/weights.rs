//! Residual weight vectors and the second-difference operator that defines
//! smoothness-optimal weighting.
//!
//! Three weight families are provided:
//!
//! * [`constant_weights`]: the classic Savitzky-Golay choice, every residual
//!   counts equally.
//! * [`triangular_weights`]: a tent peaking at the window center.
//! * [`quadratic_weights`]: the parabola `w_i = i (q + 1 - i) / 2`, which is
//!   the weighting that minimizes the smoothing parameter `s`.
//!
//! The quadratic weights are also the solution of `T w = 1` where `T` is the
//! tridiagonal second-difference matrix; [`weights_by_tridiagonal_solve`]
//! computes them that way so the closed form can be checked against an
//! independent route.

use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;

use crate::error::{invalid, Error, Result};

/// Which family a [`WeightVector`] belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum WeightKind {
    Constant,
    Triangular,
    Quadratic,
    Custom,
}

impl WeightKind {
    /// The three generated families, in the order reports list them.
    pub const GENERATED: [WeightKind; 3] = [
        WeightKind::Constant,
        WeightKind::Triangular,
        WeightKind::Quadratic,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            WeightKind::Constant => "constant",
            WeightKind::Triangular => "triangular",
            WeightKind::Quadratic => "quadratic",
            WeightKind::Custom => "custom",
        }
    }

    /// Generate the weights of this family for a window of `q` samples.
    ///
    /// `Custom` has no generator and is rejected.
    pub fn generate(self, q: usize) -> Result<WeightVector> {
        match self {
            WeightKind::Constant => constant_weights(q),
            WeightKind::Triangular => triangular_weights(q),
            WeightKind::Quadratic => quadratic_weights(q),
            WeightKind::Custom => Err(invalid("custom weights must be supplied explicitly")),
        }
    }
}

impl fmt::Display for WeightKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for WeightKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "constant" => Ok(WeightKind::Constant),
            "triangular" => Ok(WeightKind::Triangular),
            "quadratic" => Ok(WeightKind::Quadratic),
            "custom" => Ok(WeightKind::Custom),
            other => Err(invalid(format!("unknown weight kind `{other}`"))),
        }
    }
}

/// Diagonal of the residual weight matrix `W`, one strictly positive entry per
/// window sample.
///
/// Values are stored unnormalized; filter design is invariant to a common
/// positive scale factor.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightVector {
    kind: WeightKind,
    values: Vec<f64>,
}

impl WeightVector {
    /// Wrap an arbitrary strictly positive, finite weight vector.
    pub fn custom(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(invalid("weight vector must not be empty"));
        }
        if let Some((i, w)) = values
            .iter()
            .enumerate()
            .find(|(_, w)| !w.is_finite() || **w <= 0.0)
        {
            return Err(invalid(format!(
                "weight {} is {w}; weights must be finite and strictly positive",
                i + 1
            )));
        }
        Ok(Self {
            kind: WeightKind::Custom,
            values,
        })
    }

    pub fn kind(&self) -> WeightKind {
        self.kind
    }

    /// Window length.
    pub fn q(&self) -> usize {
        self.values.len()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    /// Multiply every weight by `factor`. The result is tagged `Custom`.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        Self::custom(self.values.iter().map(|w| w * factor).collect())
    }

    /// Dense diagonal matrix `W`.
    pub fn to_diagonal(&self) -> DMatrix<f64> {
        DMatrix::from_diagonal(&nalgebra::DVector::from_column_slice(&self.values))
    }
}

fn check_window(q: usize) -> Result<()> {
    if q < 1 {
        return Err(invalid("window length must be at least 1"));
    }
    Ok(())
}

/// Equal weights, `w_i = 1`.
pub fn constant_weights(q: usize) -> Result<WeightVector> {
    check_window(q)?;
    Ok(WeightVector {
        kind: WeightKind::Constant,
        values: vec![1.0; q],
    })
}

/// Tent weights `w_i = 1 - |1 - 2i/(q+1)|` for `i = 1..=q`.
pub fn triangular_weights(q: usize) -> Result<WeightVector> {
    check_window(q)?;
    let denom = (q + 1) as f64;
    let mut values: Vec<f64> = (1..=q)
        .map(|i| 1.0 - (1.0 - 2.0 * i as f64 / denom).abs())
        .collect();
    mirror_upper_half(&mut values);
    Ok(WeightVector {
        kind: WeightKind::Triangular,
        values,
    })
}

/// Smoothness-optimal weights `w_i = -(i/2)(i - q - 1)` for `i = 1..=q`.
///
/// Extended with `w_0 = w_{q+1} = 0` these are a parabola whose negated second
/// difference is one everywhere.
pub fn quadratic_weights(q: usize) -> Result<WeightVector> {
    check_window(q)?;
    let values = (1..=q)
        .map(|i| {
            let i = i as f64;
            -(i / 2.0) * (i - q as f64 - 1.0)
        })
        .collect();
    Ok(WeightVector {
        kind: WeightKind::Quadratic,
        values,
    })
}

/// Solve `T w = 1` for the second-difference matrix `T` of size `q`.
///
/// The result equals [`quadratic_weights`] up to rounding and is tagged
/// `Quadratic`.
pub fn weights_by_tridiagonal_solve(q: usize) -> Result<WeightVector> {
    check_window(q)?;
    let t = SecondDifferenceMatrix::new(q)?;
    let values = t.solve(&t.ones())?;
    Ok(WeightVector {
        kind: WeightKind::Quadratic,
        values,
    })
}

// Force exact symmetry; the two halves of the tent are computed from
// different rounding paths.
fn mirror_upper_half(values: &mut [f64]) {
    let q = values.len();
    for i in 0..q / 2 {
        values[q - 1 - i] = values[i];
    }
}

/// The `q x q` tridiagonal matrix with 2 on the diagonal and -1 on both
/// off-diagonals.
///
/// `-T x` is the second difference of `x` padded with a zero on each side.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SecondDifferenceMatrix {
    q: usize,
}

impl SecondDifferenceMatrix {
    pub fn new(q: usize) -> Result<Self> {
        check_window(q)?;
        Ok(Self { q })
    }

    pub fn q(&self) -> usize {
        self.q
    }

    /// The all-ones vector `v` of length `q`.
    pub fn ones(&self) -> Vec<f64> {
        vec![1.0; self.q]
    }

    /// `T x` without forming the matrix.
    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.q, "vector length must equal matrix order");
        let q = self.q;
        (0..q)
            .map(|i| {
                let left = if i > 0 { x[i - 1] } else { 0.0 };
                let right = if i + 1 < q { x[i + 1] } else { 0.0 };
                2.0 * x[i] - left - right
            })
            .collect()
    }

    /// `x^T T x`.
    pub fn quadratic_form(&self, x: &[f64]) -> f64 {
        self.apply(x).iter().zip(x).map(|(a, b)| a * b).sum()
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let q = self.q;
        DMatrix::from_fn(q, q, |i, j| match i.abs_diff(j) {
            0 => 2.0,
            1 => -1.0,
            _ => 0.0,
        })
    }

    /// Solve `T x = rhs` by tridiagonal forward elimination and back substitution.
    pub fn solve(&self, rhs: &[f64]) -> Result<Vec<f64>> {
        let q = self.q;
        solve_tridiagonal(&vec![-1.0; q - 1], &vec![2.0; q], &vec![-1.0; q - 1], rhs)
    }
}

/// Thomas algorithm for a general tridiagonal system.
///
/// `lower[i]` couples row `i + 1` to column `i`; `upper[i]` couples row `i` to
/// column `i + 1`. Fails on a zero pivot; no pivoting is performed.
pub fn solve_tridiagonal(
    lower: &[f64],
    diag: &[f64],
    upper: &[f64],
    rhs: &[f64],
) -> Result<Vec<f64>> {
    let n = diag.len();
    if n == 0 || rhs.len() != n || lower.len() + 1 != n || upper.len() + 1 != n {
        return Err(invalid("tridiagonal system has inconsistent dimensions"));
    }
    let mut c_prime = vec![0.0; n];
    let mut d_prime = vec![0.0; n];

    let mut pivot = diag[0];
    if pivot == 0.0 {
        return Err(Error::DesignFailure(
            "zero pivot in tridiagonal solve".into(),
        ));
    }
    if n > 1 {
        c_prime[0] = upper[0] / pivot;
    }
    d_prime[0] = rhs[0] / pivot;
    for i in 1..n {
        pivot = diag[i] - lower[i - 1] * c_prime[i - 1];
        if pivot == 0.0 {
            return Err(Error::DesignFailure(
                "zero pivot in tridiagonal solve".into(),
            ));
        }
        if i + 1 < n {
            c_prime[i] = upper[i] / pivot;
        }
        d_prime[i] = (rhs[i] - lower[i - 1] * d_prime[i - 1]) / pivot;
    }

    let mut x = d_prime;
    for i in (0..n - 1).rev() {
        x[i] -= c_prime[i] * x[i + 1];
    }
    Ok(x)
}
