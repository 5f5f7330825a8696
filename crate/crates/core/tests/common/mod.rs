//! Independent reference computations shared by the integration tests.
//!
//! Nothing here goes through the library's design routines except where a
//! finite-difference oracle needs to evaluate `s` at perturbed weights.

#![allow(dead_code, clippy::needless_range_loop)]

use weighted_savgol::verify::smoothness_at;
use weighted_savgol::WeightVector;

/// Gaussian elimination with partial pivoting on a dense row-major system.
pub fn gauss_solve(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Vec<f64> {
    let n = b.len();
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))
            .unwrap();
        a.swap(col, pivot);
        b.swap(col, pivot);
        for row in col + 1..n {
            let f = a[row][col] / a[col][col];
            for k in col..n {
                a[row][k] -= f * a[col][k];
            }
            b[row] -= f * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for row in (0..n).rev() {
        let tail: f64 = (row + 1..n).map(|k| a[row][k] * x[k]).sum();
        x[row] = (b[row] - tail) / a[row][row];
    }
    x
}

/// Taps from the normal equations on the integer grid `i - position`, all
/// powers `0..=degree`: `c_i = w_i Σ_k x_i^k β_k` with `(XᵀWX) β = e_0`.
pub fn brute_force_taps(degree: usize, weights: &[f64], position: usize) -> Vec<f64> {
    let q = weights.len();
    let p = degree + 1;
    let x: Vec<f64> = (0..q).map(|i| i as f64 - position as f64).collect();
    let gram: Vec<Vec<f64>> = (0..p)
        .map(|j| {
            (0..p)
                .map(|k| (0..q).map(|i| weights[i] * x[i].powi((j + k) as i32)).sum())
                .collect()
        })
        .collect();
    let mut rhs = vec![0.0; p];
    rhs[0] = 1.0;
    let beta = gauss_solve(gram, rhs);
    (0..q)
        .map(|i| weights[i] * (0..p).map(|k| beta[k] * x[i].powi(k as i32)).sum::<f64>())
        .collect()
}

pub fn quadratic_weight_oracle(q: usize) -> Vec<f64> {
    (1..=q).map(|i| (i * (q + 1 - i)) as f64 / 2.0).collect()
}

pub fn r_oracle(c: &[f64]) -> f64 {
    c.iter().map(|v| v * v).sum()
}

/// Half the sum of squared differences of the zero-padded taps.
pub fn s_oracle(c: &[f64]) -> f64 {
    let mut padded = vec![0.0];
    padded.extend_from_slice(c);
    padded.push(0.0);
    padded
        .windows(2)
        .map(|w| (w[1] - w[0]).powi(2))
        .sum::<f64>()
        / 2.0
}

/// `(r0, s0, r2, s2)` of the degree-0 constant and quadratic filters.
pub fn closed_form_oracle(q: usize) -> (f64, f64, f64, f64) {
    let q = q as f64;
    let r0 = 1.0 / q;
    let s0 = 1.0 / (q * q);
    let r2 = 1.2 * ((q + 1.0).powi(2) + 1.0) / (q * (q + 1.0) * (q + 2.0));
    let s2 = 6.0 / (q * (q + 1.0) * (q + 2.0));
    (r0, s0, r2, s2)
}

/// Central-difference gradient of `s` in the weights, step `h = rel · w_k`.
pub fn fd_gradient(n: usize, weights: &[f64], rel: f64) -> Vec<f64> {
    let s = |w: Vec<f64>| smoothness_at(n, &WeightVector::custom(w).unwrap()).unwrap();
    (0..weights.len())
        .map(|k| {
            let h = rel * weights[k];
            let mut plus = weights.to_vec();
            let mut minus = weights.to_vec();
            plus[k] += h;
            minus[k] -= h;
            (s(plus) - s(minus)) / (2.0 * h)
        })
        .collect()
}

/// Second-order central-difference Hessian of `s` in the weights, step
/// `h_k = rel · w_k`.
pub fn fd_hessian(n: usize, weights: &[f64], rel: f64) -> Vec<Vec<f64>> {
    let q = weights.len();
    let s = |w: &[f64]| smoothness_at(n, &WeightVector::custom(w.to_vec()).unwrap()).unwrap();
    let h: Vec<f64> = weights.iter().map(|w| rel * w).collect();
    let shifted = |di: (usize, f64), dj: (usize, f64)| {
        let mut w = weights.to_vec();
        w[di.0] += di.1 * h[di.0];
        w[dj.0] += dj.1 * h[dj.0];
        s(&w)
    };
    let mut out = vec![vec![0.0; q]; q];
    for i in 0..q {
        for j in i..q {
            let v = (shifted((i, 1.0), (j, 1.0))
                - shifted((i, 1.0), (j, -1.0))
                - shifted((i, -1.0), (j, 1.0))
                + shifted((i, -1.0), (j, -1.0)))
                / (4.0 * h[i] * h[j]);
            out[i][j] = v;
            out[j][i] = v;
        }
    }
    out
}

pub fn rel_err(got: f64, want: f64) -> f64 {
    ((got - want) / want).abs()
}
