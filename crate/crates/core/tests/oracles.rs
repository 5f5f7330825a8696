mod common;

use common::*;
use weighted_savgol::verify::{hessian, smoothness_gradient};
use weighted_savgol::{
    design_coefficients, design_via_orthonormal_basis, smooth, triangular_weights, EdgePolicy,
    FilterSpec, SignalSeries, WeightKind, WeightVector,
};

#[test]
fn taps_match_brute_force_normal_equations() {
    for q in [3usize, 5, 7, 9, 11, 15] {
        for degree in 0..q.min(5) {
            for kind in WeightKind::GENERATED {
                let w = kind.generate(q).unwrap();
                for position in 0..q {
                    let spec = FilterSpec::new(degree, w.clone(), position).unwrap();
                    let got = design_coefficients(&spec).unwrap();
                    let want = brute_force_taps(degree, w.values(), position);
                    for (g, b) in got.taps().iter().zip(&want) {
                        assert!((g - b).abs() < 1e-9, "q={q} d={degree} {kind} j={position}");
                    }
                }
            }
        }
    }
}

#[test]
fn orthonormal_route_matches_brute_force_for_custom_weights() {
    let w = WeightVector::custom(vec![0.5, 2.0, 1.0, 3.0, 1.5, 0.25, 4.0]).unwrap();
    let spec = FilterSpec::new(3, w.clone(), 2).unwrap();
    let got = design_via_orthonormal_basis(&spec).unwrap();
    let want = brute_force_taps(3, w.values(), 2);
    for (g, b) in got.taps().iter().zip(&want) {
        assert!((g - b).abs() < 1e-10);
    }
}

#[test]
fn metrics_match_definitions() {
    for q in [5usize, 9, 21] {
        let c =
            design_coefficients(&FilterSpec::centered_with(q, 2, WeightKind::Triangular).unwrap())
                .unwrap();
        assert!(
            rel_err(
                weighted_savgol::error_reduction_ratio(&c),
                r_oracle(c.taps())
            ) < 1e-13
        );
        assert!(rel_err(weighted_savgol::smoothing_parameter(&c), s_oracle(c.taps())) < 1e-12);
    }
}

#[test]
fn analytic_gradient_matches_finite_differences_off_optimum() {
    // away from the optimum the gradient is far from zero, so this exercises
    // the formula rather than just its vanishing
    for (q, n) in [(7usize, 1usize), (9, 2), (11, 3)] {
        let w = triangular_weights(q).unwrap();
        let analytic = smoothness_gradient(q, n, &w).unwrap();
        let numeric = fd_gradient(n, w.values(), 1e-5);
        let scale = numeric.iter().fold(0.0f64, |a, b| a.max(b.abs()));
        assert!(scale > 1e-4);
        for (a, b) in analytic.iter().zip(&numeric) {
            assert!((a - b).abs() <= 1e-6 * scale, "q={q} n={n}: {a} vs {b}");
        }
    }
}

#[test]
fn gradient_vanishes_at_quadratic_weights_by_finite_differences() {
    for (q, n) in [(5usize, 1usize), (9, 2), (13, 3)] {
        let w = weighted_savgol::quadratic_weights(q).unwrap();
        let numeric = fd_gradient(n, w.values(), 1e-5);
        assert!(
            numeric.iter().all(|g| g.abs() < 1e-8),
            "q={q} n={n}: {numeric:?}"
        );
    }
}

#[test]
fn hessian_matches_finite_differences() {
    for (q, n) in [(5usize, 1usize), (7, 2), (9, 3)] {
        let w = weighted_savgol::quadratic_weights(q).unwrap();
        let analytic = hessian(q, n).unwrap();
        let numeric = fd_hessian(n, w.values(), 1e-4);
        let (mut diff, mut norm) = (0.0, 0.0);
        for i in 0..q {
            for j in 0..q {
                diff += (analytic[(i, j)] - numeric[i][j]).powi(2);
                norm += analytic[(i, j)].powi(2);
            }
        }
        assert!(diff.sqrt() <= 1e-4 * norm.sqrt(), "q={q} n={n}");
    }
}

#[test]
fn interior_smoothing_is_a_sliding_dot_product() {
    let c = design_coefficients(&FilterSpec::centered_with(7, 2, WeightKind::Quadratic).unwrap())
        .unwrap();
    let x: Vec<f64> = (0..40)
        .map(|i| (i as f64 * 0.37).sin() + 0.01 * (i * i) as f64)
        .collect();
    let out = smooth(
        &SignalSeries::new(x.clone()).unwrap(),
        &c,
        EdgePolicy::Polyfit,
    )
    .unwrap();
    for i in 3..37 {
        let want: f64 = (0..7).map(|k| c.taps()[k] * x[i - 3 + k]).sum();
        assert!((out.values()[i] - want).abs() < 1e-12);
    }
}
