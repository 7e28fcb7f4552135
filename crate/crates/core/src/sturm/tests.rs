use super::*;
use crate::corpus;
use crate::discretize::{galerkin_matrix, Grid, Mask};
use crate::symbols::Interval;
use proptest::prelude::*;

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

#[test]
fn angle_for_linear_symbol_is_omega() {
    for w in [0.3, 2.0, 17.5, 140.0] {
        let r = prufer_theta(&corpus::one_minus_x(), w).unwrap();
        assert!(rel(r.theta_end, w) < 1e-11, "{w}: {}", r.theta_end);
    }
}

#[test]
fn angle_for_zero_symbol_is_arctan() {
    let z = Symbol::poly_on(0.0, 1.0, &[0.0]).unwrap();
    for w in [0.5, 3.0, 50.0] {
        let r = prufer_theta(&z, w).unwrap();
        assert!((r.theta_end - w.atan()).abs() < 1e-10);
        assert!(r.theta_end < std::f64::consts::FRAC_PI_2);
    }
}

#[test]
fn angle_increases_with_omega() {
    let s = corpus::one_minus_x_squared();
    assert!(prufer_theta(&s, 1.0).unwrap().theta_end < prufer_theta(&s, 2.0).unwrap().theta_end);
}

#[test]
fn one_minus_x_eigenvalues() {
    let e = eigenvalues(&corpus::one_minus_x(), 3).unwrap();
    assert!(rel(e[0].lambda, 0.4052847) < 1e-7);
    assert!(rel(e[2].lambda, 0.0162114) < 1e-5);
    for r in &e {
        assert!(rel(r.lambda, corpus::one_minus_x_eigenvalue(r.n)) < 1e-12);
        assert!(rel(r.omega, std::f64::consts::PI * (r.n as f64 + 0.5)) < 1e-12);
        assert!(r.residual < 1e-7);
    }
}

#[test]
fn eigenvalues_decrease_and_stay_below_trace() {
    for (name, s) in corpus::monotone_trio() {
        let e = eigenvalues(&s, 40).unwrap();
        assert!(e.windows(2).all(|w| w[0].lambda > w[1].lambda && w[1].lambda > 0.0), "{name}");
        let sum: f64 = e.iter().map(|r| r.lambda).sum();
        assert!(sum <= s.integral(0.0, 1.0).re, "{name}");
    }
}

/// Richardson combination of two Galerkin levels (error ∝ h²).
fn galerkin_extrapolated(s: &Symbol, n: usize, k: usize) -> Vec<f64> {
    let a = galerkin_matrix(s, Interval::unit(), n, &Grid::Uniform, Mask::Full).unwrap().singular_values(k);
    let b = galerkin_matrix(s, Interval::unit(), 2 * n, &Grid::Uniform, Mask::Full).unwrap().singular_values(k);
    a.iter().zip(&b).map(|(x, y)| (4.0 * y - x) / 3.0).collect()
}

#[test]
fn squared_symbol_matches_galerkin() {
    let s = corpus::one_minus_x_squared();
    let e = eigenvalues(&s, 11).unwrap();
    let g = galerkin_extrapolated(&s, 2048, 11);
    for (r, v) in e.iter().zip(&g) {
        assert!(rel(r.lambda, *v) < 1e-6, "n = {}: {} vs {v}", r.n, r.lambda);
    }
}

#[test]
fn monotone_trio_agrees_with_plain_galerkin() {
    for (name, s) in corpus::monotone_trio() {
        let e = eigenvalues(&s, 11).unwrap();
        let g = galerkin_matrix(&s, Interval::unit(), 4096, &Grid::Uniform, Mask::Full).unwrap().singular_values(11);
        for (r, v) in e.iter().zip(&g) {
            assert!(rel(r.lambda, *v) < 1e-4, "{name} n = {}", r.n);
        }
    }
}

#[test]
fn asymptotic_constant_examples() {
    let pi2 = std::f64::consts::PI.powi(2);
    assert!(rel(asymptotic_constant(&corpus::one_minus_x()).unwrap(), 1.0 / pi2) < 1e-14);
    assert_eq!(asymptotic_constant(&corpus::volterra()).unwrap(), 0.0);
    assert!(rel(asymptotic_constant(&corpus::one_minus_x_squared()).unwrap(), 8.0 / (9.0 * pi2)) < 1e-9);
}

#[test]
fn sl_residual_examples() {
    let s = corpus::one_minus_x();
    let w0 = std::f64::consts::FRAC_PI_2;
    let t = shooting_trajectory(&s, w0, 400).unwrap();
    for (x, g) in t.x.iter().zip(&t.big_g) {
        assert!((g - (w0 * x).sin() / w0).abs() < 1e-8);
    }
    assert!(sl_residual(&s, 1.0 / (w0 * w0), &t).unwrap() < 1e-4);
    // away from an eigenvalue the ODE still holds; only the boundary fails
    let t = shooting_trajectory(&s, 2.3, 400).unwrap();
    assert!(sl_residual(&s, 1.0 / (2.3 * 2.3), &t).unwrap() < 1e-4);
    let zero = Trajectory { x: vec![0.0, 0.5, 1.0], big_g: vec![0.0; 3], g: vec![0.0; 3], j: vec![0.0; 3] };
    assert!(sl_residual(&s, 1.0, &zero).is_err());
}

#[test]
fn rejects_unsuitable_symbols() {
    assert!(matches!(prufer_theta(&corpus::volterra(), 1.0), Err(Error::NotSmoothEnough(_))));
    let up = Symbol::poly_on(0.0, 1.0, &[0.0, 1.0]).unwrap();
    assert!(matches!(prufer_theta(&up, 1.0), Err(Error::PositiveDerivative(_))));
    let wide = Symbol::poly_on(0.0, 2.0, &[2.0, -1.0]).unwrap();
    assert!(prufer_theta(&wide, 1.0).is_err());
    let lifted = Symbol::poly_on(0.0, 1.0, &[2.0, -1.0]).unwrap();
    assert!(matches!(eigenvalues(&lifted, 3), Err(Error::NonzeroEndpoint(_))));
    assert!(prufer_theta(&corpus::cosine(false), 1.0).is_err());
}

#[test]
fn inverse_square_tail_matches_direct_sum() {
    let direct: f64 = (200..2_000_000).map(|n| (n as f64 + 0.5).powi(-2)).sum::<f64>() + 1.0 / 2_000_000.0;
    assert!(rel(inverse_square_tail(200), direct) < 1e-9);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn angle_monotone_in_omega(a in 0.1f64..1000.0, b in 0.1f64..1000.0, which in 0usize..3) {
        let s = &corpus::monotone_trio()[which].1;
        let (lo, hi) = (a.min(b), a.max(b));
        prop_assume!(hi - lo > 1e-6);
        prop_assert!(prufer_theta(s, lo).unwrap().theta_end < prufer_theta(s, hi).unwrap().theta_end);
    }
}
