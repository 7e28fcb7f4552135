use super::*;
use crate::corpus;
use crate::symbols::ModulusOrder;
use proptest::prelude::*;
use std::f64::consts::PI;

fn c(x: f64) -> C64 {
    C64::new(x, 0.0)
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

/// Dense oracle: entries by brute-force 2-D Gauss–Legendre over each cell pair.
fn brute_entry(s: &Symbol, e: &[f64], i: usize, j: usize, lower: bool) -> C64 {
    const G: [(f64, f64); 4] = [
        (-0.8611363115940526, 0.3478548451374538),
        (-0.3399810435848563, 0.6521451548625461),
        (0.3399810435848563, 0.6521451548625461),
        (0.8611363115940526, 0.3478548451374538),
    ];
    let sub = 64;
    let (hi, hj) = (e[i + 1] - e[i], e[j + 1] - e[j]);
    let dx = hi / sub as f64;
    let mut acc = c(0.0);
    if lower && i < j {
        return acc;
    }
    for a in 0..sub {
        for b in 0..sub {
            if lower && i == j && b > a {
                continue;
            }
            if lower && i == j && a == b {
                // ∬_{y<x} φ(x) over the sub-square = ∫ φ(x)(x − x₀) dx
                let x0 = e[i] + dx * a as f64;
                for (tx, wx) in G {
                    let x = x0 + dx * 0.5 * (tx + 1.0);
                    acc += s.eval(x) * (x - x0) * (wx * 0.5 * dx) * ((sub * sub) as f64 / (hi * hj));
                }
                continue;
            }
            for (tx, wx) in G {
                for (ty, wy) in G {
                    let x = e[i] + hi * (a as f64 + 0.5 * (tx + 1.0)) / sub as f64;
                    let y = e[j] + hj * (b as f64 + 0.5 * (ty + 1.0)) / sub as f64;
                    acc += s.eval(x.max(y)) * (wx * wy / 4.0);
                }
            }
        }
    }
    acc * ((hi * hj).sqrt() / (sub * sub) as f64)
}

#[test]
fn two_cell_indicator() {
    let s = corpus::volterra();
    let m = galerkin_matrix(&s, Interval::unit(), 2, &Grid::Uniform, Mask::Full).unwrap();
    for i in 0..2 {
        for j in 0..2 {
            assert!((m.entry(i, j) - c(0.5)).norm() < 1e-15);
        }
    }
    let sv = m.singular_values(2);
    assert!(rel(sv[0], 1.0) < 1e-13);
    assert!(sv[1] < 1e-13);
}

#[test]
fn zero_symbol_zero_matrix() {
    let m = galerkin_matrix(&Symbol::zero(), Interval::unit(), 16, &Grid::Uniform, Mask::Full).unwrap();
    assert!(m.to_dense().iter().all(|z| *z == c(0.0)));
    assert_eq!(m.singular_values(3), vec![0.0; 3]);
}

#[test]
fn entries_match_brute_force_quadrature() {
    let iv = Interval::new(0.0, 2.0).unwrap();
    let e = iv_edges(iv, 6);
    for s in [corpus::tent(), corpus::cosine(true), Symbol::power_on(0.0, 2.0, 0.5, &[1.0, 0.3]).unwrap()] {
        for mask in [Mask::Full, Mask::Lower] {
            let m = galerkin_matrix(&s, iv, 6, &Grid::Uniform, mask).unwrap();
            for i in 0..6 {
                for j in 0..6 {
                    let want = brute_entry(&s, &e, i, j, mask == Mask::Lower);
                    assert!((m.entry(i, j) - want).norm() < 2e-6, "{} {mask:?} ({i},{j})", s.kind().name());
                }
            }
        }
    }
}

fn iv_edges(iv: Interval, n: usize) -> Vec<f64> {
    Grid::Uniform.edges(iv, n).unwrap()
}

#[test]
fn masks_split_the_full_matrix_for_steps() {
    let s = Symbol::step_real(&[0.3, 0.8, 1.0], &[2.0, -1.0, 0.5]).unwrap();
    let iv = Interval::unit();
    let edges = uniform_edges_with(iv, 8, &s.breakpoints());
    let full = galerkin_on_edges(&s, iv, edges.clone(), Mask::Full).unwrap().to_dense();
    let low = galerkin_on_edges(&s, iv, edges, Mask::Lower).unwrap().to_dense();
    let glued = &low + low.transpose();
    for i in 0..full.nrows() {
        for j in 0..full.ncols() {
            assert!((full[(i, j)] - glued[(i, j)]).norm() < 1e-14, "({i},{j})");
        }
    }
}

#[test]
fn structured_solver_matches_dense_svd() {
    let s = corpus::smooth_corpus().into_iter().find(|e| e.name == "exp(6pi i x)").unwrap().symbol;
    let m = galerkin_matrix(&s, Interval::unit(), 80, &Grid::Geometric, Mask::Lower).unwrap();
    let mut dense: Vec<f64> = m.to_dense().singular_values().iter().copied().collect();
    dense.sort_by(|a, b| b.total_cmp(a));
    let fast = m.singular_values(20);
    for (a, b) in fast.iter().zip(&dense) {
        assert!((a - b).abs() <= 1e-11 * dense[0], "{a} vs {b}");
    }
    let x: Vec<C64> = (0..80).map(|k| C64::new((k as f64).sin(), (k as f64 * 0.3).cos())).collect();
    let y = m.matvec(&x);
    let want = m.to_dense() * nalgebra::DVector::from_column_slice(&x);
    assert!(y.iter().zip(want.iter()).all(|(a, b)| (a - b).norm() < 1e-13));
}

#[test]
fn spectrum_of_one_minus_x() {
    let est = spectrum(&corpus::one_minus_x(), Interval::unit(), &SpectrumConfig::default()).unwrap();
    assert!(rel(est.svals[0], 4.0 / (PI * PI)) < 1e-4);
    assert!(rel(est.svals[5], 3.3498e-3) < 1e-3);
    for (n, v) in est.svals.iter().enumerate() {
        assert!(rel(*v, corpus::one_minus_x_eigenvalue(n)) < 2e-3, "n = {n}");
    }
    assert!(est.refinement_history.len() >= 2);
    assert_eq!(est.method, Method::Galerkin);
    for l in est.refinement_history.windows(2) {
        assert_eq!(l[1].n, 2 * l[0].n);
    }
}

#[test]
fn spectrum_reports_no_convergence() {
    let cfg = SpectrumConfig { tol: 1e-14, max_doublings: 1, ..SpectrumConfig::default() };
    assert!(matches!(spectrum(&corpus::one_minus_x(), Interval::unit(), &cfg), Err(Error::NoConvergence { .. })));
}

#[test]
fn indicator_is_rank_one() {
    let est = spectrum_at(&corpus::volterra(), Interval::unit(), 64, 4, &Grid::Uniform, Mask::Full).unwrap();
    assert!(rel(est.svals[0], 1.0) < 1e-13);
    assert!(est.svals[1..].iter().all(|v| *v < 1e-13));
}

#[test]
fn step_exact_examples() {
    let est = step_exact_spectrum(&corpus::volterra()).unwrap();
    assert_eq!(est.svals.len(), 1);
    assert!(rel(est.svals[0], 1.0) < 1e-15);
    let two = Symbol::step_real(&[1.0, 2.0], &[2.0, 1.0]).unwrap();
    let est = step_exact_spectrum(&two).unwrap();
    let r5 = 5f64.sqrt();
    assert!(rel(est.svals[0], (3.0 + r5) / 2.0) < 1e-14);
    assert!(rel(est.svals[1], (3.0 - r5) / 2.0) < 1e-14);
    assert!(step_exact_spectrum(&corpus::one_minus_x()).is_err());
}

#[test]
fn schatten_examples() {
    let one = SpectrumEstimate::exact(Method::StepExact, vec![1.0, 0.0, 0.0], 3, None);
    assert_eq!(schatten(&one, 1.0).norm, 1.0);
    let exact: Vec<f64> = (0..200_000).map(corpus::one_minus_x_eigenvalue).collect();
    let r = schatten(&SpectrumEstimate::exact(Method::Prufer, exact, 200_000, None), 1.0);
    let tail = match r.truncation_tail_bound {
        crate::classify::Norm(t) => t,
    };
    assert!((r.norm + tail - 0.5).abs() < 1e-9, "{} + {tail}", r.norm);
    let harmonic: Vec<f64> = (1..=500).map(|k| 1.0 / k as f64).collect();
    let r = schatten(&SpectrumEstimate::exact(Method::Galerkin, harmonic, 500, None), 1.0);
    assert!(rel(r.weak_norm, 1.0) < 1e-15);
}

#[test]
fn triangular_limit_scaling_and_zero() {
    let cfg = TriangularConfig { n_lo: 40, n_hi: 120, cells: 1024 };
    let one = triangular_limit(&corpus::volterra(), Interval::unit(), &cfg).unwrap();
    let two = triangular_limit(&Symbol::step_real(&[1.0], &[2.0]).unwrap(), Interval::unit(), &cfg).unwrap();
    assert!((one.limit - 1.0 / PI).abs() < 1e-4);
    assert!((two.limit - 2.0 / PI).abs() < 2e-4);
    assert!(rel(two.predicted, 2.0 / PI) < 1e-14);
    let z = triangular_limit(&Symbol::zero(), Interval::unit(), &cfg).unwrap();
    assert_eq!(z.limit, 0.0);
}

#[test]
fn factor_residual_examples() {
    assert_eq!(factor_residual(&Symbol::zero(), 64).unwrap(), 0.0);
    let r: Vec<f64> = [64, 128, 256].iter().map(|n| factor_residual(&corpus::one_minus_x_squared(), *n).unwrap()).collect();
    assert!(r[0] > r[1] && r[1] > r[2], "{r:?}");
    assert!(matches!(factor_residual(&Symbol::step_real(&[1.0, 2.0], &[1.0, 2.0]).unwrap(), 64), Err(Error::NotMonotone)));
}

#[test]
fn eigenvalues_of_one_minus_x_positive() {
    let m = galerkin_matrix(&corpus::one_minus_x(), Interval::unit(), 512, &Grid::Uniform, Mask::Full).unwrap();
    let s0 = m.singular_values(1)[0];
    assert!(m.min_eigenvalue().unwrap() > -1e-10 * s0);
    assert_eq!(m.count_eigen_above(0.0).unwrap(), 512);
    let top = m.top_eigenvalues(5).unwrap();
    let sv = m.singular_values(5);
    assert!(top.iter().zip(&sv).all(|(a, b)| (a - b).abs() < 1e-12 * s0));
    let cplx = galerkin_matrix(&corpus::cosine(false), Interval::unit(), 8, &Grid::Uniform, Mask::Lower).unwrap();
    assert!(cplx.min_eigenvalue().is_err());
}

#[test]
fn trace_and_frobenius_identities() {
    for e in corpus::smooth_corpus() {
        if !e.symbol.is_real() {
            continue;
        }
        let m = galerkin_matrix(&e.symbol, e.interval, 2048, &Grid::Uniform, Mask::Full).unwrap();
        let tr: f64 = m.diagonal().iter().map(|z| z.re).sum();
        let want = e.symbol.integral(e.interval.lo, e.interval.hi).re;
        assert!((tr - want).abs() < 2e-3 * (1.0 + want.abs()), "{}: {tr} vs {want}", e.name);
        let hs = (2.0 * e.symbol.x_l2sq(e.interval.lo, e.interval.hi)).sqrt();
        assert!(rel(m.frobenius(), hs) < 1e-2, "{}", e.name);
    }
}

#[test]
fn truncation_interval_for_tails() {
    assert_eq!(truncation_interval(&corpus::one_minus_x(), 1e-3).unwrap().hi, 1.0);
    let fast = Symbol::power_on(1.0, f64::INFINITY, -3.0, &[1.0]).unwrap();
    let iv = truncation_interval(&fast, 1e-3).unwrap();
    assert!(iv.hi.is_finite() && iv.hi > 1.0);
    let tail = crate::classify::tail_functional(&fast, iv.hi);
    let top = crate::classify::tail_functional_summary(&fast).sup;
    assert!(tail <= 1e-6 * top * (1.0 + 1e-9));
}

#[test]
fn calibrated_bounds_hold_on_the_corpus() {
    let mut entries: Vec<(Symbol, Interval)> = corpus::smooth_corpus().into_iter().map(|e| (e.symbol, e.interval)).collect();
    let mut rng = corpus::rng(31);
    for i in 0..6 {
        let s = corpus::random_step(&mut rng, 2 + i, i % 2 == 1);
        let iv = Interval::new(0.0, s.support().hi).unwrap();
        entries.push((s, iv));
    }
    for (s, iv) in &entries {
        let sv = galerkin_matrix(s, *iv, 512, &Grid::Uniform, Mask::Full).unwrap().singular_values(32);
        let bv = iv.len() * s.variation_tail(0.0).unwrap();
        for (n, v) in sv.iter().enumerate() {
            assert!(v * ((n + 1) as f64).powi(2) <= BV_CONSTANT * bv, "BV bound at n = {n}");
            if n > 0 {
                let w = s.modulus(*iv, iv.len() / n as f64, ModulusOrder::L2).unwrap();
                assert!(*v <= MODULUS_CONSTANT * iv.len().sqrt() / n as f64 * w + 1e-12 * sv[0], "modulus bound at n = {n}");
            }
        }
    }
}

fn arb_poly() -> impl Strategy<Value = Symbol> {
    (prop::collection::vec(-2.0f64..2.0, 1..4), 0.5f64..3.0).prop_map(|(cs, hi)| Symbol::poly_on(0.0, hi, &cs).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn refinement_is_monotone(s in arb_poly()) {
        let iv = Interval::new(0.0, s.support().hi).unwrap();
        let mut prev: Option<Vec<f64>> = None;
        for n in [16, 32, 64, 128] {
            let sv = galerkin_matrix(&s, iv, n, &Grid::Uniform, Mask::Full).unwrap().singular_values(8);
            if let Some(p) = &prev {
                for (a, b) in sv.iter().zip(p) {
                    prop_assert!(*a >= b - 1e-12 * (1.0 + sv[0]), "{a} < {b} at n = {n}");
                }
            }
            prev = Some(sv);
        }
    }

    #[test]
    fn scaling_is_unitary(s in arb_poly(), t in 0.2f64..5.0) {
        let iv = Interval::new(0.0, s.support().hi).unwrap();
        let a = galerkin_matrix(&s, iv, 64, &Grid::Uniform, Mask::Full).unwrap().singular_values(8);
        let r = s.scale(t).unwrap();
        let iv_t = Interval::new(0.0, iv.hi / t).unwrap();
        let b = galerkin_matrix(&r, iv_t, 64, &Grid::Uniform, Mask::Full).unwrap().singular_values(8);
        for (x, y) in a.iter().zip(&b) {
            prop_assert!((x - y).abs() <= 1e-10 * (1.0 + a[0]));
        }
    }

    #[test]
    fn real_full_matrix_is_symmetric(s in arb_poly()) {
        let iv = Interval::new(0.0, s.support().hi).unwrap();
        let d = galerkin_matrix(&s, iv, 24, &Grid::Geometric, Mask::Full).unwrap().to_dense();
        prop_assert!((0..24).all(|i| (0..24).all(|j| d[(i, j)] == d[(j, i)] && d[(i, j)].im == 0.0)));
    }

    #[test]
    fn step_rank_equals_step_count(seed in 0u64..1000, steps in 1usize..10) {
        let mut rng = corpus::rng(seed);
        let s = corpus::random_step(&mut rng, steps, seed % 2 == 0);
        let est = step_exact_spectrum(&s).unwrap();
        let rank = est.svals.iter().filter(|v| **v > 1e-12 * est.svals[0]).count();
        prop_assert_eq!(Some(rank), crate::classify::detect_step(&s));
    }
}
