use super::*;
use proptest::prelude::*;

fn c(x: f64) -> C64 {
    C64::new(x, 0.0)
}

fn one_minus_x() -> Symbol {
    Symbol::poly_on(0.0, 1.0, &[1.0, -1.0]).unwrap()
}

fn reciprocal() -> Symbol {
    Symbol::power_on(1.0, f64::INFINITY, -1.0, &[1.0]).unwrap()
}

fn inv_sqrt() -> Symbol {
    Symbol::power_on(0.0, 1.0, -0.5, &[1.0]).unwrap()
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * (1.0 + b.abs())
}

#[test]
fn dyadic_profile_examples() {
    let chi = Symbol::indicator(1.0).unwrap();
    let p = dyadic_profile(&chi, None).unwrap();
    assert!(close(p.get(-1), 0.5, 1e-14));
    for n in 0..4 {
        assert_eq!(p.get(n), 0.0);
    }
    let z = dyadic_profile(&Symbol::zero(), None).unwrap();
    assert!(z.d.iter().all(|v| *v == 0.0));
    let r = dyadic_profile(&reciprocal(), Some((0, 6))).unwrap();
    for n in 0..=6 {
        assert!(close(r.get(n), 0.5f64.sqrt(), 1e-10), "n = {n}: {}", r.get(n));
    }
    assert!(!r.is_exact());
}

#[test]
fn x_p_norm_examples() {
    let chi = Symbol::indicator(1.0).unwrap();
    // integral form: (∫₀¹ (1 − x) dx)^{1/2}
    assert!(close(x_p_integral(&chi, 2.0).unwrap(), 0.5f64.sqrt(), 1e-9));
    let dyadic = x_p_norm(&dyadic_profile(&chi, None).unwrap(), 2.0);
    let ratio = dyadic / 0.5f64.sqrt();
    assert!((0.5..=2.0).contains(&ratio), "{dyadic}");
    let z = dyadic_profile(&Symbol::zero(), None).unwrap();
    for p in [0.5, 1.0, 2.0, f64::INFINITY] {
        assert_eq!(x_p_norm(&z, p), 0.0);
    }
    assert_eq!(x_p_norm(&dyadic_profile(&reciprocal(), None).unwrap(), 1.0), f64::INFINITY);
    assert!(x_p_norm(&dyadic_profile(&reciprocal(), None).unwrap(), f64::INFINITY).is_finite());
}

#[test]
fn boundedness_and_compactness() {
    let r = reciprocal();
    assert!(is_bounded(&r).is_in());
    assert!(is_compact(&r).is_out());
    let t = tail_functional_summary(&r);
    assert!(close(t.limit_at_infinity, 1.0, 1e-6));
    assert!(close(tail_functional(&r, 5.0), 1.0, 1e-10));
    let chi = Symbol::indicator(1.0).unwrap();
    assert!(is_bounded(&chi).is_in() && is_compact(&chi).is_in());
    let s = inv_sqrt();
    // x ∫ₓ¹ y⁻¹ dy = x ln(1/x)
    assert!(close(tail_functional(&s, 0.25), 0.25 * 4f64.ln(), 1e-10));
    assert!(is_bounded(&s).is_in());
    assert!(is_compact(&Symbol::zero()).is_in());
    // x ∫ₓ¹ y⁻² dy = 1 − x: bounded, not compact
    let edge = Symbol::power_on(0.0, 1.0, -1.0, &[1.0]).unwrap();
    assert!(is_bounded(&edge).is_in() && is_compact(&edge).is_out());
    let too_big = Symbol::power_on(0.0, 1.0, -1.5, &[1.0]).unwrap();
    assert!(is_bounded(&too_big).is_out());
}

#[test]
fn y_p_examples() {
    // dyadic cells (2⁻ᵏ, 2⁻ᵏ⁺¹] contribute 2⁻ᵏ · 2⁻ᵏ
    let y = y_p_norm(&one_minus_x(), 1.0).unwrap();
    assert!(close(y, 1.0 / 3.0, 1e-12), "{y}");
    let alt = y_p_integral(&one_minus_x(), 1.0).unwrap();
    assert!(close(alt, 0.5, 1e-9));
    let chi = Symbol::indicator(1.0).unwrap();
    assert!(close(y_p_norm(&chi, 1.0).unwrap(), 1.0, 1e-15));
    assert_eq!(y_p_norm(&Symbol::zero(), 1.0).unwrap(), 0.0);
    let periodic = Symbol::trig(1.0, vec![c(0.5), c(0.0), c(0.5)], true).unwrap();
    assert_eq!(y_p_norm(&periodic, 1.0).unwrap(), f64::INFINITY);
}

#[test]
fn schatten_verdict_examples() {
    let v = classify_schatten(&one_minus_x(), 1.0);
    assert!(v.is_in(), "{v:?}");
    let v = classify_schatten(&one_minus_x(), 0.4);
    assert!(v.is_out());
    assert_eq!(v.criterion, "nonzero_derivative");
    let v = classify_schatten(&Symbol::indicator(1.0).unwrap(), 0.1);
    assert!(v.is_in());
    assert_eq!(v.criterion, "finite_rank");
    assert!(classify_schatten(&reciprocal(), 1.0).is_out());
    // dₙ ≍ 2^{n/2} as n → −∞ for x^{-1/2}, and 2^{−n/4} as n → ∞ for x^{-5/4}
    assert!(classify_schatten(&inv_sqrt(), 2.0).is_in());
    let slow = Symbol::power_on(1.0, f64::INFINITY, -1.25, &[1.0]).unwrap();
    assert!(classify_schatten(&slow, 1.5).is_in());
    let slower = Symbol::power_on(1.0, f64::INFINITY, -0.75, &[1.0]).unwrap();
    assert!(classify_schatten(&slower, 2.0).is_out());
}

#[test]
fn verdict_json_shape() {
    let v = classify_schatten(&reciprocal(), 1.0);
    let j: serde_json::Value = serde_json::from_str(&v.to_json()).unwrap();
    assert_eq!(j["verdict"], "out");
    assert_eq!(j["criterion"], "compact");
    assert_eq!(j["norms"]["limit_at_zero"], 0.0);
    let u = classify_schatten(&Symbol::power_on(0.0, 1.0, -1.5, &[1.0]).unwrap(), 2.0);
    let j: serde_json::Value = serde_json::from_str(&u.to_json()).unwrap();
    assert_eq!(j["norms"]["sup_tail_functional"], "inf");
}

#[test]
fn positivity_examples() {
    assert!(is_positive_operator(&one_minus_x()).is_in());
    assert!(is_positive_operator(&Symbol::step_real(&[1.0], &[-1.0]).unwrap()).is_out());
    assert!(is_positive_operator(&Symbol::step_real(&[1.0, 2.0], &[1.0, 2.0]).unwrap()).is_out());
    let gap = Symbol::ppoly(vec![0.0, 1.0, 2.0], vec![vec![c(0.0)], vec![c(1.0)]], None).unwrap();
    assert!(is_positive_operator(&gap).is_out());
}

#[test]
fn trace_examples() {
    assert!(close(trace_value(&one_minus_x()).unwrap().re, 0.5, 1e-15));
    assert_eq!(trace_value(&Symbol::zero()).unwrap(), c(0.0));
    assert!(close(trace_value(&Symbol::step_real(&[1.0, 3.0], &[2.0, 1.0]).unwrap()).unwrap().re, 4.0, 1e-15));
    assert!(matches!(trace_value(&reciprocal()), Err(Error::NonIntegrable)));
}

#[test]
fn step_detection() {
    assert_eq!(detect_step(&Symbol::step_real(&[1.0, 2.0, 3.0], &[5.0, 5.0, 1.0]).unwrap()), Some(2));
    assert_eq!(detect_step(&one_minus_x()), None);
    assert_eq!(detect_step(&Symbol::step_real(&[1.0], &[0.0]).unwrap()), Some(0));
    let (xs, cs) = step_decomposition(&Symbol::step_real(&[1.0, 2.0], &[2.0, 1.0]).unwrap()).unwrap();
    assert_eq!(xs, vec![1.0, 2.0]);
    assert_eq!(cs, vec![c(1.0), c(1.0)]);
}

#[test]
fn kronecker_examples() {
    let k = kronecker_det(&[c(3.0), c(2.0), c(1.0)]).unwrap();
    assert_eq!(k.formula, c(1.0));
    // cofactor expansion of [[3,2,1],[2,2,1],[1,1,1]]
    let cof = 3.0 * (2.0 - 1.0) - 2.0 * (2.0 - 1.0) + 1.0 * (2.0 - 2.0);
    assert!((k.dense - c(cof)).norm() < 1e-14);
    assert_eq!(kronecker_det(&[C64::new(0.3, -2.0)]).unwrap().formula, C64::new(0.3, -2.0));
    assert_eq!(kronecker_det(&[c(1.0), c(1.0)]).unwrap().formula, c(0.0));
    assert!(kronecker_det(&[]).is_err());
}

#[test]
fn dini_rule_for_lipschitz_symbol() {
    let d = dini_integral(&one_minus_x(), Interval::unit()).unwrap();
    // ω₂(t) = t·(1 − t)^{1/2}-ish, so the integral is O(1)
    assert!(d.is_finite() && d > 0.0 && d < 2.0, "{d}");
}

fn arb_symbol() -> impl Strategy<Value = Symbol> {
    prop_oneof![
        (prop::collection::vec(-2.0f64..2.0, 1..4), 0.5f64..4.0).prop_map(|(cs, hi)| Symbol::poly_on(0.0, hi, &cs).unwrap()),
        (prop::collection::vec((0.05f64..1.0, -2.0f64..2.0), 1..6)).prop_map(|v| {
            let mut x = 0.0;
            let (xs, vs): (Vec<f64>, Vec<f64>) = v.into_iter().map(|(d, c)| { x += d; (x, c) }).unzip();
            Symbol::step_real(&xs, &vs).unwrap()
        }),
        (-1.6f64..0.6, 0.5f64..2.0).prop_map(|(g, a)| Symbol::power_on(a, f64::INFINITY, g.min(-0.55), &[1.0]).unwrap()),
        (-0.95f64..1.0, 0.5f64..2.0).prop_map(|(g, b)| Symbol::power_on(0.0, b, g, &[1.0]).unwrap()),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn x_p_monotone_in_p(s in arb_symbol()) {
        let prof = dyadic_profile(&s, None).unwrap();
        let ps = [0.5, 0.75, 1.0, 1.5, 2.0, 4.0, f64::INFINITY];
        for w in ps.windows(2) {
            if x_p_norm(&prof, w[0]).is_finite() {
                prop_assert!(x_p_norm(&prof, w[1]).is_finite(), "p = {} finite but q = {} not", w[0], w[1]);
            }
        }
    }

    #[test]
    fn y_p_finite_implies_x_p_finite(s in arb_symbol(), p in 0.55f64..3.0) {
        if y_p_norm(&s, p).unwrap().is_finite() {
            prop_assert!(x_p_norm(&dyadic_profile(&s, None).unwrap(), p).is_finite());
        }
    }

    #[test]
    fn verdicts_scale_invariant(s in arb_symbol(), p in prop::sample::select(vec![0.4, 0.75, 1.0, 2.0])) {
        let base = classify_schatten(&s, p);
        for t in [0.25, 8.0] {
            let v = classify_schatten(&s.scale(t).unwrap(), p);
            prop_assert_eq!(v.verdict, base.verdict, "t = {}", t);
        }
    }

    #[test]
    fn kronecker_matches_dense(re in prop::collection::vec(-1.0f64..1.0, 1..=8), im in prop::collection::vec(-1.0f64..1.0, 8)) {
        let a: Vec<C64> = re.iter().zip(&im).map(|(r, i)| C64::new(*r, *i)).collect();
        prop_assert!(kronecker_det(&a).unwrap().relative_error() < 1e-12);
    }
}

#[test]
fn tail_functional_sup_of_linear_symbol() {
    // x(1-x)^3/3 peaks at x = 1/4
    let t = tail_functional_summary(&crate::corpus::one_minus_x());
    assert!((t.sup - 27.0 / 768.0).abs() < 1e-13, "{}", t.sup);
}
