use super::*;
use proptest::prelude::*;

fn c(x: f64) -> C64 {
    C64::new(x, 0.0)
}

fn one_minus_x() -> Symbol {
    Symbol::poly_on(0.0, 1.0, &[1.0, -1.0]).unwrap()
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * (1.0 + b.abs())
}

#[test]
fn eval_examples() {
    let s = Symbol::step_real(&[1.0, 3.0], &[2.0, 1.0]).unwrap();
    assert_eq!(s.eval(0.5), c(2.0));
    assert_eq!(s.eval(1.0), c(2.0));
    assert_eq!(s.eval(1.5), c(1.0));
    assert_eq!(s.eval(3.5), c(0.0));
    assert!(close(one_minus_x().eval(0.25).re, 0.75, 1e-15));
    let t = Symbol::trig(1.0, vec![c(0.0), c(0.0), c(1.0)], false).unwrap();
    assert!((t.eval(0.0) - c(1.0)).norm() < 1e-15 || (t.eval(1e-300) - c(1.0)).norm() < 1e-12);
    assert!((t.eval(0.25) - C64::new(0.0, 1.0)).norm() < 1e-14);
    assert!(!t.is_real());
}

#[test]
fn periodic_trig_extends() {
    let s = Symbol::trig(1.0, vec![c(0.5), c(0.0), c(0.5)], true).unwrap();
    assert!(s.is_real());
    assert_eq!(s.support().hi, f64::INFINITY);
    assert!(close(s.eval(1.25).re, 0.0, 1e-12));
    assert!(close(s.eval(2.0).re, 1.0, 1e-12));
}

#[test]
fn scale_examples() {
    let s = Symbol::indicator(1.0).unwrap().scale(2.0).unwrap();
    match s.kind() {
        SymbolKind::Step { breakpoints, values } => {
            assert_eq!(breakpoints, &vec![0.5]);
            assert_eq!(values, &vec![c(2.0)]);
        }
        k => panic!("expected a step symbol, got {}", k.name()),
    }
    let u = one_minus_x().scale(1.0).unwrap();
    for x in [0.1, 0.5, 0.9] {
        assert_eq!(u.eval(x), one_minus_x().eval(x));
    }
}

#[test]
fn variation_examples() {
    // ∫|φ'| = 1, no jump at 1
    assert!(close(one_minus_x().variation_tail(0.0).unwrap(), 1.0, 1e-14));
    let s = Symbol::step_real(&[1.0, 3.0], &[2.0, 1.0]).unwrap();
    assert!(close(s.variation_tail(0.5).unwrap(), 2.0, 1e-15));
    assert!(close(s.variation_tail(2.0).unwrap(), 1.0, 1e-15));
    let tent = Symbol::ppoly(vec![0.0, 0.5, 1.0], vec![vec![c(1.0), c(-0.4)], vec![c(1.6), c(-1.6)]], None).unwrap();
    for x in [0.0, 0.2, 0.5, 0.7] {
        assert!(close(tent.variation_tail(x).unwrap(), tent.eval(x.max(1e-300)).re, 1e-13), "x = {x}");
    }
}

#[test]
fn variation_matches_fine_grid_oracle() {
    let s = Symbol::ppoly(vec![0.0, 1.0, 2.0], vec![vec![c(0.0), c(3.0), c(-3.0)], vec![c(2.0), c(-1.0)]], None).unwrap();
    let n = 200_000;
    let h = 2.0 / n as f64;
    let mut tv = 0.0;
    let mut prev = s.eval(h * 0.5);
    for k in 1..n {
        let v = s.eval(h * (k as f64 + 0.5));
        tv += (v - prev).norm();
        prev = v;
    }
    tv += prev.norm();
    // ∫₀¹|3−6x| = 1.5, jump |0 − 1| at 1, ∫₁²|−1| = 1, end value 0
    let got = s.variation_tail(0.0).unwrap();
    assert!(close(got, 3.5, 1e-13));
    assert!(close(got, tv, 1e-4));
}

#[test]
fn heart_transform_examples() {
    let chi = Symbol::indicator(1.0).unwrap();
    let f = heart_transform(&chi);
    assert!(close(f(-0.5).re, 2.0 * (-1.0f64).exp(), 1e-14));
    assert_eq!(f(0.5), c(0.0));
    let r = Symbol::power_on(1.0, f64::INFINITY, -1.0, &[1.0]).unwrap();
    let g = heart_transform(&r);
    for t in [0.1, 1.0, 3.0] {
        assert!(close(g(t).re, 2.0, 1e-13));
    }
    assert_eq!(heart_transform(&Symbol::zero())(0.3), c(0.0));
}

#[test]
fn modulus_examples() {
    let iv = Interval::unit();
    let w = one_minus_x().modulus(iv, 0.1, ModulusOrder::Sup).unwrap();
    assert!(close(w, 0.1, 1e-9));
    let k = Symbol::step_real(&[1.0], &[3.0]).unwrap();
    assert_eq!(k.modulus(iv, 0.2, ModulusOrder::Sup).unwrap(), 0.0);
    assert_eq!(k.modulus(iv, 0.2, ModulusOrder::L2).unwrap(), 0.0);
    let half = Symbol::indicator(0.5).unwrap();
    let w2 = half.modulus(iv, 0.1, ModulusOrder::L2).unwrap();
    assert!(close(w2, 0.1f64.sqrt(), 1e-9), "{w2}");
}

#[test]
fn integrals_closed_forms() {
    let s = one_minus_x();
    assert!(close(s.integral(0.0, 1.0).re, 0.5, 1e-15));
    // ∫x(1−x)² = 1/12
    assert!(close(s.x_l2sq(0.0, 1.0), 1.0 / 12.0, 1e-14));
    assert!(close(s.l2sq(0.0, 1.0), 1.0 / 3.0, 1e-14));
    let r = Symbol::power_on(1.0, f64::INFINITY, -1.0, &[1.0]).unwrap();
    assert!(close(r.tail_l2sq(2.0), 0.5, 1e-10));
    assert_eq!(r.l1_norm().unwrap(), f64::INFINITY);
}

#[test]
fn json_round_trip_and_rejections() {
    let text = r#"{"kind":"ppoly","breakpoints":[0,1],"coeffs":[[1,-1]]}"#;
    let s = Symbol::from_json(text).unwrap();
    assert!(s.is_real());
    assert!(close(s.eval(0.25).re, 0.75, 1e-15));
    let back = Symbol::from_json(&s.to_json()).unwrap();
    assert_eq!(back.kind(), s.kind());
    let tail = Symbol::from_json(r#"{"kind":"ppoly","breakpoints":[1,"inf"],"coeffs":[[1]],"powers":[-1]}"#).unwrap();
    assert_eq!(tail.support().hi, f64::INFINITY);
    let cplx = Symbol::from_json(r#"{"kind":"step","breakpoints":[1],"values":[[0,1]]}"#).unwrap();
    assert!(!cplx.is_real());
    for bad in [
        r#"{"kind":"step","breakpoints":[1],"values":[[0,1]],"real":true}"#,
        r#"{"kind":"step","breakpoints":[2,1],"values":[1,1]}"#,
        r#"{"kind":"step","breakpoints":[1],"values":[1],"extra":0}"#,
        r#"{"kind":"trig","period":1,"coeffs":[1,2]}"#,
        r#"{"kind":"cubic"}"#,
        "not json",
    ] {
        assert!(Symbol::from_json(bad).is_err(), "{bad}");
    }
}

#[test]
fn jumps_include_terminal() {
    let s = Symbol::step_real(&[1.0, 3.0], &[2.0, 1.0]).unwrap();
    assert_eq!(s.jumps(), vec![(1.0, 1.0), (3.0, 1.0)]);
    assert!(one_minus_x().jumps().iter().all(|(_, j)| *j == 0.0));
}

fn arb_step() -> impl Strategy<Value = Symbol> {
    prop::collection::vec((0.05f64..1.0, -3.0f64..3.0), 1..8).prop_map(|v| {
        let mut x = 0.0;
        let (xs, vs): (Vec<f64>, Vec<f64>) = v
            .into_iter()
            .map(|(dx, val)| {
                x += dx;
                (x, val)
            })
            .unzip();
        Symbol::step_real(&xs, &vs).unwrap()
    })
}

fn arb_poly() -> impl Strategy<Value = Symbol> {
    (prop::collection::vec(-2.0f64..2.0, 1..5), 0.5f64..3.0).prop_map(|(cs, hi)| Symbol::poly_on(0.0, hi, &cs).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn eval_scale_composition(s in prop_oneof![arb_step(), arb_poly()], t in 0.1f64..10.0, u in 0.01f64..0.99) {
        let r = s.scale(t).unwrap();
        let x = u * r.support().hi;
        let want = t * s.eval(t * x);
        prop_assert!((r.eval(x) - want).norm() <= 1e-12 * (1.0 + want.norm()));
    }

    #[test]
    fn variation_tail_nonincreasing(s in prop_oneof![arb_step(), arb_poly()], a in 0.0f64..1.0, b in 0.0f64..1.0) {
        let hi = s.support().hi;
        let (x, y) = (a.min(b) * hi, a.max(b) * hi);
        prop_assert!(s.variation_tail(x).unwrap() >= s.variation_tail(y).unwrap() - 1e-12);
    }

    #[test]
    fn variation_tail_right_continuous_for_steps(s in arb_step()) {
        for b in s.breakpoints() {
            if b > 0.0 {
                let at = s.variation_tail(b).unwrap();
                let after = s.variation_tail(b * (1.0 + 1e-12)).unwrap();
                prop_assert!((at - after).abs() <= 1e-12);
            }
        }
    }

    #[test]
    fn modulus_doubling(s in prop_oneof![arb_step(), arb_poly()], h in 0.02f64..0.5) {
        let iv = Interval::new(0.0, s.support().hi).unwrap();
        let h = h * iv.len();
        for p in [ModulusOrder::Sup, ModulusOrder::L2] {
            let w = s.modulus(iv, h, p).unwrap();
            let w2 = s.modulus(iv, h / 2.0, p).unwrap();
            prop_assert!(w <= 2.0 * w2 * (1.0 + 1e-6) + 1e-12, "{p:?}: {w} vs {w2}");
        }
    }

    #[test]
    fn l2_modulus_below_sup_modulus(s in prop_oneof![arb_step(), arb_poly()], h in 0.02f64..0.5) {
        let iv = Interval::new(0.0, s.support().hi).unwrap();
        let h = h * iv.len();
        let w2 = s.modulus(iv, h, ModulusOrder::L2).unwrap();
        let wi = s.modulus(iv, h, ModulusOrder::Sup).unwrap();
        prop_assert!(w2 <= iv.len().sqrt() * wi * (1.0 + 1e-6) + 1e-12);
    }

    #[test]
    fn json_round_trip(s in prop_oneof![arb_step(), arb_poly()]) {
        let back = Symbol::from_json(&s.to_json()).unwrap();
        prop_assert_eq!(back.kind(), s.kind());
    }
}
