//! Adaptive Gauss–Kronrod quadrature and fixed Gauss–Legendre rules.

use crate::{Error, Result, C64};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_728_0,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// 8-point Gauss–Legendre nodes on [-1, 1] (positive half) and weights.
const GL8_X: [f64; 4] = [
    0.183_434_642_495_649_8,
    0.525_532_409_916_329_0,
    0.796_666_477_413_626_7,
    0.960_289_856_497_536_2,
];
const GL8_W: [f64; 4] = [
    0.362_683_783_378_362_0,
    0.313_706_645_877_887_3,
    0.222_381_034_453_374_5,
    0.101_228_536_290_376_3,
];

fn gk15<F: Fn(f64) -> C64>(f: &F, a: f64, b: f64) -> (C64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kron = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for j in 0..7 {
        let dx = h * XGK[j];
        let s = f(c - dx) + f(c + dx);
        kron += s * WGK[j];
        if j % 2 == 1 {
            gauss += s * WG[j / 2];
        }
    }
    let kron = kron * h;
    let gauss = gauss * h;
    (kron, (kron - gauss).norm())
}

struct Segment {
    a: f64,
    b: f64,
    value: C64,
    err: f64,
}

/// Globally adaptive G7/K15 quadrature of a complex integrand on a finite
/// interval. Converges when the summed error estimate drops below
/// `max(abs_tol, rel_tol·|I|)`.
pub fn integrate_c<F: Fn(f64) -> C64>(
    f: F,
    a: f64,
    b: f64,
    rel_tol: f64,
    abs_tol: f64,
) -> Result<C64> {
    if a == b {
        return Ok(C64::new(0.0, 0.0));
    }
    let (v, e) = gk15(&f, a, b);
    let mut segs = vec![Segment { a, b, value: v, err: e }];
    const MAX_SEGMENTS: usize = 4000;
    loop {
        let total: C64 = segs.iter().map(|s| s.value).sum();
        let err: f64 = segs.iter().map(|s| s.err).sum();
        if !total.re.is_finite() || !total.im.is_finite() {
            return Err(Error::QuadratureFailure { lo: a, hi: b });
        }
        if err <= abs_tol.max(rel_tol * total.norm()) {
            return Ok(total);
        }
        if segs.len() >= MAX_SEGMENTS {
            return Err(Error::QuadratureFailure { lo: a, hi: b });
        }
        let (worst, _) = segs
            .iter()
            .enumerate()
            .fold((0, -1.0), |acc, (i, s)| if s.err > acc.1 { (i, s.err) } else { acc });
        let s = segs.swap_remove(worst);
        let m = 0.5 * (s.a + s.b);
        if m <= s.a || m >= s.b {
            return Err(Error::QuadratureFailure { lo: a, hi: b });
        }
        let (v1, e1) = gk15(&f, s.a, m);
        let (v2, e2) = gk15(&f, m, s.b);
        segs.push(Segment { a: s.a, b: m, value: v1, err: e1 });
        segs.push(Segment { a: m, b: s.b, value: v2, err: e2 });
    }
}

pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, rel_tol: f64, abs_tol: f64) -> Result<f64> {
    integrate_c(|x| C64::new(f(x), 0.0), a, b, rel_tol, abs_tol).map(|v| v.re)
}

/// ∫ₐ^∞ f via the map x = a + t/(1−t).
pub fn integrate_semi_infinite_c<F: Fn(f64) -> C64>(
    f: F,
    a: f64,
    rel_tol: f64,
    abs_tol: f64,
) -> Result<C64> {
    integrate_c(
        |t| {
            if t >= 1.0 {
                return C64::new(0.0, 0.0);
            }
            let s = 1.0 - t;
            let v = f(a + t / s) / (s * s);
            if v.re.is_finite() && v.im.is_finite() {
                v
            } else {
                C64::new(0.0, 0.0)
            }
        },
        0.0,
        1.0,
        rel_tol,
        abs_tol,
    )
}

pub fn integrate_semi_infinite<F: Fn(f64) -> f64>(f: F, a: f64, rel_tol: f64, abs_tol: f64) -> Result<f64> {
    integrate_semi_infinite_c(|x| C64::new(f(x), 0.0), a, rel_tol, abs_tol).map(|v| v.re)
}

/// Composite 8-point Gauss–Legendre rule over `panels` equal panels.
pub fn gauss_legendre_c<F: Fn(f64) -> C64>(f: F, a: f64, b: f64, panels: usize) -> C64 {
    let h = (b - a) / panels as f64;
    let mut acc = C64::new(0.0, 0.0);
    for p in 0..panels {
        let c = a + (p as f64 + 0.5) * h;
        let r = 0.5 * h;
        for j in 0..4 {
            acc += (f(c - r * GL8_X[j]) + f(c + r * GL8_X[j])) * (GL8_W[j] * r);
        }
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_exact() {
        let v = integrate(|x| x * x * x - 2.0 * x, 0.0, 2.0, 1e-14, 0.0).unwrap();
        assert!((v - 0.0).abs() < 1e-13);
        let g = gauss_legendre_c(|x| C64::new(x.powi(15), 0.0), 0.0, 1.0, 1);
        assert!((g.re - 1.0 / 16.0).abs() < 1e-15);
    }

    #[test]
    fn endpoint_singularity() {
        let v = integrate(|x| x.powf(-0.5), 0.0, 1.0, 1e-10, 0.0).unwrap();
        assert!((v - 2.0).abs() < 1e-8, "{v}");
    }

    #[test]
    fn semi_infinite() {
        let v = integrate_semi_infinite(|x| 1.0 / (x * x), 1.0, 1e-12, 0.0).unwrap();
        assert!((v - 1.0).abs() < 1e-10);
    }

    #[test]
    fn oscillatory_complex() {
        let k = 40.0;
        let v = integrate_c(|x| C64::new(0.0, k * x).exp(), 0.0, 1.0, 1e-13, 0.0).unwrap();
        let exact = (C64::new(0.0, k).exp() - 1.0) / C64::new(0.0, k);
        assert!((v - exact).norm() < 1e-12);
    }
}
