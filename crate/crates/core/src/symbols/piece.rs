//! Closed-form building blocks shared by all symbol variants.
//!
//! Every symbol is stored internally as a list of pieces `(lo, hi]`, each
//! carrying either a (possibly power-weighted) polynomial or a finite
//! exponential sum. All cell integrals used by the Galerkin assembly, the
//! dyadic norms and the Fourier coefficients reduce to these.

use crate::quad;
use crate::{Error, Result, C64};

const ZERO: C64 = C64::new(0.0, 0.0);

#[derive(Clone, Debug, PartialEq)]
pub(crate) enum PieceFn {
    /// `x^power · Σ c_k (x − origin)^k`; `origin` is zero whenever `power` is not.
    Poly { origin: f64, power: f64, coeffs: Vec<C64> },
    /// `Σ c_j exp(i κ_j x)`.
    Exp { terms: Vec<(f64, C64)> },
}

#[derive(Clone, Debug, PartialEq)]
pub(crate) struct Piece {
    pub lo: f64,
    pub hi: f64,
    pub f: PieceFn,
}

/// (e^z − 1)/z, stable near zero.
fn e1(z: C64) -> C64 {
    if z.norm() < 0.5 {
        let mut term = C64::new(1.0, 0.0);
        let mut acc = term;
        for k in 1..20 {
            term = term * z / (k as f64 + 1.0);
            acc += term;
        }
        acc
    } else {
        (z.exp() - 1.0) / z
    }
}

/// ∫₀¹ s e^{zs} ds, stable near zero.
fn e2(z: C64) -> C64 {
    if z.norm() < 0.5 {
        // Σ z^k / (k! (k+2))
        let mut fact = C64::new(1.0, 0.0);
        let mut acc = C64::new(0.5, 0.0);
        for k in 1..22 {
            fact = fact * z / k as f64;
            acc += fact / (k as f64 + 2.0);
        }
        acc
    } else {
        (z.exp() * (z - 1.0) + 1.0) / (z * z)
    }
}

/// ∫ₐᵇ x^γ dx, possibly infinite; `b` may be +∞.
pub(crate) fn pow_int(gamma: f64, a: f64, b: f64) -> f64 {
    if a >= b {
        return 0.0;
    }
    let g1 = gamma + 1.0;
    if g1.abs() < 1e-13 {
        if a == 0.0 || b.is_infinite() {
            return f64::INFINITY;
        }
        return (b / a).ln();
    }
    if b.is_infinite() {
        if g1 < 0.0 {
            return -a.powf(g1) / g1;
        }
        return f64::INFINITY;
    }
    if a == 0.0 && g1 < 0.0 {
        return f64::INFINITY;
    }
    (b.powf(g1) - a.powf(g1)) / g1
}

impl PieceFn {
    pub fn constant(c: C64) -> Self {
        PieceFn::Poly { origin: 0.0, power: 0.0, coeffs: vec![c] }
    }

    pub fn eval(&self, x: f64) -> C64 {
        match self {
            PieceFn::Poly { origin, power, coeffs } => {
                let t = x - origin;
                let mut acc = ZERO;
                for c in coeffs.iter().rev() {
                    acc = acc * t + c;
                }
                if *power != 0.0 {
                    acc * x.powf(*power)
                } else {
                    acc
                }
            }
            PieceFn::Exp { terms } => terms.iter().map(|(k, c)| c * C64::new(0.0, k * x).exp()).sum(),
        }
    }

    pub fn deriv(&self, x: f64) -> C64 {
        match self {
            PieceFn::Poly { origin, power, coeffs } => {
                let t = x - origin;
                let mut dp = ZERO;
                for (k, c) in coeffs.iter().enumerate().skip(1).rev() {
                    dp = dp * t + c * k as f64;
                }
                if *power != 0.0 {
                    let p = PieceFn::Poly { origin: *origin, power: 0.0, coeffs: coeffs.clone() }.eval(x);
                    x.powf(*power) * dp + p * (*power * x.powf(*power - 1.0))
                } else {
                    dp
                }
            }
            PieceFn::Exp { terms } => terms
                .iter()
                .map(|(k, c)| c * C64::new(0.0, *k) * C64::new(0.0, k * x).exp())
                .sum(),
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            PieceFn::Poly { coeffs, .. } => coeffs.iter().all(|c| *c == ZERO),
            PieceFn::Exp { terms } => terms.iter().all(|(_, c)| *c == ZERO),
        }
    }

    /// True when the piece has identically vanishing derivative.
    pub fn is_constant(&self) -> bool {
        match self {
            PieceFn::Poly { power, coeffs, .. } => {
                let nonconst = coeffs.iter().skip(1).any(|c| *c != ZERO);
                !nonconst && (*power == 0.0 || coeffs.first().is_none_or(|c| *c == ZERO))
            }
            PieceFn::Exp { terms } => terms.iter().all(|(k, c)| *k == 0.0 || *c == ZERO),
        }
    }

    pub fn is_linear(&self) -> bool {
        matches!(self, PieceFn::Poly { power, coeffs, .. }
            if *power == 0.0 && coeffs.iter().skip(2).all(|c| *c == ZERO))
    }

    /// Exponent `e` with `|f(x)| ≍ x^e` as x → ∞ (−∞ for the zero piece).
    pub fn growth_exponent(&self) -> f64 {
        match self {
            PieceFn::Poly { power, coeffs, .. } => match coeffs.iter().rposition(|c| *c != ZERO) {
                Some(k) => power + k as f64,
                None => f64::NEG_INFINITY,
            },
            PieceFn::Exp { .. } => {
                if self.is_zero() {
                    f64::NEG_INFINITY
                } else {
                    0.0
                }
            }
        }
    }

    /// Exponent `e` with `|f(x)| ≍ x^e` as x → 0⁺ (+∞ for the zero piece).
    pub fn origin_exponent(&self) -> f64 {
        match self {
            PieceFn::Poly { origin, power, coeffs } => {
                if *origin != 0.0 {
                    return 0.0;
                }
                match coeffs.iter().position(|c| *c != ZERO) {
                    Some(k) => power + k as f64,
                    None => f64::INFINITY,
                }
            }
            PieceFn::Exp { .. } => {
                if self.is_zero() {
                    f64::INFINITY
                } else {
                    0.0
                }
            }
        }
    }

    fn gl_cell(&self, a: f64, b: f64, weight: impl Fn(f64) -> f64) -> C64 {
        quad::gauss_legendre_c(|x| self.eval(x) * weight(x), a, b, 1)
    }

    /// Cells far from the origin relative to their width are integrated with
    /// a Gauss rule in the local variable; closed forms lose digits there.
    fn prefers_local_rule(&self, a: f64, b: f64) -> bool {
        match self {
            PieceFn::Poly { origin, power, coeffs } => {
                let deg_ok = coeffs.len() <= 14;
                let far = if *power != 0.0 { a > 0.0 && (b - a) < 0.5 * a } else {
                    let d = (a - origin).abs().max((b - origin).abs());
                    (b - a) < 0.5 * d && d > 0.0
                };
                b.is_finite() && deg_ok && far
            }
            PieceFn::Exp { .. } => false,
        }
    }

    /// ∫ₐᵇ f.
    pub fn integral(&self, a: f64, b: f64) -> C64 {
        if a >= b {
            return ZERO;
        }
        if self.prefers_local_rule(a, b) {
            return self.gl_cell(a, b, |_| 1.0);
        }
        match self {
            PieceFn::Poly { origin, power, coeffs } => coeffs
                .iter()
                .enumerate()
                .filter(|(_, c)| **c != ZERO)
                .map(|(k, c)| c * pow_int(power + k as f64, a - origin, b - origin))
                .sum(),
            PieceFn::Exp { terms } => terms
                .iter()
                .map(|(k, c)| {
                    if b.is_infinite() && *k != 0.0 {
                        // oscillatory, not absolutely integrable
                        return C64::new(f64::NAN, f64::NAN);
                    }
                    let h = b - a;
                    c * C64::new(0.0, k * a).exp() * h * e1(C64::new(0.0, k * h))
                })
                .sum(),
        }
    }

    /// ∫ₐᵇ f(x)(x − a) dx.
    pub fn moment(&self, a: f64, b: f64) -> C64 {
        if a >= b {
            return ZERO;
        }
        if self.prefers_local_rule(a, b) {
            return self.gl_cell(a, b, |x| x - a);
        }
        match self {
            PieceFn::Poly { origin, power, coeffs } => {
                if *power == 0.0 {
                    // (x − a) = (x − o) − (a − o)
                    let s = a - origin;
                    coeffs
                        .iter()
                        .enumerate()
                        .filter(|(_, c)| **c != ZERO)
                        .map(|(k, c)| {
                            let g = k as f64;
                            c * (pow_int(g + 1.0, a - origin, b - origin) - s * pow_int(g, a - origin, b - origin))
                        })
                        .sum()
                } else {
                    coeffs
                        .iter()
                        .enumerate()
                        .filter(|(_, c)| **c != ZERO)
                        .map(|(k, c)| {
                            let g = power + k as f64;
                            c * (pow_int(g + 1.0, a, b) - a * pow_int(g, a, b))
                        })
                        .sum()
                }
            }
            PieceFn::Exp { terms } => {
                let h = b - a;
                terms
                    .iter()
                    .map(|(k, c)| c * C64::new(0.0, k * a).exp() * h * h * e2(C64::new(0.0, k * h)))
                    .sum()
            }
        }
    }

    fn abs2_poly(coeffs: &[C64]) -> Vec<f64> {
        if coeffs.is_empty() {
            return vec![];
        }
        let mut r = vec![0.0; 2 * coeffs.len() - 1];
        for (j, a) in coeffs.iter().enumerate() {
            for (k, b) in coeffs.iter().enumerate() {
                r[j + k] += (a * b.conj()).re;
            }
        }
        r
    }

    /// ∫ₐᵇ x^m |f(x)|² dx for m ∈ {0, 1}; may be +∞.
    pub fn weighted_abs2(&self, a: f64, b: f64, m: i32) -> f64 {
        if a >= b {
            return 0.0;
        }
        if self.prefers_local_rule(a, b) && self_degree(self) <= 7 {
            return quad::gauss_legendre_c(
                |x| C64::new(self.eval(x).norm_sqr() * x.powi(m), 0.0),
                a,
                b,
                1,
            )
            .re;
        }
        match self {
            PieceFn::Poly { origin, power, coeffs } => {
                let r = Self::abs2_poly(coeffs);
                if *power == 0.0 && m == 0 {
                    r.iter()
                        .enumerate()
                        .filter(|(_, c)| **c != 0.0)
                        .map(|(k, c)| c * pow_int(k as f64, a - origin, b - origin))
                        .sum()
                } else if *power == 0.0 {
                    // x = (x − o) + o
                    r.iter()
                        .enumerate()
                        .filter(|(_, c)| **c != 0.0)
                        .map(|(k, c)| {
                            let g = k as f64;
                            let hi = pow_int(g + 1.0, a - origin, b - origin);
                            let lo = if *origin == 0.0 { 0.0 } else { origin * pow_int(g, a - origin, b - origin) };
                            c * (hi + lo)
                        })
                        .sum()
                } else {
                    r.iter()
                        .enumerate()
                        .filter(|(_, c)| **c != 0.0)
                        .map(|(k, c)| c * pow_int(2.0 * power + k as f64 + m as f64, a, b))
                        .sum()
                }
            }
            PieceFn::Exp { terms } => {
                if b.is_infinite() {
                    return if self.is_zero() { 0.0 } else { f64::INFINITY };
                }
                let h = b - a;
                let mut acc = ZERO;
                for (k1, c1) in terms {
                    for (k2, c2) in terms {
                        let d = k1 - k2;
                        let z = C64::new(0.0, d * h);
                        let base = c1 * c2.conj() * C64::new(0.0, d * a).exp();
                        acc += if m == 0 {
                            base * h * e1(z)
                        } else {
                            base * (a * h * e1(z) + h * h * e2(z))
                        };
                    }
                }
                acc.re
            }
        }
    }

    /// Numerical ∫ₐᵇ g(f, f') dx for integrands without a closed form.
    pub fn integrate_with<G: Fn(C64, C64) -> f64>(&self, a: f64, b: f64, g: G) -> Result<f64> {
        if a >= b {
            return Ok(0.0);
        }
        let h = |x: f64| g(self.eval(x), self.deriv(x));
        if b.is_infinite() {
            quad::integrate_semi_infinite(h, a, 1e-11, 1e-300)
        } else {
            quad::integrate(h, a, b, 1e-11, 1e-300)
        }
    }
}

fn self_degree(f: &PieceFn) -> usize {
    match f {
        PieceFn::Poly { coeffs, .. } => coeffs.len().saturating_sub(1),
        PieceFn::Exp { .. } => usize::MAX,
    }
}

impl Piece {
    pub fn contains(&self, x: f64) -> bool {
        self.lo < x && x <= self.hi
    }

    /// Total variation of the piece's a.c. part over [a, b] ⊂ (lo, hi].
    pub fn variation(&self, a: f64, b: f64) -> Result<f64> {
        if a >= b || self.f.is_constant() {
            return Ok(0.0);
        }
        if self.f.is_linear() {
            if let PieceFn::Poly { coeffs, .. } = &self.f {
                let slope = coeffs.get(1).copied().unwrap_or(ZERO);
                if b.is_infinite() {
                    return Ok(f64::INFINITY);
                }
                return Ok(slope.norm() * (b - a));
            }
        }
        self.f.integrate_with(a, b, |_, d| d.norm())
    }
}

pub(crate) fn check_finite(x: f64, what: &str) -> Result<()> {
    if x.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidSymbol(format!("{what} must be finite")))
    }
}
