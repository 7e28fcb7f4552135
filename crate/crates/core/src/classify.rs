//! Dyadic norms of symbols and three-valued membership verdicts.
//!
//! Boundedness, compactness and Schatten membership of Q_φ are decided from
//! the dyadic profile `dₙ = 2^{n/2}‖φ‖_{L²[2ⁿ,2ⁿ⁺¹]}`, the weighted variation
//! sums of Y_p, and a handful of structural tests (monotonicity, finite rank,
//! vanishing derivative). Tails outside the computed window are handled by
//! the leading power-law exponent of the end pieces, so divergence is decided
//! exactly for the closed-form variants.

use nalgebra::DMatrix;
use serde::{Serialize, Serializer};
use std::collections::BTreeMap;

use crate::symbols::{Interval, ModulusOrder, Piece, PieceFn, Symbol};
use crate::{quad, Error, Result, C64};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Membership {
    #[serde(rename = "in")]
    DefinitelyIn,
    #[serde(rename = "out")]
    DefinitelyOut,
    #[serde(rename = "unknown")]
    Unknown,
}

/// A nonnegative quantity that may be infinite; serialises ∞ as `"inf"`.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd)]
pub struct Norm(pub f64);

impl Serialize for Norm {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        if self.0.is_finite() {
            s.serialize_f64(self.0)
        } else {
            s.serialize_str("inf")
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Verdict {
    pub verdict: Membership,
    /// The single criterion that produced the verdict.
    pub criterion: &'static str,
    pub norms: BTreeMap<&'static str, Norm>,
}

impl Verdict {
    fn new(verdict: Membership, criterion: &'static str) -> Self {
        Verdict { verdict, criterion, norms: BTreeMap::new() }
    }

    fn with(mut self, key: &'static str, value: f64) -> Self {
        self.norms.insert(key, Norm(value));
        self
    }

    pub fn is_in(&self) -> bool {
        self.verdict == Membership::DefinitelyIn
    }

    pub fn is_out(&self) -> bool {
        self.verdict == Membership::DefinitelyOut
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("verdicts always serialise")
    }
}

fn membership(b: bool) -> Membership {
    if b {
        Membership::DefinitelyIn
    } else {
        Membership::DefinitelyOut
    }
}

/// Nonzero end pieces of a symbol.
fn end_pieces(s: &Symbol) -> Option<(&Piece, &Piece)> {
    let ps = s.pieces();
    let first = ps.iter().find(|p| !p.f.is_zero())?;
    let last = ps.iter().rev().find(|p| !p.f.is_zero())?;
    Some((first, last))
}

/// Power-law behaviour `|φ(x)| ≍ x^g` at the two ends of the support.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Tails {
    /// `Some(g)` when φ is nonzero arbitrarily close to 0.
    pub at_zero: Option<f64>,
    /// `Some(g)` when φ is nonzero arbitrarily far out.
    pub at_infinity: Option<f64>,
}

pub fn tails(s: &Symbol) -> Tails {
    match end_pieces(s) {
        None => Tails { at_zero: None, at_infinity: None },
        Some((first, last)) => Tails {
            at_zero: (first.lo == 0.0).then(|| first.f.origin_exponent()),
            at_infinity: last.hi.is_infinite().then(|| last.f.growth_exponent()),
        },
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DyadicProfile {
    pub n_min: i32,
    pub n_max: i32,
    /// `d[k]` belongs to the cell `n = n_min + k`.
    pub d: Vec<f64>,
    pub support_bounded_below: bool,
    pub support_bounded_above: bool,
    /// `dₙ ≍ 2^{n·κ}` outside the window (κ = 1 + g from [`Tails`]).
    pub decay_below: Option<f64>,
    pub decay_above: Option<f64>,
}

impl DyadicProfile {
    /// `true` when the support lies inside the window, so no tail is extrapolated.
    pub fn is_exact(&self) -> bool {
        self.decay_below.is_none() && self.decay_above.is_none()
    }

    pub fn get(&self, n: i32) -> f64 {
        if n < self.n_min || n > self.n_max {
            return 0.0;
        }
        self.d[(n - self.n_min) as usize]
    }
}

fn floor_log2(x: f64) -> i32 {
    x.log2().floor() as i32
}

/// Default dyadic window: the smallest one covering the support, extended
/// by 8 cells on each side that is not bounded.
pub fn default_window(s: &Symbol) -> (i32, i32) {
    let Some((first, last)) = end_pieces(s) else {
        return (0, 0);
    };
    let n_min = if first.lo > 0.0 { floor_log2(first.lo) } else { floor_log2(first.hi.min(1.0)) - 8 };
    let n_max = if last.hi.is_finite() {
        (last.hi.log2().ceil() as i32 - 1).max(n_min)
    } else {
        floor_log2(last.lo.max(1.0)) + 8
    };
    (n_min, n_max.max(n_min))
}

pub fn dyadic_profile(s: &Symbol, window: Option<(i32, i32)>) -> Result<DyadicProfile> {
    let (n_min, n_max) = window.unwrap_or_else(|| default_window(s));
    if n_min > n_max {
        return Err(Error::InvalidArgument(format!("empty dyadic window [{n_min}, {n_max}]")));
    }
    let d = (n_min..=n_max)
        .map(|n| {
            let a = 2f64.powi(n);
            (a * s.l2sq(a, 2.0 * a)).sqrt()
        })
        .collect();
    let t = tails(s);
    let lo_cover = 2f64.powi(n_min);
    let hi_cover = 2f64.powi(n_max + 1);
    let supp = end_pieces(s).map(|(f, l)| (f.lo, l.hi));
    let inside_below = supp.map_or(true, |(lo, _)| lo >= lo_cover);
    let inside_above = supp.map_or(true, |(_, hi)| hi <= hi_cover);
    Ok(DyadicProfile {
        n_min,
        n_max,
        d,
        support_bounded_below: t.at_zero.is_none(),
        support_bounded_above: t.at_infinity.is_none(),
        decay_below: if inside_below { None } else { Some(t.at_zero.map_or(f64::INFINITY, |g| 1.0 + g)) },
        decay_above: if inside_above { None } else { Some(t.at_infinity.map_or(f64::NEG_INFINITY, |g| 1.0 + g)) },
    })
}

/// Geometric tail Σ_{j≥1} rʲ·first.
fn geometric_tail(first: f64, r: f64) -> f64 {
    if first == 0.0 {
        0.0
    } else if r >= 1.0 {
        f64::INFINITY
    } else {
        first * r / (1.0 - r)
    }
}

/// ‖φ‖_{X_p} as the dyadic sum `(Σ dₙᵖ)^{1/p}` (sup for `p = ∞`).
///
/// Cells outside the window are extrapolated from the end cells with the
/// ratio `2^{∓pκ}` implied by the tail exponents.
pub fn x_p_norm(prof: &DyadicProfile, p: f64) -> f64 {
    if prof.d.iter().any(|v| !v.is_finite()) {
        return f64::INFINITY;
    }
    if p.is_infinite() {
        if prof.decay_below.is_some_and(|k| k < 0.0) || prof.decay_above.is_some_and(|k| k > 0.0) {
            return f64::INFINITY;
        }
        return prof.d.iter().copied().fold(0.0, f64::max);
    }
    let mut sum: f64 = prof.d.iter().map(|v| v.powf(p)).sum();
    if let Some(k) = prof.decay_below {
        sum += geometric_tail(prof.d[0].powf(p), 2f64.powf(-p * k));
        if k <= 0.0 && prof.d[0] == 0.0 {
            sum = f64::INFINITY;
        }
    }
    if let Some(k) = prof.decay_above {
        sum += geometric_tail(prof.d[prof.d.len() - 1].powf(p), 2f64.powf(p * k));
        if k >= 0.0 && prof.d[prof.d.len() - 1] == 0.0 {
            sum = f64::INFINITY;
        }
    }
    sum.powf(1.0 / p)
}

/// Golden-section maximum of `f` on `[a, b]`.
fn golden_max(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> f64 {
    let r = 0.5 * (5f64.sqrt() - 1.0);
    let (mut c, mut d) = (b - r * (b - a), a + r * (b - a));
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..80 {
        if fc > fd {
            b = d;
            (d, fd) = (c, fc);
            c = b - r * (b - a);
            fc = f(c);
        } else {
            a = c;
            (c, fc) = (d, fd);
            d = a + r * (b - a);
            fd = f(d);
        }
    }
    fc.max(fd)
}

/// Sample points (x > 0) covering every piece, geometric inside each.
fn log_samples(s: &Symbol, per_piece: usize) -> Vec<f64> {
    let mut xs = Vec::new();
    for p in s.pieces() {
        let lo = if p.lo > 0.0 { p.lo } else { p.hi.min(1.0) * 2f64.powi(-40) };
        let hi = if p.hi.is_finite() { p.hi } else { lo.max(1.0) * 2f64.powi(40) };
        for k in 0..=per_piece {
            xs.push(lo * (hi / lo).powf(k as f64 / per_piece as f64));
        }
    }
    xs
}

/// `x ∫ₓ^∞ |φ|²`, the functional whose supremum bounds ‖Q_φ‖.
pub fn tail_functional(s: &Symbol, x: f64) -> f64 {
    x * s.tail_l2sq(x)
}

/// Boundedness and compactness data of `x ∫ₓ^∞ |φ|²`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TailFunctional {
    pub sup: f64,
    pub limit_at_zero: f64,
    pub limit_at_infinity: f64,
}

pub fn tail_functional_summary(s: &Symbol) -> TailFunctional {
    let t = tails(s);
    let locally_l2 = s.pieces().iter().all(|p| p.lo == 0.0 || p.f.weighted_abs2(p.lo, p.hi.min(p.lo * 2.0 + 1.0), 0).is_finite());
    // |φ|² ≍ x^{2g}: x·T(x) ≍ x^{2g+2}
    let limit_at_zero = match t.at_zero {
        None => 0.0,
        Some(g) if g > -1.0 => 0.0,
        Some(g) if g == -1.0 => {
            let first = end_pieces(s).expect("nonzero").0;
            let lead = first.f.eval(first.hi.min(1.0) * 1e-12).norm() * first.hi.min(1.0) * 1e-12;
            lead * lead
        }
        Some(_) => f64::INFINITY,
    };
    let limit_at_infinity = match t.at_infinity {
        None => 0.0,
        Some(g) if g < -1.0 => 0.0,
        Some(g) if g == -1.0 => {
            let last = end_pieces(s).expect("nonzero").1;
            let x = last.lo.max(1.0) * 1e12;
            let lead = last.f.eval(x).norm() * x;
            lead * lead
        }
        Some(_) => f64::INFINITY,
    };
    let mut sup = limit_at_zero.max(limit_at_infinity);
    if !locally_l2 {
        sup = f64::INFINITY;
    }
    if sup.is_finite() {
        let xs = log_samples(s, 48);
        let vals: Vec<f64> = xs.iter().map(|x| tail_functional(s, *x)).collect();
        if let Some((i, v)) = vals.iter().copied().enumerate().max_by(|a, b| a.1.total_cmp(&b.1)) {
            sup = sup.max(v);
            let lo = xs[i.saturating_sub(1)];
            let hi = xs[(i + 1).min(xs.len() - 1)];
            sup = sup.max(golden_max(|t| tail_functional(s, t.exp()), lo.ln(), hi.ln()));
        }
    }
    TailFunctional { sup, limit_at_zero, limit_at_infinity }
}

/// Q_φ bounded ⇔ `sup_x x∫ₓ^∞|φ|² < ∞`.
pub fn is_bounded(s: &Symbol) -> Verdict {
    let t = tail_functional_summary(s);
    Verdict::new(membership(t.sup.is_finite()), "bounded").with("sup_tail_functional", t.sup)
}

/// Q_φ compact ⇔ `x∫ₓ^∞|φ|² → 0` at both 0 and ∞.
pub fn is_compact(s: &Symbol) -> Verdict {
    let t = tail_functional_summary(s);
    let ok = t.sup.is_finite() && t.limit_at_zero == 0.0 && t.limit_at_infinity == 0.0;
    Verdict::new(membership(ok), "compact")
        .with("sup_tail_functional", t.sup)
        .with("limit_at_zero", t.limit_at_zero)
        .with("limit_at_infinity", t.limit_at_infinity)
}

/// ‖φ‖_{X_p} in the integral form `‖x^{1/2}(∫ₓ^∞|φ|²)^{1/2}‖_{L^p(dx/x)}`.
pub fn x_p_integral(s: &Symbol, p: f64) -> Result<f64> {
    if p.is_infinite() {
        return Ok(tail_functional_summary(s).sup.sqrt());
    }
    let prof = dyadic_profile(s, None)?;
    if !x_p_norm(&prof, p).is_finite() {
        return Ok(f64::INFINITY);
    }
    let Some((first, last)) = end_pieces(s) else {
        return Ok(0.0);
    };
    let f = |x: f64| (x * s.tail_l2sq(x)).powf(p / 2.0) / x;
    let mut acc = 0.0;
    if first.lo > 0.0 {
        // T is constant below the support
        acc += s.tail_l2sq(first.lo).powf(p / 2.0) * first.lo.powf(p / 2.0) * 2.0 / p;
    }
    let bps: Vec<f64> = s.breakpoints().into_iter().filter(|b| *b >= first.lo && *b <= last.hi).collect();
    for w in bps.windows(2) {
        acc += if w[1].is_infinite() {
            quad::integrate_semi_infinite(f, w[0], 1e-10, 1e-300)?
        } else {
            quad::integrate(f, w[0], w[1], 1e-10, 1e-300)?
        };
    }
    Ok(acc.powf(1.0 / p))
}

/// Exponents `(e_min, e_max)` of the nonconstant terms of a piece, so the
/// variation over `[2ⁿ, 2ⁿ⁺¹]` behaves like `2^{n·e}` near 0 resp. ∞.
fn variation_exponents(f: &PieceFn) -> Option<(f64, f64)> {
    match f {
        PieceFn::Poly { power, coeffs, .. } => {
            let es: Vec<f64> = coeffs
                .iter()
                .enumerate()
                .filter(|(k, c)| c.norm() > 0.0 && power + *k as f64 != 0.0)
                .map(|(k, _)| power + k as f64)
                .collect();
            let lo = es.iter().copied().fold(f64::INFINITY, f64::min);
            let hi = es.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            (!es.is_empty()).then_some((lo, hi))
        }
        PieceFn::Exp { terms } => terms.iter().any(|(k, c)| *k != 0.0 && c.norm() > 0.0).then_some((0.0, 0.0)),
    }
}

/// ‖φ‖_{Y_p} = `(Σₙ 2^{np}(∫_{[2ⁿ,2ⁿ⁺¹)}|dφ|)^p)^{1/p}`; +∞ unless φ(x) → 0.
///
/// Jumps are assigned to the cell containing them, a jump at `2ⁿ` to `[2ⁿ, 2ⁿ⁺¹)`.
pub fn y_p_norm(s: &Symbol, p: f64) -> Result<f64> {
    if s.limit_at_infinity() != Some(C64::new(0.0, 0.0)) {
        return Ok(f64::INFINITY);
    }
    let Some((first, last)) = end_pieces(s) else {
        return Ok(0.0);
    };
    let (n_min, n_max) = default_window(s);
    // jumps at the support ends sit exactly on the window edges
    let (n_min, n_max) = (n_min - 1, n_max + 1);
    let prof = s.variation_profile(n_min, n_max)?;
    let terms: Vec<f64> =
        (n_min..=n_max).zip(&prof.cell_variation).map(|(n, v)| (2f64.powi(n) * v).powf(p)).collect();
    if terms.iter().any(|t| !t.is_finite()) {
        return Ok(f64::INFINITY);
    }
    let mut sum: f64 = terms.iter().sum();
    if first.lo == 0.0 {
        if let Some((e, _)) = variation_exponents(&first.f) {
            // terms ≍ 2^{np(1+e)} as n → −∞
            sum += geometric_tail(terms[0], 2f64.powf(-p * (1.0 + e)));
            if 1.0 + e <= 0.0 {
                return Ok(f64::INFINITY);
            }
        }
    }
    if last.hi.is_infinite() {
        if let Some((_, e)) = variation_exponents(&last.f) {
            if 1.0 + e >= 0.0 {
                return Ok(f64::INFINITY);
            }
            sum += geometric_tail(terms[terms.len() - 1], 2f64.powf(p * (1.0 + e)));
        }
    }
    Ok(sum.powf(1.0 / p))
}

/// The equivalent form `(∫₀^∞ |x V_φ(x)|ᵖ dx/x)^{1/p}` of the Y_p norm.
pub fn y_p_integral(s: &Symbol, p: f64) -> Result<f64> {
    if !y_p_norm(s, p)?.is_finite() {
        return Ok(f64::INFINITY);
    }
    let Some((_, last)) = end_pieces(s) else {
        return Ok(0.0);
    };
    let f = |x: f64| (x * s.variation_tail(x).unwrap_or(f64::INFINITY)).powf(p) / x;
    let mut acc = 0.0;
    let mut bps = vec![0.0];
    bps.extend(s.breakpoints().into_iter().filter(|b| *b > 0.0 && *b <= last.hi));
    for w in bps.windows(2) {
        acc += if w[1].is_infinite() {
            quad::integrate_semi_infinite(f, w[0], 1e-10, 1e-300)?
        } else {
            quad::integrate(f, w[0], w[1], 1e-10, 1e-300)?
        };
    }
    Ok(acc.powf(1.0 / p))
}

/// Samples of (φ, φ') on a piece, avoiding the open left end.
fn piece_samples(p: &Piece, count: usize) -> impl Iterator<Item = (f64, C64, C64)> + '_ {
    let hi = if p.hi.is_finite() { p.hi } else { p.lo.max(1.0) * 1e8 };
    let lo = p.lo;
    (1..=count).map(move |k| {
        let t = k as f64 / count as f64;
        let x = if p.hi.is_finite() { lo + (hi - lo) * t } else { lo + (hi - lo) * t.powi(4) };
        (x, p.f.eval(x), p.f.deriv(x))
    })
}

/// Real, nonnegative and nonincreasing, checked piece by piece on samples
/// and across every breakpoint.
pub fn is_monotone_nonneg(s: &Symbol) -> bool {
    if !s.is_real() {
        return false;
    }
    let scale = s.pieces().iter().flat_map(|p| piece_samples(p, 8)).map(|(_, v, _)| v.norm()).fold(0.0, f64::max);
    let tol = 1e-12 * scale;
    let dtol = 1e-10 * (1.0 + scale);
    let mut prev = f64::INFINITY;
    let mut at = 0.0;
    for p in s.pieces() {
        if p.lo > at {
            if prev < -tol {
                return false;
            }
            prev = 0.0;
        }
        let left = (p.lo > 0.0).then(|| (p.lo, p.f.eval(p.lo), p.f.deriv(p.lo)));
        for (_, v, d) in left.into_iter().chain(piece_samples(p, 256)) {
            if v.re < -tol || d.re > dtol || v.re > prev + tol {
                return false;
            }
            prev = v.re;
        }
        at = p.hi;
    }
    prev >= -tol
}

/// Q_φ ≥ 0 ⇔ φ is nonnegative and nonincreasing.
pub fn is_positive_operator(s: &Symbol) -> Verdict {
    Verdict::new(membership(is_monotone_nonneg(s)), "monotone_nonneg")
}

/// trace Q_φ = ∫₀^∞ φ for φ ∈ L¹.
pub fn trace_value(s: &Symbol) -> Result<C64> {
    if !s.l1_norm()?.is_finite() {
        return Err(Error::NonIntegrable);
    }
    Ok(s.integral(0.0, f64::INFINITY))
}

/// Telescoped form `φ = Σ cᵢ χ_(0,xᵢ]` of a compactly supported step
/// function, with all `cᵢ ≠ 0`; `None` if φ is not a step function.
pub fn step_decomposition(s: &Symbol) -> Option<(Vec<f64>, Vec<C64>)> {
    if !s.is_piecewise_constant() {
        return None;
    }
    if let Some(last) = s.pieces().last() {
        if last.hi.is_infinite() && !last.f.is_zero() {
            return None;
        }
    }
    // piece values on consecutive intervals, gaps filled with zero
    let mut ends = Vec::new();
    let mut vals = Vec::new();
    let mut at = 0.0;
    for p in s.pieces() {
        if p.lo > at {
            ends.push(p.lo);
            vals.push(C64::new(0.0, 0.0));
        }
        ends.push(p.hi);
        vals.push(p.f.eval(p.hi.min(p.lo + 1.0)));
        at = p.hi;
    }
    let mut xs = Vec::new();
    let mut cs = Vec::new();
    for i in 0..vals.len() {
        let next = vals.get(i + 1).copied().unwrap_or(C64::new(0.0, 0.0));
        let c = vals[i] - next;
        if c != C64::new(0.0, 0.0) && ends[i].is_finite() {
            xs.push(ends[i]);
            cs.push(c);
        }
    }
    Some((xs, cs))
}

/// Rank of Q_φ for step symbols: the number of distinct steps after merging
/// equal neighbours; `None` when φ is not a step function.
pub fn detect_step(s: &Symbol) -> Option<usize> {
    step_decomposition(s).map(|(xs, _)| xs.len())
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KroneckerDet {
    /// `aₙ ∏ (aᵢ − aᵢ₊₁)`
    pub formula: C64,
    /// LU determinant of the matrix `(a_{max(i,j)})`.
    pub dense: C64,
}

impl KroneckerDet {
    pub fn relative_error(&self) -> f64 {
        let scale = self.formula.norm().max(self.dense.norm());
        if scale == 0.0 {
            0.0
        } else {
            (self.formula - self.dense).norm() / scale
        }
    }
}

/// Determinant of `(a_{max(i,j)})_{i,j=1..n}` in closed form, with the dense value alongside.
pub fn kronecker_det(a: &[C64]) -> Result<KroneckerDet> {
    let n = a.len();
    if n == 0 {
        return Err(Error::InvalidArgument("kronecker_det needs at least one value".into()));
    }
    let formula = a.windows(2).fold(a[n - 1], |acc, w| acc * (w[0] - w[1]));
    let m = DMatrix::from_fn(n, n, |i, j| a[i.max(j)]);
    Ok(KroneckerDet { formula, dense: m.determinant() })
}

/// `∫₀^∞ x^{p−1}|φ|ᵖ dx`, finite iff `xφ(x) ∈ L^p(dx/x)`.
fn weighted_lp(s: &Symbol, p: f64) -> Result<f64> {
    let t = tails(s);
    if t.at_zero.is_some_and(|g| g <= -1.0) || t.at_infinity.is_some_and(|g| g >= -1.0) {
        return Ok(f64::INFINITY);
    }
    let mut acc = 0.0;
    for piece in s.pieces().iter().filter(|p| !p.f.is_zero()) {
        acc += quad_weighted(piece, p)?;
    }
    Ok(acc)
}

fn quad_weighted(piece: &Piece, p: f64) -> Result<f64> {
    let f = |x: f64| x.powf(p - 1.0) * piece.f.eval(x).norm().powf(p);
    if piece.hi.is_infinite() {
        quad::integrate_semi_infinite(f, piece.lo, 1e-10, 1e-300)
    } else {
        quad::integrate(f, piece.lo, piece.hi, 1e-10, 1e-300)
    }
}

/// `Σ_k ω₂(|I|2^{−k}) ln 2`, the dyadic discretisation of `∫₀^{|I|} ω₂(t) dt/t`,
/// or +∞ when the terms fail to decay geometrically.
pub fn dini_integral(s: &Symbol, interval: Interval) -> Result<f64> {
    const LEVELS: usize = 40;
    let mut terms = Vec::with_capacity(LEVELS);
    for k in 0..LEVELS {
        terms.push(s.modulus(interval, interval.len() * 2f64.powi(-(k as i32)), ModulusOrder::L2)?);
    }
    let tail = &terms[LEVELS - 8..];
    if tail[0] == 0.0 {
        return Ok(terms.iter().sum::<f64>() * std::f64::consts::LN_2);
    }
    let ratio = (tail[7] / tail[0]).powf(1.0 / 7.0);
    if !(ratio < 0.98) {
        return Ok(f64::INFINITY);
    }
    let sum: f64 = terms.iter().sum::<f64>() + geometric_tail(tail[7], ratio);
    Ok(sum * std::f64::consts::LN_2)
}

/// Three-valued Schatten-class verdict for Q_φ ∈ S_p.
///
/// * p > 1: exact, by finiteness of the X_p norm.
/// * 1/2 < p ≤ 1: exact for nonnegative nonincreasing φ (`xφ ∈ L^p(dx/x)`);
///   otherwise sufficient conditions (Y_p, Dini modulus for p = 1) and
///   necessary ones (φ ∈ L¹, X_p).
/// * p ≤ 1/2: step symbols are finite rank; a piecewise C¹ symbol with
///   φ' ≠ 0 on a set of positive measure is never in S_{1/2}.
pub fn classify_schatten(s: &Symbol, p: f64) -> Verdict {
    match classify_inner(s, p) {
        Ok(v) => v,
        Err(_) => Verdict::new(Membership::Unknown, "numeric_failure"),
    }
}

fn classify_inner(s: &Symbol, p: f64) -> Result<Verdict> {
    if !(p > 0.0) {
        return Err(Error::InvalidArgument(format!("Schatten exponent must be positive, got {p}")));
    }
    let compact = is_compact(s);
    if !compact.is_in() {
        return Ok(Verdict { verdict: Membership::DefinitelyOut, ..compact });
    }
    if let Some(rank) = detect_step(s) {
        return Ok(Verdict::new(Membership::DefinitelyIn, "finite_rank").with("rank", rank as f64));
    }
    let prof = dyadic_profile(s, None)?;
    let xp = x_p_norm(&prof, p);
    if p > 1.0 {
        return Ok(Verdict::new(membership(xp.is_finite()), "x_p_norm").with("x_p", xp));
    }
    if p > 0.5 {
        if is_monotone_nonneg(s) {
            let w = weighted_lp(s, p)?;
            return Ok(Verdict::new(membership(w.is_finite()), "monotone_weighted_lp")
                .with("weighted_lp", w.powf(1.0 / p))
                .with("x_p", xp));
        }
        let yp = y_p_norm(s, p).unwrap_or(f64::INFINITY);
        if yp.is_finite() {
            return Ok(Verdict::new(Membership::DefinitelyIn, "y_p_norm").with("y_p", yp).with("x_p", xp));
        }
        let support = s.support();
        if p == 1.0 && support.is_finite() {
            let iv = Interval::new(0.0, support.hi)?;
            let dini = dini_integral(s, iv)?;
            if dini.is_finite() {
                return Ok(Verdict::new(Membership::DefinitelyIn, "dini_modulus").with("dini", dini).with("x_p", xp));
            }
        }
        let l1 = s.l1_norm()?;
        if !l1.is_finite() {
            return Ok(Verdict::new(Membership::DefinitelyOut, "l1_necessary").with("l1", l1));
        }
        if !xp.is_finite() {
            return Ok(Verdict::new(Membership::DefinitelyOut, "x_p_norm").with("x_p", xp));
        }
        return Ok(Verdict::new(Membership::Unknown, "undecided").with("x_p", xp));
    }
    if s.is_piecewise_c1() && !s.is_piecewise_constant() {
        return Ok(Verdict::new(Membership::DefinitelyOut, "nonzero_derivative"));
    }
    Ok(Verdict::new(Membership::Unknown, "undecided"))
}

#[cfg(test)]
mod tests;
