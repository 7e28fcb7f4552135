//! Symbols φ: ℝ₊ → ℂ generating the kernel φ(max{x, y}).
//!
//! A [`Symbol`] is one of four closed forms (step, piecewise polynomial,
//! trigonometric polynomial, sampled grid). Internally each is lowered to a
//! sorted list of pieces on half-open intervals `(lo, hi]`; every exact
//! computation downstream (cell integrals, variation, Fourier coefficients,
//! step detection) works on that list.

mod json;
pub(crate) mod piece;

use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::{quad, Error, Result, C64};
pub(crate) use piece::{Piece, PieceFn};

pub use json::SymbolJson;

const ZERO: C64 = C64::new(0.0, 0.0);

/// A subinterval of `[0, ∞]` with `0 ≤ lo < hi`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if !(lo >= 0.0 && lo < hi) || lo.is_nan() || hi.is_nan() {
            return Err(Error::EmptyInterval { lo, hi });
        }
        Ok(Interval { lo, hi })
    }

    pub fn unit() -> Self {
        Interval { lo: 0.0, hi: 1.0 }
    }

    pub fn len(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn is_finite(&self) -> bool {
        self.hi.is_finite()
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Interpolation {
    /// Value `v_i` on `(g_i, g_{i+1}]`; the last sample only closes the grid.
    Constant,
    Linear,
}

#[derive(Clone, Debug, PartialEq)]
pub enum SymbolKind {
    /// Value `values[i]` on `(x_{i−1}, x_i]` with `x_{−1} = 0`, zero beyond `x_N`.
    Step { breakpoints: Vec<f64>, values: Vec<C64> },
    /// Piece `i` on `(b_i, b_{i+1}]` is `x^{powers[i]} Σ_k coeffs[i][k] x^k`.
    /// The last breakpoint may be `+∞`.
    PiecewisePoly { breakpoints: Vec<f64>, coeffs: Vec<Vec<C64>>, powers: Vec<f64> },
    /// `Σ_{|n|≤M} a_n e^{2πinx/b}`, coefficients stored from `a_{−M}` to `a_M`.
    TrigPoly { period: f64, coeffs: Vec<C64>, periodic: bool },
    Sampled { grid: Vec<f64>, values: Vec<C64>, interp: Interpolation },
}

impl SymbolKind {
    pub fn name(&self) -> &'static str {
        match self {
            SymbolKind::Step { .. } => "step",
            SymbolKind::PiecewisePoly { .. } => "ppoly",
            SymbolKind::TrigPoly { .. } => "trig",
            SymbolKind::Sampled { .. } => "sampled",
        }
    }
}

/// Immutable description of a symbol φ.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SymbolJson", into = "SymbolJson")]
pub struct Symbol {
    kind: SymbolKind,
    real: bool,
    support: Interval,
    pieces: Vec<Piece>,
}

fn cvec(v: &[f64]) -> Vec<C64> {
    v.iter().map(|x| C64::new(*x, 0.0)).collect()
}

fn strictly_increasing(xs: &[f64]) -> bool {
    xs.windows(2).all(|w| w[0] < w[1])
}

impl Symbol {
    fn build(kind: SymbolKind) -> Result<Self> {
        let (pieces, real) = lower(&kind)?;
        let lo = pieces.first().map_or(0.0, |p| p.lo);
        let hi = pieces.last().map_or(1.0, |p| p.hi);
        let support = Interval { lo, hi };
        Ok(Symbol { kind, real, support, pieces })
    }

    pub fn step(breakpoints: Vec<f64>, values: Vec<C64>) -> Result<Self> {
        Self::build(SymbolKind::Step { breakpoints, values })
    }

    pub fn step_real(breakpoints: &[f64], values: &[f64]) -> Result<Self> {
        Self::step(breakpoints.to_vec(), cvec(values))
    }

    pub fn ppoly(breakpoints: Vec<f64>, coeffs: Vec<Vec<C64>>, powers: Option<Vec<f64>>) -> Result<Self> {
        let powers = powers.unwrap_or_else(|| vec![0.0; coeffs.len()]);
        Self::build(SymbolKind::PiecewisePoly { breakpoints, coeffs, powers })
    }

    /// Single real polynomial piece on `(lo, hi]`.
    pub fn poly_on(lo: f64, hi: f64, coeffs: &[f64]) -> Result<Self> {
        Self::ppoly(vec![lo, hi], vec![cvec(coeffs)], None)
    }

    /// `x^power · Σ coeffs[k] x^k` on `(lo, hi]`.
    pub fn power_on(lo: f64, hi: f64, power: f64, coeffs: &[f64]) -> Result<Self> {
        Self::ppoly(vec![lo, hi], vec![cvec(coeffs)], Some(vec![power]))
    }

    pub fn trig(period: f64, coeffs: Vec<C64>, periodic: bool) -> Result<Self> {
        Self::build(SymbolKind::TrigPoly { period, coeffs, periodic })
    }

    pub fn sampled(grid: Vec<f64>, values: Vec<C64>, interp: Interpolation) -> Result<Self> {
        Self::build(SymbolKind::Sampled { grid, values, interp })
    }

    pub fn sampled_real(grid: &[f64], values: &[f64], interp: Interpolation) -> Result<Self> {
        Self::sampled(grid.to_vec(), cvec(values), interp)
    }

    /// Indicator of `(0, a]`.
    pub fn indicator(a: f64) -> Result<Self> {
        Self::step_real(&[a], &[1.0])
    }

    pub fn zero() -> Self {
        Self::step_real(&[1.0], &[0.0]).expect("valid")
    }

    pub fn kind(&self) -> &SymbolKind {
        &self.kind
    }

    pub fn is_real(&self) -> bool {
        self.real
    }

    pub fn support(&self) -> Interval {
        self.support
    }

    pub(crate) fn pieces(&self) -> &[Piece] {
        &self.pieces
    }

    /// All piece boundaries, including the support ends.
    pub fn breakpoints(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.pieces.len() + 1);
        if let Some(p) = self.pieces.first() {
            out.push(p.lo);
        }
        out.extend(self.pieces.iter().map(|p| p.hi));
        out
    }

    fn piece_at(&self, x: f64) -> Option<&Piece> {
        let idx = self.pieces.partition_point(|p| p.hi < x);
        self.pieces.get(idx).filter(|p| p.contains(x))
    }

    /// φ(x); zero outside the support.
    pub fn eval(&self, x: f64) -> C64 {
        self.piece_at(x).map_or(ZERO, |p| p.f.eval(x))
    }

    /// φ'(x) where it exists; zero outside the support.
    pub fn deriv(&self, x: f64) -> C64 {
        self.piece_at(x).map_or(ZERO, |p| p.f.deriv(x))
    }

    /// `true` if every piece is identically zero.
    pub fn is_zero(&self) -> bool {
        self.pieces.iter().all(|p| p.f.is_zero())
    }

    /// φ' = 0 a.e. (all pieces constant).
    pub fn is_piecewise_constant(&self) -> bool {
        self.pieces.iter().all(|p| p.f.is_constant())
    }

    /// Piecewise C¹ in the sense used by the smoothness-based criteria:
    /// polynomial, exponential or piecewise-linear pieces.
    pub fn is_piecewise_c1(&self) -> bool {
        !matches!(self.kind, SymbolKind::Sampled { interp: Interpolation::Constant, .. })
            || self.is_piecewise_constant()
    }

    /// Sum over pieces of `f(piece, a', b')` for the part of `[a, b]` inside each piece.
    pub(crate) fn over_pieces<T, F>(&self, a: f64, b: f64, mut f: F) -> Vec<T>
    where
        F: FnMut(&Piece, f64, f64) -> T,
    {
        let start = self.pieces.partition_point(|p| p.hi <= a);
        let mut out = Vec::new();
        for p in &self.pieces[start..] {
            if p.lo >= b {
                break;
            }
            let lo = p.lo.max(a);
            let hi = p.hi.min(b);
            if lo < hi {
                out.push(f(p, lo, hi));
            }
        }
        out
    }

    /// ∫ₐᵇ φ.
    pub fn integral(&self, a: f64, b: f64) -> C64 {
        self.over_pieces(a, b, |p, lo, hi| p.f.integral(lo, hi)).into_iter().sum()
    }

    /// ∫ₐᵇ φ(x)(x − a) dx.
    pub fn moment(&self, a: f64, b: f64) -> C64 {
        self.over_pieces(a, b, |p, lo, hi| p.f.moment(lo, hi) + p.f.integral(lo, hi) * (lo - a))
            .into_iter()
            .sum()
    }

    /// ∫ₐᵇ |φ|².
    pub fn l2sq(&self, a: f64, b: f64) -> f64 {
        self.over_pieces(a, b, |p, lo, hi| p.f.weighted_abs2(lo, hi, 0)).into_iter().sum()
    }

    /// ∫ₐᵇ x|φ(x)|² dx.
    pub fn x_l2sq(&self, a: f64, b: f64) -> f64 {
        self.over_pieces(a, b, |p, lo, hi| p.f.weighted_abs2(lo, hi, 1)).into_iter().sum()
    }

    /// Tail energy ∫ₓ^∞ |φ|².
    pub fn tail_l2sq(&self, x: f64) -> f64 {
        self.l2sq(x, f64::INFINITY)
    }

    /// ∫₀^∞ |φ|, by adaptive quadrature per piece; +∞ when divergent.
    pub fn l1_norm(&self) -> Result<f64> {
        if let Some(last) = self.pieces.last() {
            if last.hi.is_infinite() && last.f.growth_exponent() >= -1.0 {
                return Ok(f64::INFINITY);
            }
        }
        if let Some(first) = self.pieces.first() {
            if first.lo == 0.0 && first.f.origin_exponent() <= -1.0 {
                return Ok(f64::INFINITY);
            }
        }
        let mut acc = 0.0;
        for p in &self.pieces {
            acc += match &p.f {
                PieceFn::Poly { coeffs, power, .. } if coeffs.len() <= 1 && *power == 0.0 => {
                    coeffs.first().map_or(0.0, |c| c.norm()) * (p.hi - p.lo)
                }
                f => f.integrate_with(p.lo, p.hi, |v, _| v.norm())?,
            };
        }
        Ok(acc)
    }

    /// x ↦ t·φ(t·x); the support maps to `t⁻¹·support`.
    pub fn scale(&self, t: f64) -> Result<Symbol> {
        if !(t > 0.0 && t.is_finite()) {
            return Err(Error::InvalidArgument(format!("scale factor must be positive, got {t}")));
        }
        let kind = match &self.kind {
            SymbolKind::Step { breakpoints, values } => SymbolKind::Step {
                breakpoints: breakpoints.iter().map(|x| x / t).collect(),
                values: values.iter().map(|v| v * t).collect(),
            },
            SymbolKind::PiecewisePoly { breakpoints, coeffs, powers } => SymbolKind::PiecewisePoly {
                breakpoints: breakpoints.iter().map(|x| x / t).collect(),
                coeffs: coeffs
                    .iter()
                    .zip(powers)
                    .map(|(cs, beta)| {
                        cs.iter().enumerate().map(|(k, c)| c * t.powf(k as f64 + 1.0 + beta)).collect()
                    })
                    .collect(),
                powers: powers.clone(),
            },
            SymbolKind::TrigPoly { period, coeffs, periodic } => SymbolKind::TrigPoly {
                period: period / t,
                coeffs: coeffs.iter().map(|c| c * t).collect(),
                periodic: *periodic,
            },
            SymbolKind::Sampled { grid, values, interp } => SymbolKind::Sampled {
                grid: grid.iter().map(|x| x / t).collect(),
                values: values.iter().map(|v| v * t).collect(),
                interp: *interp,
            },
        };
        Symbol::build(kind)
    }

    /// Symbol minus `c·χ_(0,a]`; used to enforce φ(1) = 0 before shooting.
    pub fn subtract_indicator(&self, c: C64, a: f64) -> Result<Symbol> {
        match &self.kind {
            SymbolKind::PiecewisePoly { breakpoints, coeffs, powers } if powers.iter().all(|p| *p == 0.0) => {
                if breakpoints.last().copied() != Some(a) || breakpoints[0] != 0.0 {
                    return Err(Error::InvalidArgument("indicator must match the support (0, a]".into()));
                }
                let coeffs = coeffs
                    .iter()
                    .map(|cs| {
                        let mut cs = cs.clone();
                        if cs.is_empty() {
                            cs.push(ZERO);
                        }
                        cs[0] -= c;
                        cs
                    })
                    .collect();
                Symbol::ppoly(breakpoints.clone(), coeffs, None)
            }
            SymbolKind::Step { breakpoints, values } if breakpoints.last().copied() == Some(a) => {
                Symbol::step(breakpoints.clone(), values.iter().map(|v| v - c).collect())
            }
            _ => Err(Error::UnsupportedVariant { op: "subtract_indicator", variant: self.kind.name() }),
        }
    }

    fn bv_supported(&self, op: &'static str) -> Result<()> {
        if let SymbolKind::TrigPoly { periodic: true, .. } = self.kind {
            if !self.is_zero() {
                return Err(Error::UnsupportedVariant { op, variant: "periodic trig" });
            }
        }
        Ok(())
    }

    /// Jumps `(position, |φ(b+) − φ(b)|)` at piece boundaries, including the
    /// jump from 0 at a positive support start and the terminal jump to 0.
    pub fn jumps(&self) -> Vec<(f64, f64)> {
        let mut out = Vec::new();
        if let Some(first) = self.pieces.first() {
            if first.lo > 0.0 {
                out.push((first.lo, first.f.eval(first.lo).norm()));
            }
        }
        for w in self.pieces.windows(2) {
            let b = w[0].hi;
            let left = w[0].f.eval(b);
            let right = if w[1].lo == b { w[1].f.eval(b) } else { ZERO };
            out.push((b, (right - left).norm()));
            if w[1].lo > b {
                out.push((w[1].lo, w[1].f.eval(w[1].lo).norm()));
            }
        }
        if let Some(last) = self.pieces.last() {
            if last.hi.is_finite() {
                out.push((last.hi, last.f.eval(last.hi).norm()));
            }
        }
        out.retain(|(_, j)| *j > 0.0);
        out
    }

    /// `|dφ|` of the half-open set `[a, b)`: absolutely continuous part plus
    /// the jumps located in `[a, b)`.
    pub fn variation_on(&self, a: f64, b: f64) -> Result<f64> {
        self.bv_supported("variation")?;
        let mut acc = 0.0;
        for v in self.over_pieces(a, b, |p, lo, hi| p.variation(lo, hi)) {
            acc += v?;
        }
        acc += self.jumps().iter().filter(|(x, _)| *x >= a && *x < b).map(|(_, j)| j).sum::<f64>();
        Ok(acc)
    }

    /// V_φ(x) = |dφ|((x, ∞)); nonincreasing and right-continuous in x.
    pub fn variation_tail(&self, x: f64) -> Result<f64> {
        self.bv_supported("variation_tail")?;
        let mut acc = 0.0;
        for v in self.over_pieces(x, f64::INFINITY, |p, lo, hi| p.variation(lo, hi)) {
            acc += v?;
        }
        acc += self.jumps().iter().filter(|(b, _)| *b > x).map(|(_, j)| j).sum::<f64>();
        Ok(acc)
    }

    /// lim_{x→∞} φ(x) when it exists (zero for bounded support).
    pub fn limit_at_infinity(&self) -> Option<C64> {
        match self.pieces.last() {
            None => Some(ZERO),
            Some(p) if p.hi.is_finite() => Some(ZERO),
            Some(p) => {
                let e = p.f.growth_exponent();
                if e < 0.0 {
                    Some(ZERO)
                } else if p.f.is_constant() {
                    Some(p.f.eval(p.lo + 1.0))
                } else {
                    None
                }
            }
        }
    }

    /// Per-cell variation data over the dyadic cells `[2ⁿ, 2ⁿ⁺¹)`, `n_min ≤ n ≤ n_max`.
    pub fn variation_profile(&self, n_min: i32, n_max: i32) -> Result<VariationProfile> {
        let mut cell_variation = Vec::new();
        let mut cell_sup = Vec::new();
        for n in n_min..=n_max {
            let (a, b) = (2f64.powi(n), 2f64.powi(n + 1));
            cell_variation.push(self.variation_on(a, b)?);
            cell_sup.push(self.sup_abs(a, b));
        }
        Ok(VariationProfile { n_min, n_max, cell_variation, cell_sup, tail_limit: self.limit_at_infinity() })
    }

    /// Sampled estimate of sup |φ| on (a, b].
    fn sup_abs(&self, a: f64, b: f64) -> f64 {
        let mut best: f64 = 0.0;
        for (lo, hi) in self.over_pieces(a, b, |_, lo, hi| (lo, hi)) {
            let hi = if hi.is_infinite() { lo * 1e6 + 1e6 } else { hi };
            for k in 0..=64 {
                let x = lo + (hi - lo) * (k as f64 / 64.0);
                if x > 0.0 {
                    best = best.max(self.eval(x).norm());
                }
            }
            best = best.max(self.eval(hi).norm());
        }
        best
    }

    /// Standard (p = ∞) or L² (p = 2) modulus of continuity of φ on `I`.
    ///
    /// Both suprema are approximated on finite sets (a sample grid enriched
    /// with the breakpoints for p = ∞, a 64-point geometric grid of shifts
    /// for p = 2), so the result is a lower-bound estimate.
    pub fn modulus(&self, interval: Interval, h: f64, p: ModulusOrder) -> Result<f64> {
        if !interval.is_finite() {
            return Err(Error::UnboundedInterval { lo: interval.lo, hi: interval.hi });
        }
        if !(h > 0.0) || h > interval.len() * (1.0 + 1e-12) {
            return Err(Error::InvalidArgument(format!("modulus step h = {h} must lie in (0, |I|]")));
        }
        match p {
            ModulusOrder::Sup => Ok(self.modulus_sup(interval, h)),
            ModulusOrder::L2 => self.modulus_l2(interval, h),
        }
    }

    fn modulus_sup(&self, iv: Interval, h: f64) -> f64 {
        const SAMPLES: usize = 4000;
        let eps = 1e-12 * iv.hi.max(1.0);
        let mut xs: Vec<f64> = (0..=SAMPLES).map(|k| iv.lo + iv.len() * k as f64 / SAMPLES as f64).collect();
        for b in self.breakpoints() {
            for x in [b - eps, b, b + eps] {
                if iv.contains(x) {
                    xs.push(x);
                }
            }
        }
        xs.sort_by(f64::total_cmp);
        xs.dedup();
        xs.retain(|x| *x > 0.0);
        let vals: Vec<C64> = xs.iter().map(|x| self.eval(*x)).collect();
        let mut best: f64 = 0.0;
        for i in 0..xs.len() {
            let y = xs[i] + h;
            if iv.contains(y) {
                best = best.max((self.eval(y) - vals[i]).norm());
            }
            let mut j = i + 1;
            while j < xs.len() && xs[j] - xs[i] <= h * (1.0 + 1e-12) {
                best = best.max((vals[j] - vals[i]).norm());
                j += 1;
            }
        }
        best
    }

    fn shift_l2(&self, iv: Interval, s: f64) -> Result<f64> {
        let (lo, hi) = (iv.lo, iv.hi - s);
        if hi <= lo {
            return Ok(0.0);
        }
        let mut cuts = vec![lo, hi];
        for b in self.breakpoints() {
            for c in [b, b - s] {
                if c > lo && c < hi {
                    cuts.push(c);
                }
            }
        }
        cuts.sort_by(f64::total_cmp);
        cuts.dedup();
        let f = |x: f64| (self.eval(x + s) - self.eval(x)).norm_sqr();
        // between cuts the integrand is a polynomial or trigonometric sum
        // unless a piece carries a fractional power; rounding noise in the
        // difference for tiny shifts would defeat an adaptive error estimate
        let mut freq: f64 = 0.0;
        let analytic = self.pieces.iter().all(|p| match &p.f {
            PieceFn::Poly { power, .. } => *power == 0.0,
            PieceFn::Exp { terms } => {
                freq = terms.iter().fold(freq, |m, (k, _)| m.max(k.abs()));
                true
            }
        });
        let mut acc = 0.0;
        for w in cuts.windows(2) {
            acc += if analytic {
                let panels = 4 + (freq * (w[1] - w[0])).ceil() as usize;
                quad::gauss_legendre_c(|x| C64::new(f(x), 0.0), w[0], w[1], panels).re
            } else {
                match quad::integrate(f, w[0], w[1], 1e-10, 1e-300) {
                    Ok(v) => v,
                    Err(_) => quad::gauss_legendre_c(|x| C64::new(f(x), 0.0), w[0], w[1], 64).re,
                }
            };
        }
        Ok(acc.sqrt())
    }

    fn modulus_l2(&self, iv: Interval, h: f64) -> Result<f64> {
        let mut best: f64 = 0.0;
        for k in 0..64 {
            let s = h * 2f64.powf(-(k as f64) / 8.0);
            best = best.max(self.shift_l2(iv, s)?);
        }
        Ok(best)
    }
}

/// Order of a modulus of continuity.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ModulusOrder {
    L2,
    Sup,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VariationProfile {
    pub n_min: i32,
    pub n_max: i32,
    /// ∫_{[2ⁿ,2ⁿ⁺¹)} |dφ|
    pub cell_variation: Vec<f64>,
    pub cell_sup: Vec<f64>,
    pub tail_limit: Option<C64>,
}

/// φ♥(t) = 2 φ(e^{2t}) e^{2t}; maps the half-line multiplicatively onto ℝ,
/// which is what exponentially graded grids are built from.
pub fn heart_transform(s: &Symbol) -> impl Fn(f64) -> C64 + Send + Sync + '_ {
    move |t: f64| {
        let x = (2.0 * t).exp();
        s.eval(x) * (2.0 * x)
    }
}

/// Edges of an exponentially graded grid on `[lo, hi]` (`lo > 0`): uniform
/// in the variable `t` of [`heart_transform`], i.e. `x = e^{2t}`.
pub fn heart_graded_edges(lo: f64, hi: f64, cells: usize) -> Vec<f64> {
    let (t0, t1) = (0.5 * lo.ln(), 0.5 * hi.ln());
    let mut e: Vec<f64> = (0..=cells).map(|k| (2.0 * (t0 + (t1 - t0) * k as f64 / cells as f64)).exp()).collect();
    e[0] = lo;
    e[cells] = hi;
    e
}

fn lower(kind: &SymbolKind) -> Result<(Vec<Piece>, bool)> {
    let is_real = |v: &[C64]| v.iter().all(|c| c.im == 0.0);
    match kind {
        SymbolKind::Step { breakpoints, values } => {
            if breakpoints.is_empty() {
                return Err(Error::InvalidSymbol("step symbol needs at least one breakpoint".into()));
            }
            if breakpoints.len() != values.len() {
                return Err(Error::InvalidSymbol(format!(
                    "step symbol has {} breakpoints but {} values",
                    breakpoints.len(),
                    values.len()
                )));
            }
            if !(breakpoints[0] > 0.0) || !strictly_increasing(breakpoints) {
                return Err(Error::InvalidSymbol("step breakpoints must be positive and strictly increasing".into()));
            }
            for x in breakpoints {
                piece::check_finite(*x, "step breakpoint")?;
            }
            let mut lo = 0.0;
            let pieces = breakpoints
                .iter()
                .zip(values)
                .map(|(&hi, &v)| {
                    let p = Piece { lo, hi, f: PieceFn::constant(v) };
                    lo = hi;
                    p
                })
                .collect();
            Ok((pieces, is_real(values)))
        }
        SymbolKind::PiecewisePoly { breakpoints, coeffs, powers } => {
            if breakpoints.len() != coeffs.len() + 1 || coeffs.is_empty() {
                return Err(Error::InvalidSymbol("ppoly needs one more breakpoint than pieces".into()));
            }
            if powers.len() != coeffs.len() {
                return Err(Error::InvalidSymbol("ppoly powers must match the piece count".into()));
            }
            if !(breakpoints[0] >= 0.0) || !strictly_increasing(breakpoints) {
                return Err(Error::InvalidSymbol("ppoly breakpoints must be nonnegative and strictly increasing".into()));
            }
            if breakpoints[..breakpoints.len() - 1].iter().any(|x| !x.is_finite()) {
                return Err(Error::InvalidSymbol("only the last ppoly breakpoint may be infinite".into()));
            }
            let pieces = breakpoints
                .windows(2)
                .zip(coeffs.iter().zip(powers))
                .map(|(w, (cs, beta))| {
                    let mut cs = cs.clone();
                    while cs.last() == Some(&ZERO) {
                        cs.pop();
                    }
                    Piece { lo: w[0], hi: w[1], f: PieceFn::Poly { origin: 0.0, power: *beta, coeffs: cs } }
                })
                .collect();
            Ok((pieces, coeffs.iter().all(|c| is_real(c))))
        }
        SymbolKind::TrigPoly { period, coeffs, periodic } => {
            if !(*period > 0.0 && period.is_finite()) {
                return Err(Error::InvalidSymbol("trig period must be positive".into()));
            }
            if coeffs.len() % 2 != 1 {
                return Err(Error::InvalidSymbol("trig coefficients must list a_{-M}..a_M (odd length)".into()));
            }
            let m = (coeffs.len() / 2) as i64;
            let terms: Vec<(f64, C64)> = coeffs
                .iter()
                .enumerate()
                .filter(|(_, c)| **c != ZERO)
                .map(|(i, c)| (2.0 * PI * (i as i64 - m) as f64 / period, *c))
                .collect();
            let real = (0..coeffs.len()).all(|i| {
                let j = coeffs.len() - 1 - i;
                (coeffs[i] - coeffs[j].conj()).norm() <= 1e-15 * (1.0 + coeffs[i].norm())
            });
            let hi = if *periodic { f64::INFINITY } else { *period };
            Ok((vec![Piece { lo: 0.0, hi, f: PieceFn::Exp { terms } }], real))
        }
        SymbolKind::Sampled { grid, values, interp } => {
            if grid.len() < 2 || grid.len() != values.len() {
                return Err(Error::InvalidSymbol("sampled symbol needs ≥ 2 grid points, one value each".into()));
            }
            if !(grid[0] >= 0.0) || !strictly_increasing(grid) || grid.iter().any(|x| !x.is_finite()) {
                return Err(Error::InvalidSymbol("sampled grid must be finite, nonnegative, strictly increasing".into()));
            }
            let pieces = grid
                .windows(2)
                .zip(values.windows(2))
                .map(|(g, v)| {
                    let f = match interp {
                        Interpolation::Constant => PieceFn::constant(v[0]),
                        Interpolation::Linear => {
                            let slope = (v[1] - v[0]) / (g[1] - g[0]);
                            PieceFn::Poly { origin: g[0], power: 0.0, coeffs: vec![v[0], slope] }
                        }
                    };
                    Piece { lo: g[0], hi: g[1], f }
                })
                .collect();
            Ok((pieces, is_real(values)))
        }
    }
}

#[cfg(test)]
mod tests;
