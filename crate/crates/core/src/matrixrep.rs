//! Fourier-side representations: the weighted Hankel matrix of a periodic
//! symbol and the exactly solvable exponential symbol.

use nalgebra::DMatrix;
use serde::Serialize;
use std::f64::consts::PI;

use crate::discretize::{Method, SpectrumEstimate};
use crate::symbols::{PieceFn, Symbol, SymbolKind};
use crate::{quad, Error, Result, C64};

const CZERO: C64 = C64::new(0.0, 0.0);

/// `a_n = b⁻¹ ∫₀ᵇ φ(t) e^{−2πint/b} dt` for `|n| ≤ M`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FourierCoefficients {
    pub period: f64,
    pub window: usize,
    /// `values[M + n] = a_n`
    pub values: Vec<C64>,
}

impl FourierCoefficients {
    pub fn from_values(period: f64, values: Vec<C64>) -> Result<Self> {
        if values.len() % 2 != 1 {
            return Err(Error::InvalidArgument("coefficients must list a_{-M}..a_M".into()));
        }
        Ok(FourierCoefficients { period, window: values.len() / 2, values })
    }

    /// `a_n`, zero outside the window.
    pub fn get(&self, n: i64) -> C64 {
        let m = self.window as i64;
        if n.abs() > m {
            CZERO
        } else {
            self.values[(n + m) as usize]
        }
    }

    pub fn energy(&self) -> f64 {
        self.values.iter().map(|c| c.norm_sqr()).sum()
    }

    /// `a_{−n} = conj(a_n)` for every n in the window.
    pub fn is_conjugate_symmetric(&self, tol: f64) -> bool {
        let m = self.window as i64;
        (0..=m).all(|n| (self.get(-n) - self.get(n).conj()).norm() <= tol * (1.0 + self.get(n).norm()))
    }
}

/// ∫ₐᵇ f(x) e^{−iκx} dx for one piece.
fn piece_fourier(f: &PieceFn, a: f64, b: f64, kappa: f64) -> Result<C64> {
    match f {
        PieceFn::Exp { terms } => {
            let shifted = PieceFn::Exp { terms: terms.iter().map(|(k, c)| (k - kappa, *c)).collect() };
            Ok(shifted.integral(a, b))
        }
        PieceFn::Poly { power, coeffs, .. } if *power == 0.0 => {
            let deg = coeffs.len().saturating_sub(1);
            let panels = 1 + ((kappa.abs() * (b - a)).ceil() as usize) + deg / 8;
            Ok(quad::gauss_legendre_c(|x| f.eval(x) * C64::new(0.0, -kappa * x).exp(), a, b, panels))
        }
        PieceFn::Poly { .. } => quad::integrate_c(|x| f.eval(x) * C64::new(0.0, -kappa * x).exp(), a, b, 1e-13, 1e-15),
    }
}

/// Fourier coefficients over one period `[0, b]`.
///
/// The period is the trigonometric period for trig symbols and the right
/// end of the support otherwise (the symbol is then extended periodically).
pub fn fourier_coeffs(s: &Symbol, m: usize, period: Option<f64>) -> Result<FourierCoefficients> {
    if let SymbolKind::TrigPoly { period: b, coeffs, .. } = s.kind() {
        if period.is_none_or(|p| p == *b) {
            let have = (coeffs.len() / 2) as i64;
            let values = (-(m as i64)..=m as i64)
                .map(|n| if n.abs() <= have { coeffs[(n + have) as usize] } else { CZERO })
                .collect();
            return FourierCoefficients::from_values(*b, values);
        }
    }
    let b = period.unwrap_or(s.support().hi);
    if !(b > 0.0 && b.is_finite()) {
        return Err(Error::UnboundedInterval { lo: 0.0, hi: b });
    }
    let ns: Vec<i64> = (-(m as i64)..=m as i64).collect();
    let mut values = Vec::with_capacity(ns.len());
    for n in ns {
        let kappa = 2.0 * PI * n as f64 / b;
        let mut acc = CZERO;
        for r in s.over_pieces(0.0, b, |p, lo, hi| piece_fourier(&p.f, lo, hi, kappa)) {
            acc += r?;
        }
        values.push(acc / b);
    }
    FourierCoefficients::from_values(b, values)
}

/// Finite section `{a_{m+n+1}((m+½)⁻¹ + (n+½)⁻¹)}_{m,n ∈ [−M, M]}`.
#[derive(Clone, Debug, PartialEq)]
pub struct HankelWindow {
    pub m: usize,
    pub entries: DMatrix<C64>,
    /// Share of the coefficient energy whose index `m + n + 1` falls inside the section.
    pub coverage: f64,
}

impl HankelWindow {
    pub fn get(&self, m: i64, n: i64) -> C64 {
        let o = self.m as i64;
        self.entries[((m + o) as usize, (n + o) as usize)]
    }

    pub fn singular_values(&self) -> Vec<f64> {
        let mut s: Vec<f64> = self.entries.clone().singular_values().iter().copied().collect();
        s.sort_by(|a, b| b.total_cmp(a));
        s
    }

    pub fn spectrum(&self) -> SpectrumEstimate {
        SpectrumEstimate::exact(Method::HankelExact, self.singular_values(), self.entries.nrows(), None)
    }
}

pub fn hankel_window(c: &FourierCoefficients, m: usize) -> Result<HankelWindow> {
    if m < 1 {
        return Err(Error::InvalidArgument("Hankel window needs M ≥ 1".into()));
    }
    let size = 2 * m + 1;
    let o = m as i64;
    let entries = DMatrix::from_fn(size, size, |i, j| {
        let (mi, nj) = (i as i64 - o, j as i64 - o);
        let w = 1.0 / (mi as f64 + 0.5) + 1.0 / (nj as f64 + 0.5);
        c.get(mi + nj + 1) * w
    });
    let total = c.energy();
    let reach = 2 * o + 1;
    let inside: f64 = (-reach + 2..=reach).map(|k| c.get(k).norm_sqr()).sum();
    let coverage = if total == 0.0 { 1.0 } else { inside / total };
    Ok(HankelWindow { m, entries, coverage })
}

/// Default Hankel section size: 4× the coefficient support for
/// trigonometric polynomials, else the window holding 99.99% of the energy.
pub fn default_hankel_size(c: &FourierCoefficients, trig: bool) -> usize {
    let m = c.window as i64;
    let support = (-m..=m).filter(|n| c.get(*n) != CZERO).map(|n| n.unsigned_abs() as usize).max().unwrap_or(0);
    if trig {
        return (4 * support).max(1);
    }
    let total = c.energy();
    let mut acc = c.get(0).norm_sqr();
    for k in 1..=m {
        if acc >= 0.9999 * total {
            return (k as usize).max(1);
        }
        acc += c.get(k).norm_sqr() + c.get(-k).norm_sqr();
    }
    c.window.max(1)
}

/// `φ̂ₖ` at a possibly half-integer index `k = j/2`; zero unless `j` is even.
fn hat_half(c: &FourierCoefficients, twice_k: i64) -> C64 {
    if twice_k % 2 != 0 {
        CZERO
    } else {
        c.get(twice_k / 2)
    }
}

/// Fourier coefficient `k̂_φ(m, n)` of the circle kernel attached to φ.
pub fn circle_kernel_coeffs(c: &FourierCoefficients, m: i64, n: i64) -> C64 {
    match (m, n) {
        (0, 0) => c.get(0),
        (m, 0) => 0.5 * hat_half(c, m),
        (0, n) => 0.5 * hat_half(c, n),
        (m, n) if m % 2 != 0 && n % 2 != 0 => {
            C64::new(0.0, 1.0 / PI) * (1.0 / m as f64 + 1.0 / n as f64) * c.get((m + n) / 2)
        }
        _ => CZERO,
    }
}

/// `ĝ_N(k) = ∫_{−1}^{1} e^{πiN|x|} e^{−πikx} dx`.
pub fn exp_symbol_coefficient(n_freq: u64, k: i64) -> C64 {
    let n = n_freq as i64;
    if k.abs() == n {
        C64::new(1.0, 0.0)
    } else if (k - n).rem_euclid(2) == 0 {
        CZERO
    } else {
        let nf = n as f64;
        let kf = k as f64;
        C64::new(0.0, 4.0 * nf / (PI * (nf * nf - kf * kf)))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExpSymbolSpectrum {
    pub n_freq: u64,
    /// Exact `sₙ(T_N')`; also upper bounds for `sₙ(Q_{φ_N})`.
    pub estimate: SpectrumEstimate,
    /// `s_{4n}(T_N')/4 ≤ sₙ(Q_{φ_N})`.
    pub lower_bounds: Vec<f64>,
}

impl ExpSymbolSpectrum {
    pub fn upper_bounds(&self) -> &[f64] {
        &self.estimate.svals
    }
}

/// `|ĝ_N(k)|` for `|k| ≤ kmax`, sorted nonincreasing.
fn sorted_exp_values(n_freq: u64, kmax: i64) -> Vec<f64> {
    let mut v: Vec<f64> = (-kmax..=kmax).map(|k| exp_symbol_coefficient(n_freq, k).norm()).filter(|x| *x > 0.0).collect();
    v.sort_by(|a, b| b.total_cmp(a));
    v
}

/// Exact singular values of the periodised operator `T_N'` (kernel
/// `g_N(x − y)` on the circle of length 2) for `φ_N = e^{2πiNx}χ_(0,1)`,
/// with the two-sided transfer to `Q_{φ_N}`.
pub fn exp_symbol_svals(n_freq: u64, count: usize) -> Result<ExpSymbolSpectrum> {
    if n_freq == 0 {
        return Err(Error::InvalidArgument("the frequency N must be at least 1".into()));
    }
    // beyond |k| = N the values decrease in |k|; 2·(4K) + 2 of them suffice
    let kmax = n_freq as i64 + 8 * count as i64 + 2;
    let all = sorted_exp_values(n_freq, kmax);
    let svals: Vec<f64> = all.iter().take(count).copied().collect();
    let lower_bounds = (0..count).map(|n| all.get(4 * n).copied().unwrap_or(0.0) / 4.0).collect();
    Ok(ExpSymbolSpectrum {
        n_freq,
        estimate: SpectrumEstimate::exact(Method::ExpExact, svals, (2 * kmax + 1) as usize, None),
        lower_bounds,
    })
}

/// Truncation of the coefficient sums below; the analytic remainder is added.
const SUM_CUTOFF: i64 = 1 << 22;

/// `Σ_k |ĝ_N(k)|^p` over all k, by direct summation for `|k| ≤ 2²²` plus
/// the integral estimate of the remaining power-law tail.
pub fn exp_symbol_power_sum(n_freq: u64, p: f64) -> f64 {
    let kmax = SUM_CUTOFF.max(4 * n_freq as i64);
    // deterministic pairwise-free order: ascending |k|
    let mut acc = exp_symbol_coefficient(n_freq, 0).norm().powf(p);
    let mut comp = 0.0;
    for k in 1..=kmax {
        let t = exp_symbol_coefficient(n_freq, k).norm().powf(p) * 2.0;
        // Kahan summation keeps the 1e−12 Parseval check honest
        let y = t - comp;
        let s = acc + y;
        comp = (s - acc) - y;
        acc = s;
    }
    // |ĝ| ≈ 4N/(πk²) on every other k beyond kmax
    let c = (4.0 * n_freq as f64 / PI).powf(p);
    let tail = c * (kmax as f64 + 1.0).powf(1.0 - 2.0 * p) / (2.0 * p - 1.0);
    acc + tail
}

/// `(Σ_k |ĝ_N(k)|^p)^{1/p} = ‖T_N'‖_{S_p}`.
pub fn exp_symbol_schatten(n_freq: u64, p: f64) -> f64 {
    exp_symbol_power_sum(n_freq, p).powf(1.0 / p)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GrowthRow {
    #[serde(rename = "N")]
    pub n_freq: u64,
    pub p: f64,
    pub norm: f64,
    /// `log(N + 1)` for p = 1, `N^{(1−p)/p}` otherwise.
    pub reference: f64,
    pub ratio: f64,
}

pub fn exp_reference(n_freq: u64, p: f64) -> f64 {
    if p == 1.0 {
        (n_freq as f64 + 1.0).ln()
    } else {
        (n_freq as f64).powf((1.0 - p) / p)
    }
}

/// Schatten norms of the exact `T_N'` sequences against their growth laws.
pub fn exp_symbol_growth(n_list: &[u64], p_list: &[f64]) -> Vec<GrowthRow> {
    use rayon::prelude::*;
    let jobs: Vec<(u64, f64)> = n_list.iter().flat_map(|n| p_list.iter().map(move |p| (*n, *p))).collect();
    jobs.par_iter()
        .map(|&(n, p)| {
            let norm = exp_symbol_schatten(n, p);
            let reference = exp_reference(n, p);
            GrowthRow { n_freq: n, p, norm, reference, ratio: norm / reference }
        })
        .collect()
}

/// Shape `min{1/(n+1), N/(n+1)²}` of the exponential-symbol spectrum.
pub fn exp_shape(n_freq: u64, n: usize) -> f64 {
    let m = n as f64 + 1.0;
    (1.0 / m).min(n_freq as f64 / (m * m))
}

/// Frozen constants with `c_lo·shape ≤ s_{4n}(T_N')/4` and
/// `sₙ(T_N') ≤ c_hi·shape`, measured on N ∈ {1, 4, 16, 64, 256}, n < 4096
/// (observed extremes 0.0199 and 10.61).
pub const EXP_SHAPE_LOWER: f64 = 0.019;
pub const EXP_SHAPE_UPPER: f64 = 10.7;

/// Checks both shape bounds for the first `count` values; returns the
/// worst lower and upper ratios.
pub fn exp_shape_ratios(e: &ExpSymbolSpectrum) -> (f64, f64) {
    let mut lo = f64::INFINITY;
    let mut hi = 0.0f64;
    for (n, (u, l)) in e.upper_bounds().iter().zip(&e.lower_bounds).enumerate() {
        let shape = exp_shape(e.n_freq, n);
        lo = lo.min(l / shape);
        hi = hi.max(u / shape);
    }
    (lo, hi)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Parseval {
    /// `Σ_k |ĝ_N(k)|²`
    pub coefficient_sum: f64,
    /// `½ Σ_k |ĝ_N(k)|²`, which equals `‖g_N‖²` on `[−1, 1]`
    pub normalized: f64,
    /// `∫_{−1}^{1} |g_N|² = 2`
    pub l2_norm_sq: f64,
}

pub fn exp_symbol_parseval(n_freq: u64) -> Parseval {
    let sum = exp_symbol_power_sum(n_freq, 2.0);
    Parseval { coefficient_sum: sum, normalized: sum / 2.0, l2_norm_sq: 2.0 }
}

/// Band `[lo, hi]` containing `sₙ(Q_φ^{[0,2]}) / sₙ(H)` for the first 40 values,
/// measured for φ = cos 2πt (2048 cells against Hankel sections M = 50..200,
/// observed 0.3987 and 2.3836).
pub const HANKEL_BAND: (f64, f64) = (0.39, 2.4);
