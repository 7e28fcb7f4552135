//! Spectrum estimates built on the Galerkin compressions.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;
use std::f64::consts::PI;

use super::{galerkin_matrix, GalerkinMatrix, Grid, Mask};
use crate::classify::{self, Norm};
use crate::symbols::{Interval, PieceFn, Symbol};
use crate::{Error, Result, C64};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Galerkin,
    StepExact,
    Prufer,
    HankelExact,
    /// Exact spectrum of the periodised exponential-symbol operator.
    ExpExact,
}

impl Method {
    pub fn as_str(&self) -> &'static str {
        match self {
            Method::Galerkin => "galerkin",
            Method::StepExact => "step_exact",
            Method::Prufer => "prufer",
            Method::HankelExact => "hankel_exact",
            Method::ExpExact => "exp_exact",
        }
    }
}

/// Tracked values at one refinement level.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Level {
    pub n: usize,
    pub svals: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SpectrumEstimate {
    /// Nonincreasing, nonnegative.
    pub svals: Vec<f64>,
    pub method: Method,
    /// Discretisation size of the last level (matrix size, or number of
    /// enumerated coefficients for exact methods).
    pub n: usize,
    pub interval: Option<Interval>,
    pub refinement_history: Vec<Level>,
    /// Per-value change between the last two levels (zero for exact methods).
    pub errors: Vec<f64>,
}

impl SpectrumEstimate {
    pub fn exact(method: Method, mut svals: Vec<f64>, n: usize, interval: Option<Interval>) -> Self {
        svals.sort_by(|a, b| b.total_cmp(a));
        let errors = vec![0.0; svals.len()];
        SpectrumEstimate { svals, method, n, interval, refinement_history: Vec::new(), errors }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SpectrumConfig {
    /// Cells of the first level.
    pub n0: usize,
    /// Relative change of the tracked values that ends the refinement.
    pub tol: f64,
    /// Number of leading values that must settle.
    pub tracked: usize,
    /// Number of values returned (at least `tracked`).
    pub count: usize,
    pub max_doublings: usize,
    pub grid: Grid,
    pub mask: Mask,
}

impl Default for SpectrumConfig {
    fn default() -> Self {
        SpectrumConfig { n0: 64, tol: 1e-4, tracked: 16, count: 16, max_doublings: 6, grid: Grid::Uniform, mask: Mask::Full }
    }
}

/// Singular values of a single compression.
pub fn spectrum_at(s: &Symbol, iv: Interval, n: usize, count: usize, grid: &Grid, mask: Mask) -> Result<SpectrumEstimate> {
    let m = galerkin_matrix(s, iv, n, grid, mask)?;
    let svals = m.singular_values(count);
    Ok(SpectrumEstimate {
        refinement_history: vec![Level { n: m.n(), svals: svals.clone() }],
        errors: vec![f64::NAN; svals.len()],
        svals,
        method: Method::Galerkin,
        n: m.n(),
        interval: Some(iv),
    })
}

/// Doubles the cell count from `n0` until the first `tracked` singular
/// values change by less than `tol` relatively.
pub fn spectrum(s: &Symbol, iv: Interval, cfg: &SpectrumConfig) -> Result<SpectrumEstimate> {
    let count = cfg.count.max(cfg.tracked);
    let mut history: Vec<Level> = Vec::new();
    let mut n = cfg.n0.max(2);
    let mut last_change = f64::INFINITY;
    for level in 0..=cfg.max_doublings {
        let m = galerkin_matrix(s, iv, n, &cfg.grid, cfg.mask)?;
        let svals = m.singular_values(count);
        if let Some(prev) = history.last() {
            let floor = 1e-10 * svals.first().copied().unwrap_or(0.0);
            let errors: Vec<f64> = svals.iter().zip(&prev.svals).map(|(a, b)| (a - b).abs()).collect();
            last_change = errors
                .iter()
                .zip(&svals)
                .take(cfg.tracked)
                .map(|(e, v)| if *e <= floor { 0.0 } else { e / v.max(floor) })
                .fold(0.0, f64::max);
            history.push(Level { n: m.n(), svals: svals.clone() });
            if last_change < cfg.tol {
                return Ok(SpectrumEstimate {
                    svals,
                    method: Method::Galerkin,
                    n: m.n(),
                    interval: Some(iv),
                    refinement_history: history,
                    errors,
                });
            }
        } else {
            history.push(Level { n: m.n(), svals });
        }
        if level < cfg.max_doublings {
            n *= 2;
        }
    }
    Err(Error::NoConvergence { levels: history.len(), last_change })
}

/// Smallest `[0, X]` carrying the whole operator up to `tol`: the support
/// end if finite, else the first `X = 2ᵏ` with `sup_{x≥X} x∫ₓ^∞|φ|² ≤ tol²·sup_x x∫ₓ^∞|φ|²`.
pub fn truncation_interval(s: &Symbol, tol: f64) -> Result<Interval> {
    let supp = s.support();
    if supp.is_finite() {
        return Interval::new(0.0, supp.hi);
    }
    let summary = classify::tail_functional_summary(s);
    if !summary.sup.is_finite() || summary.limit_at_infinity > 0.0 {
        return Err(Error::Degenerate("tail functional does not vanish at infinity".into()));
    }
    let target = tol * tol * summary.sup;
    let mut k = supp.lo.max(1.0).log2().ceil() as i32;
    for _ in 0..400 {
        let x = 2f64.powi(k);
        let worst = (0..=64).map(|j| classify::tail_functional(s, x * 2f64.powf(j as f64 * 0.5))).fold(0.0, f64::max);
        if worst <= target {
            return Interval::new(0.0, x);
        }
        k += 1;
    }
    Err(Error::NoConvergence { levels: 400, last_change: f64::NAN })
}

/// Exact spectrum of a step symbol.
///
/// With `φ = Σ cᵢ χ_(0,xᵢ]`, Q_φ = X C X* for `X: ℂᴺ → L²` mapping the
/// i-th unit vector to `χ_(0,xᵢ]`. The Gram matrix `G = (min(xᵢ, xⱼ))` has
/// the explicit Cholesky factor `L_ij = (x_j − x_{j−1})^{1/2}` (i ≥ j), so the
/// nonzero singular values are those of `Lᵀ C L`, unitarily similar to
/// `G^{1/2} C G^{1/2}`.
pub fn step_exact_spectrum(s: &Symbol) -> Result<SpectrumEstimate> {
    let (xs, cs) = classify::step_decomposition(s)
        .ok_or(Error::UnsupportedVariant { op: "step_exact_spectrum", variant: s.kind().name() })?;
    let n = xs.len();
    if n == 0 {
        return Ok(SpectrumEstimate::exact(Method::StepExact, Vec::new(), 0, None));
    }
    let widths: Vec<f64> = (0..n).map(|j| (xs[j] - if j == 0 { 0.0 } else { xs[j - 1] }).sqrt()).collect();
    // (Lᵀ C L)_{jk} = w_j w_k Σ_{i ≥ max(j,k)} c_i
    let mut suffix = vec![C64::new(0.0, 0.0); n + 1];
    for i in (0..n).rev() {
        suffix[i] = suffix[i + 1] + cs[i];
    }
    let b = DMatrix::from_fn(n, n, |j, k| suffix[j.max(k)] * (widths[j] * widths[k]));
    let svals: Vec<f64> = if s.is_real() {
        let re = b.map(|z| z.re);
        re.symmetric_eigen().eigenvalues.iter().map(|e| e.abs()).collect()
    } else {
        b.singular_values().iter().copied().collect()
    };
    let iv = Interval::new(0.0, xs[n - 1]).ok();
    Ok(SpectrumEstimate::exact(Method::StepExact, svals, n, iv))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SchattenReport {
    pub p: f64,
    /// `(Σ sᵢᵖ)^{1/p}` over the computed values.
    pub norm: f64,
    /// `sup sₙ (1 + n)^{1/p}`.
    pub weak_norm: f64,
    /// Estimate of `Σ_{n ≥ len} sₙᵖ` from the power-law slope of the trailing values.
    pub truncation_tail_bound: Norm,
}

pub fn schatten(est: &SpectrumEstimate, p: f64) -> SchattenReport {
    let s = &est.svals;
    let norm = s.iter().map(|v| v.powf(p)).sum::<f64>().powf(1.0 / p);
    let weak_norm = s.iter().enumerate().map(|(n, v)| v * (1.0 + n as f64).powf(1.0 / p)).fold(0.0, f64::max);
    SchattenReport { p, norm, weak_norm, truncation_tail_bound: Norm(tail_bound(s, p)) }
}

fn tail_bound(s: &[f64], p: f64) -> f64 {
    let top = s.first().copied().unwrap_or(0.0);
    match s.last() {
        None => return 0.0,
        Some(v) if *v <= 1e-14 * top => return 0.0,
        _ => {}
    }
    let len = s.len();
    if len < 8 {
        return f64::INFINITY;
    }
    let (i0, i1) = (len - len / 4 - 1, len - 1);
    let alpha = -((s[i1] / s[i0]).ln() / ((1.0 + i1 as f64) / (1.0 + i0 as f64)).ln());
    let ap = alpha * p;
    if !(ap > 1.0) {
        return f64::INFINITY;
    }
    let c = s[i1] * (1.0 + i1 as f64).powf(alpha);
    c.powf(p) * (len as f64 + 0.5).powf(1.0 - ap) / (ap - 1.0)
}

/// Frozen constant of `sₙ(n+1)² ≤ C·|I|·‖φ‖_BV` for symbols on `I = [0, b]`,
/// measured over the corpus and seeded step symbols at 1024 cells, n < 64
/// (observed maximum 1.0, attained by single steps at n = 0).
pub const BV_CONSTANT: f64 = 1.05;

/// Frozen constant of `sₙ ≤ C·|I|^{1/2} n⁻¹ ω₂(|I|/n)`, same protocol
/// (observed maximum 0.531).
pub const MODULUS_CONSTANT: f64 = 0.75;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TriangularConfig {
    pub n_lo: usize,
    pub n_hi: usize,
    /// Cells of the coarse level; the fine level doubles it.
    pub cells: usize,
}

impl Default for TriangularConfig {
    fn default() -> Self {
        TriangularConfig { n_lo: 100, n_hi: 400, cells: 4096 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TriangularLimit {
    /// Limit of `n·sₙ` from the fit `L + a/n + b/n²` over the index range.
    pub limit: f64,
    /// `π⁻¹ ∫|φ|`.
    pub predicted: f64,
    pub n_range: (usize, usize),
    /// `n·sₙ` of the extrapolated masked values over the index range.
    pub products: Vec<f64>,
    /// Extrapolated masked singular values `s₀ … s_{n_hi}`.
    pub svals: Vec<f64>,
    pub cells: (usize, usize),
}

/// Singular values of the Volterra part Q_φ⁺ on `I` and the limit of `n·sₙ`.
///
/// The masked compressions at `N` and `2N` cells are combined by Richardson
/// extrapolation (error ∝ h²) before the fit.
pub fn triangular_limit(s: &Symbol, iv: Interval, cfg: &TriangularConfig) -> Result<TriangularLimit> {
    let l1 = s.l1_norm()?;
    if !l1.is_finite() {
        return Err(Error::NonIntegrable);
    }
    let predicted = l1 / PI;
    let k = cfg.n_hi + 1;
    let coarse = galerkin_matrix(s, iv, cfg.cells, &Grid::Uniform, Mask::Lower)?.singular_values(k);
    let fine = galerkin_matrix(s, iv, 2 * cfg.cells, &Grid::Uniform, Mask::Lower)?.singular_values(k);
    let svals: Vec<f64> = coarse.iter().zip(&fine).map(|(c, f)| (4.0 * f - c) / 3.0).collect();
    let products: Vec<f64> = (cfg.n_lo..=cfg.n_hi).map(|n| n as f64 * svals[n]).collect();
    let limit = if svals[0] == 0.0 { 0.0 } else { fit_limit(cfg.n_lo, &products) };
    Ok(TriangularLimit {
        limit,
        predicted,
        n_range: (cfg.n_lo, cfg.n_hi),
        products,
        svals,
        cells: (cfg.cells, 2 * cfg.cells),
    })
}

/// Least-squares constant term of `y_n ≈ L + a/n + b/n²`.
fn fit_limit(n_lo: usize, y: &[f64]) -> f64 {
    let rows = y.len();
    let a = DMatrix::from_fn(rows, 3, |r, c| (1.0 / (n_lo + r) as f64).powi(c as i32));
    let b = DVector::from_column_slice(y);
    let sol = a.svd(true, true).solve(&b, 1e-14).expect("full column rank");
    sol[0]
}

/// Largest |eigenvalue| of a real symmetric operator by Lanczos with full
/// reorthogonalisation.
pub fn lanczos_norm<F: Fn(&[f64]) -> Vec<f64>>(op: F, n: usize, steps: usize) -> f64 {
    let m = steps.min(n);
    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(m);
    let mut v: Vec<f64> = (0..n).map(|i| 1.0 + 0.5 * ((i as f64) * 0.618).sin()).collect();
    let nv = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    v.iter_mut().for_each(|x| *x /= nv);
    let mut alpha = Vec::new();
    let mut beta: Vec<f64> = Vec::new();
    for _ in 0..m {
        let mut w = op(&v);
        let a: f64 = w.iter().zip(&v).map(|(x, y)| x * y).sum();
        alpha.push(a);
        basis.push(v.clone());
        for q in &basis {
            let c: f64 = w.iter().zip(q).map(|(x, y)| x * y).sum();
            w.iter_mut().zip(q).for_each(|(x, y)| *x -= c * y);
        }
        let b = w.iter().map(|x| x * x).sum::<f64>().sqrt();
        if b <= 1e-300 || basis.len() == m {
            break;
        }
        beta.push(b);
        v = w.into_iter().map(|x| x / b).collect();
    }
    let k = alpha.len();
    let t = DMatrix::from_fn(k, k, |i, j| {
        if i == j {
            alpha[i]
        } else if i == j + 1 {
            beta[j]
        } else if j == i + 1 {
            beta[i]
        } else {
            0.0
        }
    });
    t.symmetric_eigen().eigenvalues.iter().map(|e| e.abs()).fold(0.0, f64::max)
}

/// `‖M − VᵀV‖ / ‖M‖` for the full compression `M` of a monotone Q_φ and the
/// lower compression `V` of Q_ψ⁺, `ψ = (−φ')^{1/2}`, on the same uniform grid.
pub fn factor_residual(s: &Symbol, n: usize) -> Result<f64> {
    if !classify::is_monotone_nonneg(s) {
        return Err(Error::NotMonotone);
    }
    if s.is_zero() {
        return Ok(0.0);
    }
    if s.limit_at_infinity() != Some(C64::new(0.0, 0.0)) || !s.support().is_finite() {
        return Err(Error::NotSmoothEnough("symbol must vanish beyond a finite support".into()));
    }
    let scale = s.pieces().iter().map(|p| p.f.eval(0.5 * (p.lo + p.hi.min(p.lo + 1.0))).norm()).fold(0.0, f64::max);
    if s.jumps().iter().any(|(_, j)| *j > 1e-12 * scale) {
        return Err(Error::NotSmoothEnough("jumps need a measure-valued factor".into()));
    }
    let iv = Interval::new(0.0, s.support().hi)?;
    let m = galerkin_matrix(s, iv, n, &Grid::Uniform, Mask::Full)?;
    let v = factor_matrix(s, iv, &m.edges)?;
    let e = |x: &[f64]| -> Vec<f64> {
        let xc: Vec<C64> = x.iter().map(|t| C64::new(*t, 0.0)).collect();
        let mx = m.matvec(&xc);
        let vtvx = v.matvec_transpose(&v.matvec(&xc));
        mx.iter().zip(&vtvx).map(|(a, b)| (a - b).re).collect()
    };
    let norm_e = lanczos_norm(e, m.n(), 60);
    let norm_m = m.singular_values(1)[0];
    Ok(norm_e / norm_m)
}

/// Lower compression of Q_ψ⁺, ψ = (−φ')^{1/2}, by quadrature per cell.
fn factor_matrix(s: &Symbol, iv: Interval, edges: &[f64]) -> Result<GalerkinMatrix> {
    let psi = |f: &PieceFn, a: f64, b: f64, weight: &dyn Fn(f64) -> f64| -> Result<f64> {
        if f.is_constant() {
            return Ok(0.0);
        }
        crate::quad::integrate(|x| (-f.deriv(x).re).max(0.0).sqrt() * weight(x), a, b, 1e-12, 1e-300)
    };
    let mut ints = Vec::with_capacity(edges.len() - 1);
    let mut moms = Vec::with_capacity(edges.len() - 1);
    for c in edges.windows(2) {
        let (a, b) = (c[0], c[1]);
        let mut int = 0.0;
        let mut mom = 0.0;
        for r in s.over_pieces(a, b, |p, lo, hi| {
            Ok::<_, Error>((psi(&p.f, lo, hi, &|_| 1.0)?, psi(&p.f, lo, hi, &|x| x - a)?))
        }) {
            let (i, m) = r?;
            int += i;
            mom += m;
        }
        ints.push(C64::new(int, 0.0));
        moms.push(C64::new(mom, 0.0));
    }
    GalerkinMatrix::from_cells(iv, edges.to_vec(), Mask::Lower, true, ints, moms)
}
