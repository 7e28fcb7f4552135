//! Eigenvalues of Q_φ on `[0, 1]` for real, nonincreasing, piecewise C¹
//! symbols by Prüfer-angle shooting.
//!
//! An eigenfunction `g` of `λg = Q_φ g` with `G(x) = ∫₀ˣ g` satisfies
//! `λG'' = φ'G`, `G(0) = 0` and `λg(1) = φ(1)G(1)`. Writing `λ = ω⁻²` and
//! `(g, ωG) = R(cos θ, sin θ)` gives
//!
//! ```text
//! θ' = ω(cos²θ − φ' sin²θ),   (ln R)' = ω(1 + φ') sin θ cos θ,   θ(0) = 0,
//! ```
//!
//! and the eigenvalue condition `cot θ(1) = ωφ(1)`; for `φ(1) = 0` the n-th
//! eigenvalue is the unique ω with `θ(1) = nπ + π/2`.

use serde::Serialize;
use std::f64::consts::{FRAC_PI_2, PI};

use crate::symbols::{Interpolation, Symbol, SymbolKind};
use crate::{Error, Result};

/// Local error tolerance of the Runge–Kutta integration.
pub const ODE_TOL: f64 = 1e-11;
/// Terminal-angle tolerance of the root search.
pub const THETA_TOL: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PruferRun {
    pub omega: f64,
    /// θ_ω(1)
    pub theta_end: f64,
    /// ln R(1)
    pub log_r_end: f64,
    pub steps: usize,
    pub rejected: usize,
    pub max_local_error: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EigenResult {
    pub n: usize,
    pub omega: f64,
    pub lambda: f64,
    /// Defect of `λg = φG + ∫ₓ¹ φg` at x ∈ {0, 1/2, 1}, relative to the
    /// largest of the three terms along the solution.
    pub residual: f64,
}

/// Samples of the shooting solution on the shooting nodes.
#[derive(Clone, Debug, PartialEq)]
pub struct Trajectory {
    pub x: Vec<f64>,
    /// `G(x) = R sin θ / ω`
    pub big_g: Vec<f64>,
    /// `g(x) = R cos θ`
    pub g: Vec<f64>,
    /// `∫₀ˣ φ g`
    pub j: Vec<f64>,
}

/// Validated view of a symbol for shooting: `φ` and `φ'` on `[0, 1]` with
/// the breakpoints in between.
struct Shooter<'a> {
    s: &'a Symbol,
    nodes: Vec<f64>,
}

impl<'a> Shooter<'a> {
    fn new(s: &'a Symbol) -> Result<Self> {
        if !s.is_real() {
            return Err(Error::NotSmoothEnough("complex symbols are routed to the Galerkin solver".into()));
        }
        let supp = s.support();
        if supp.hi > 1.0 + 1e-15 {
            return Err(Error::NotSmoothEnough(format!("support must lie in [0, 1], ends at {}", supp.hi)));
        }
        if matches!(s.kind(), SymbolKind::Step { .. } | SymbolKind::Sampled { interp: Interpolation::Constant, .. }) {
            if !s.is_zero() {
                return Err(Error::NotSmoothEnough("piecewise-constant symbols have jumps".into()));
            }
        }
        let scale = s.pieces().iter().map(|p| p.f.eval(0.5 * (p.lo + p.hi)).norm()).fold(0.0, f64::max);
        // the jump to zero at x = 1 is part of the boundary condition
        if s.jumps().iter().any(|(x, j)| *x < 1.0 - 1e-15 && *j > 1e-12 * scale.max(1e-300)) {
            return Err(Error::NotSmoothEnough("φ has an interior jump".into()));
        }
        for p in s.pieces() {
            for k in 0..=64 {
                let x = p.lo + (p.hi - p.lo) * (k as f64 / 64.0);
                let x = x.clamp(p.lo + 1e-300, p.hi);
                let d = p.f.deriv(x).re;
                if !d.is_finite() {
                    return Err(Error::NotSmoothEnough(format!("φ' is unbounded near {x}")));
                }
                if d > 1e-12 * (1.0 + scale) {
                    return Err(Error::PositiveDerivative(x));
                }
            }
        }
        let mut nodes = vec![0.0, 0.5, 1.0];
        nodes.extend(s.breakpoints().into_iter().filter(|b| *b > 0.0 && *b < 1.0));
        nodes.sort_by(f64::total_cmp);
        nodes.dedup();
        Ok(Shooter { s, nodes })
    }

    fn dphi(&self, x: f64) -> f64 {
        self.s.deriv(x).re
    }

    fn phi(&self, x: f64) -> f64 {
        self.s.eval(x).re
    }
}

type State = [f64; 3];

// Dormand–Prince 5(4) tableau
const C: [f64; 7] = [0.0, 0.2, 0.3, 0.8, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [0.2, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const B5: [f64; 7] = [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0, 0.0];
const B4: [f64; 7] =
    [5179.0 / 57600.0, 0.0, 7571.0 / 16695.0, 393.0 / 640.0, -92097.0 / 339200.0, 187.0 / 2100.0, 1.0 / 40.0];

impl Shooter<'_> {
    /// Right-hand side on the open cell `(lo, hi)`; φ' is taken from the
    /// cell's own piece so steps never straddle a breakpoint.
    fn rhs(&self, omega: f64, x: f64, y: &State, cell: (f64, f64)) -> State {
        let xi = x.clamp(cell.0 + (cell.1 - cell.0) * 1e-14, cell.1 - (cell.1 - cell.0) * 1e-14);
        let d = self.dphi(xi);
        let (sn, cs) = y[0].sin_cos();
        let theta = omega * (cs * cs - d * sn * sn);
        let rho = omega * (1.0 + d) * sn * cs;
        let j = self.phi(xi) * y[1].exp() * cs;
        [theta, rho, j]
    }

    /// Integrates from 0 to 1 through all nodes; `record` receives the state at every node.
    fn shoot(&self, omega: f64, mut record: Option<&mut Vec<(f64, State)>>) -> PruferRun {
        let mut y: State = [0.0, 0.0, 0.0];
        let mut steps = 0;
        let mut rejected = 0;
        let mut max_err: f64 = 0.0;
        let mut h = (0.1 / omega.max(1.0)).min(0.05);
        // θ carries the eigenvalue condition; ln R and J only matter when recorded
        let aux_weight = if record.is_some() { 1.0 } else { 1e-2 };
        if let Some(r) = record.as_deref_mut() {
            r.push((0.0, y));
        }
        for w in self.nodes.windows(2) {
            let (lo, hi) = (w[0], w[1]);
            let mut x = lo;
            while x < hi {
                let last = x + h >= hi;
                let step = if last { hi - x } else { h };
                let mut k = [[0.0; 3]; 7];
                k[0] = self.rhs(omega, x, &y, (lo, hi));
                for i in 1..7 {
                    let mut yi = y;
                    for (m, yv) in yi.iter_mut().enumerate() {
                        *yv += step * (0..i).map(|l| A[i][l] * k[l][m]).sum::<f64>();
                    }
                    k[i] = self.rhs(omega, x + C[i] * step, &yi, (lo, hi));
                }
                let mut y5 = y;
                let mut err: f64 = 0.0;
                for m in 0..3 {
                    let d5: f64 = (0..7).map(|l| B5[l] * k[l][m]).sum();
                    let d4: f64 = (0..7).map(|l| B4[l] * k[l][m]).sum();
                    y5[m] += step * d5;
                    let scale = ODE_TOL * (1.0 + y[m].abs().max(y5[m].abs()));
                    let weight = if m == 0 { 1.0 } else { aux_weight };
                    err = err.max(weight * (step * (d5 - d4)).abs() / scale);
                }
                if err <= 1.0 {
                    x = if last { hi } else { x + step };
                    y = y5;
                    steps += 1;
                    max_err = max_err.max(err * ODE_TOL);
                    let grow = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
                    if !last {
                        h = step * grow;
                    } else {
                        h = h.max(step * grow.min(1.0));
                    }
                } else {
                    rejected += 1;
                    h = step * (0.9 * err.powf(-0.2)).clamp(0.1, 0.9);
                }
            }
            if let Some(r) = record.as_deref_mut() {
                r.push((hi, y));
            }
        }
        PruferRun { omega, theta_end: y[0], log_r_end: y[1], steps, rejected, max_local_error: max_err }
    }
}

/// θ_ω on [0, 1] with adaptive Dormand–Prince 5(4) steps; breakpoints of φ'
/// are mandatory nodes.
pub fn prufer_theta(s: &Symbol, omega: f64) -> Result<PruferRun> {
    if !(omega > 0.0 && omega.is_finite()) {
        return Err(Error::InvalidArgument(format!("ω must be positive, got {omega}")));
    }
    Ok(Shooter::new(s)?.shoot(omega, None))
}

/// Terminal angle targeted by the n-th eigenvalue for the boundary
/// condition `cot θ(1) = ωφ(1)`.
fn target(n: usize, omega: f64, phi1: f64) -> f64 {
    // arccot in (0, π) (φ(1) ≥ 0 for monotone nonnegative symbols)
    let acot = FRAC_PI_2 - (omega * phi1).atan();
    n as f64 * PI + acot
}

fn find_omega(sh: &Shooter, n: usize, seed: f64, phi1: f64) -> Result<f64> {
    let f = |w: f64| sh.shoot(w, None).theta_end - target(n, w, phi1);
    let mut a = seed.max(1e-8);
    let mut fa = f(a);
    if fa > 0.0 {
        // seed beyond the root: walk back towards 0
        let mut b = a;
        loop {
            a *= 0.5;
            fa = f(a);
            if fa <= 0.0 {
                break;
            }
            if a < 1e-12 {
                return Err(Error::BracketingFailure { index: n });
            }
            b = a;
        }
        return refine(&f, a, fa, b, f(b), n);
    }
    // slope of θ(1) in ω is about θ(1)/ω
    let slope = ((fa + target(n, a, phi1)) / a).max(0.05);
    let mut step = PI / slope;
    for _ in 0..200 {
        let b = a + step;
        let fb = f(b);
        if fb >= 0.0 {
            return refine(&f, a, fa, b, fb, n);
        }
        a = b;
        fa = fb;
        step *= 1.5;
    }
    Err(Error::BracketingFailure { index: n })
}

/// Safeguarded secant (Illinois) iteration on a sign-changing bracket.
fn refine<F: Fn(f64) -> f64>(f: &F, mut a: f64, mut fa: f64, mut b: f64, mut fb: f64, n: usize) -> Result<f64> {
    if fa.abs() < THETA_TOL {
        return Ok(a);
    }
    if fb.abs() < THETA_TOL {
        return Ok(b);
    }
    let mut side = 0;
    for _ in 0..200 {
        let mut c = (a * fb - b * fa) / (fb - fa);
        if !(c > a.min(b) && c < a.max(b)) {
            c = 0.5 * (a + b);
        }
        let fc = f(c);
        if fc.abs() < THETA_TOL || (b - a).abs() < 1e-15 * c {
            return Ok(c);
        }
        if fc.signum() == fb.signum() {
            b = c;
            fb = fc;
            if side == -1 {
                fa *= 0.5;
            }
            side = -1;
        } else {
            a = c;
            fa = fc;
            if side == 1 {
                fb *= 0.5;
            }
            side = 1;
        }
    }
    Err(Error::BracketingFailure { index: n })
}

/// The K largest eigenvalues `λ₀ > λ₁ > …` of Q_φ for φ(1) = 0.
pub fn eigenvalues(s: &Symbol, count: usize) -> Result<Vec<EigenResult>> {
    let phi1 = s.eval(1.0).re;
    let scale = s.pieces().iter().map(|p| p.f.eval(0.5 * (p.lo + p.hi)).norm()).fold(0.0, f64::max);
    if phi1.abs() > 1e-14 * scale.max(1e-300) {
        return Err(Error::NonzeroEndpoint(phi1));
    }
    eigenvalues_with_boundary(s, count, 0.0)
}

/// Eigenvalues for the general boundary condition `cot θ(1) = ωφ(1)`.
///
/// [`eigenvalues`] requires φ(1) = 0; the standard reduction subtracts
/// `φ(1)·χ_(0,1]`, a rank-one change that shifts each index by at most one.
pub fn eigenvalues_general(s: &Symbol, count: usize) -> Result<Vec<EigenResult>> {
    eigenvalues_with_boundary(s, count, s.eval(1.0).re)
}

fn eigenvalues_with_boundary(s: &Symbol, count: usize, phi1: f64) -> Result<Vec<EigenResult>> {
    let sh = Shooter::new(s)?;
    if s.is_zero() {
        return Ok(Vec::new());
    }
    let mut out = Vec::with_capacity(count);
    let mut seed = 0.5;
    for n in 0..count {
        let omega = find_omega(&sh, n, seed, phi1)?;
        let residual = boundary_residual(&sh, omega)?;
        out.push(EigenResult { n, omega, lambda: omega.powi(-2), residual });
        seed = omega * (1.0 + 1e-9);
    }
    Ok(out)
}

fn trajectory_of(sh: &Shooter, omega: f64) -> Trajectory {
    let mut rec = Vec::new();
    sh.shoot(omega, Some(&mut rec));
    trajectory_from(&rec, omega)
}

fn trajectory_from(rec: &[(f64, State)], omega: f64) -> Trajectory {
    let mut t = Trajectory { x: Vec::new(), big_g: Vec::new(), g: Vec::new(), j: Vec::new() };
    for (x, y) in rec {
        let r = y[1].exp();
        t.x.push(*x);
        t.big_g.push(r * y[0].sin() / omega);
        t.g.push(r * y[0].cos());
        t.j.push(y[2]);
    }
    t
}

/// Relative defect of `λg(x) = φ(x)G(x) + ∫ₓ¹ φg` at x ∈ {0, 1/2, 1}.
fn boundary_residual(sh: &Shooter, omega: f64) -> Result<f64> {
    let t = trajectory_of(sh, omega);
    let lambda = omega.powi(-2);
    let j1 = *t.j.last().expect("nonempty");
    let phi_max = sh.s.pieces().iter().map(|p| p.f.eval(p.hi).norm().max(p.f.eval(p.lo.max(1e-300)).norm())).fold(0.0, f64::max);
    // largest magnitude among the three terms of the identity
    let scale = (0..t.x.len())
        .map(|k| (lambda * t.g[k]).abs().max(phi_max * t.big_g[k].abs()).max((j1 - t.j[k]).abs()))
        .fold(0.0, f64::max);
    if scale == 0.0 {
        return Err(Error::Degenerate("shooting solution vanishes".into()));
    }
    let mut worst: f64 = 0.0;
    for target in [0.0, 0.5, 1.0] {
        let k = t.x.iter().position(|x| *x == target).expect("mandatory node");
        let phi = if target == 0.0 { sh.phi(f64::MIN_POSITIVE) } else { sh.phi(target) };
        let lhs = lambda * t.g[k];
        let rhs = phi * t.big_g[k] + (j1 - t.j[k]);
        worst = worst.max((lhs - rhs).abs() / scale);
    }
    Ok(worst)
}

/// Shooting solution sampled at `samples + 1` uniform nodes (plus breakpoints).
pub fn shooting_trajectory(s: &Symbol, omega: f64, samples: usize) -> Result<Trajectory> {
    let mut sh = Shooter::new(s)?;
    sh.nodes.extend((1..samples).map(|k| k as f64 / samples as f64));
    sh.nodes.sort_by(f64::total_cmp);
    sh.nodes.dedup();
    let mut rec = Vec::new();
    sh.shoot(omega, Some(&mut rec));
    Ok(trajectory_from(&rec, omega))
}

/// `max |λG'' − φ'G| / max |G|` over interior nodes, with G'' from
/// three-point differences; nodes next to a breakpoint of φ' are skipped.
pub fn sl_residual(s: &Symbol, lambda: f64, traj: &Trajectory) -> Result<f64> {
    let gmax = traj.big_g.iter().map(|v| v.abs()).fold(0.0, f64::max);
    if !(gmax > 0.0) {
        return Err(Error::Degenerate("G vanishes identically".into()));
    }
    let bps: Vec<f64> = s.breakpoints();
    let x = &traj.x;
    let mut worst: f64 = 0.0;
    for i in 1..x.len().saturating_sub(1) {
        let (h0, h1) = (x[i] - x[i - 1], x[i + 1] - x[i]);
        if bps.iter().any(|b| *b > x[i - 1] && *b < x[i + 1] && *b > 0.0 && *b < 1.0) {
            continue;
        }
        let g = &traj.big_g;
        let d2 = 2.0 * (h0 * g[i + 1] - (h0 + h1) * g[i] + h1 * g[i - 1]) / (h0 * h1 * (h0 + h1));
        let dphi = s.deriv(x[i]).re;
        worst = worst.max((lambda * d2 - dphi * g[i]).abs());
    }
    Ok(worst / gmax)
}

/// `π⁻² (∫₀^∞ |φ'|^{1/2})²`, the limit of `n² sₙ(Q_φ)`.
pub fn asymptotic_constant(s: &Symbol) -> Result<f64> {
    let mut acc = 0.0;
    for p in s.pieces() {
        if p.f.is_constant() {
            continue;
        }
        let part = if p.f.is_linear() && p.hi.is_finite() {
            p.f.deriv(p.lo + 0.5 * (p.hi - p.lo)).norm().sqrt() * (p.hi - p.lo)
        } else {
            p.f.integrate_with(p.lo, p.hi, |_, d| d.norm().sqrt()).map_err(|_| Error::NonIntegrableRoot)?
        };
        if !part.is_finite() {
            return Err(Error::NonIntegrableRoot);
        }
        acc += part;
    }
    Ok((acc / PI).powi(2))
}

/// Σ_{n ≥ from} (n + ½)⁻², via the trigamma asymptotic series.
pub fn inverse_square_tail(from: usize) -> f64 {
    let x = from as f64 + 0.5;
    // ψ₁(x) = 1/x + 1/(2x²) + 1/(6x³) − 1/(30x⁵) + …
    1.0 / x + 0.5 / (x * x) + 1.0 / (6.0 * x.powi(3)) - 1.0 / (30.0 * x.powi(5)) + 1.0 / (42.0 * x.powi(7))
}

#[cfg(test)]
mod tests;
