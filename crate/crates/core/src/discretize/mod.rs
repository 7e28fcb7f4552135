//! Galerkin compressions of Q_φ onto normalized cell indicators.
//!
//! For cells `I_i = (a_i, a_i + h_i]` the compression has the exact
//! semiseparable form
//!
//! ```text
//! M_ij = u_i w_j  (i > j),   u_i = h_i^{-1/2} ∫_{I_i} φ,   w_j = h_j^{1/2},
//! M_ii = (2/h_i) ∫_{I_i} φ(x)(x − a_i) dx,
//! ```
//!
//! and is symmetric (`M_ji = M_ij`). The lower mask keeps `i > j` and exactly
//! half of each diagonal cell, the triangle `{y < x}`. Only the generators are
//! stored, so matrix-vector products and inertia counts cost O(n).

mod qsep;
mod spectrum;

pub use spectrum::*;

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::symbols::{Interval, Symbol};
use crate::{Error, Result, C64};
pub(crate) use qsep::Generators;

const GEOMETRIC_MAX_OCTAVES: f64 = 60.0;

/// Cell layout on the interval.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Grid {
    Uniform,
    /// Log-uniform cells; when the interval starts at 0 the cells cover
    /// `min(n/4, 60)` octaves below the right end, preceded by one cell `(0, x₁]`.
    Geometric,
    /// Explicit cell boundaries, strictly increasing.
    Edges(Vec<f64>),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mask {
    Full,
    /// Kernel restricted to `{y < x}`: the Volterra part Q_φ⁺.
    Lower,
}

impl Grid {
    pub fn edges(&self, iv: Interval, n: usize) -> Result<Vec<f64>> {
        if !iv.is_finite() {
            return Err(Error::UnboundedInterval { lo: iv.lo, hi: iv.hi });
        }
        let e = match self {
            Grid::Uniform => {
                let mut e: Vec<f64> = (0..=n).map(|k| iv.lo + iv.len() * (k as f64 / n as f64)).collect();
                e[n] = iv.hi;
                e
            }
            Grid::Geometric if iv.lo > 0.0 => crate::symbols::heart_graded_edges(iv.lo, iv.hi, n),
            Grid::Geometric => {
                let octaves = ((n - 1) as f64 / 4.0).min(GEOMETRIC_MAX_OCTAVES);
                let x1 = iv.hi * 2f64.powf(-octaves);
                let mut e = vec![0.0];
                e.extend(crate::symbols::heart_graded_edges(x1, iv.hi, n - 1));
                e
            }
            Grid::Edges(e) => e.clone(),
        };
        if e.len() < 3 || e.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::InvalidArgument("grid needs at least two strictly increasing cells".into()));
        }
        Ok(e)
    }
}

/// Uniform edges refined so that every given breakpoint inside the
/// interval is a cell boundary.
pub fn uniform_edges_with(iv: Interval, n: usize, breakpoints: &[f64]) -> Vec<f64> {
    let mut e: Vec<f64> = (0..=n).map(|k| iv.lo + iv.len() * (k as f64 / n as f64)).collect();
    e.extend(breakpoints.iter().copied().filter(|b| *b > iv.lo && *b < iv.hi));
    e.sort_by(f64::total_cmp);
    let tol = 1e-13 * iv.len();
    e.dedup_by(|a, b| (*a - *b).abs() <= tol);
    *e.last_mut().expect("nonempty") = iv.hi;
    e
}

#[derive(Clone, Debug, PartialEq)]
pub struct GalerkinMatrix {
    pub interval: Interval,
    pub edges: Vec<f64>,
    pub mask: Mask,
    pub real: bool,
    u: Vec<C64>,
    w: Vec<f64>,
    diag: Vec<C64>,
}

/// Compression of Q_φ restricted to `I × I`.
pub fn galerkin_matrix(s: &Symbol, iv: Interval, n: usize, grid: &Grid, mask: Mask) -> Result<GalerkinMatrix> {
    if n < 2 && !matches!(grid, Grid::Edges(_)) {
        return Err(Error::InvalidArgument("a Galerkin matrix needs n ≥ 2 cells".into()));
    }
    let edges = grid.edges(iv, n)?;
    galerkin_on_edges(s, iv, edges, mask)
}

pub fn galerkin_on_edges(s: &Symbol, iv: Interval, edges: Vec<f64>, mask: Mask) -> Result<GalerkinMatrix> {
    let cells: Vec<(C64, C64)> = edges.par_windows(2).map(|c| (s.integral(c[0], c[1]), s.moment(c[0], c[1]))).collect();
    let (ints, moms) = cells.into_iter().unzip();
    GalerkinMatrix::from_cells(iv, edges, mask, s.is_real(), ints, moms)
}

impl GalerkinMatrix {
    /// Assembles the compression from per-cell `∫_{I_i} φ` and `∫_{I_i} φ(x)(x − a_i) dx`.
    pub fn from_cells(
        iv: Interval,
        edges: Vec<f64>,
        mask: Mask,
        real: bool,
        integrals: Vec<C64>,
        moments: Vec<C64>,
    ) -> Result<GalerkinMatrix> {
        let half = if mask == Mask::Lower { 1.0 } else { 2.0 };
        let n = integrals.len();
        let mut u = Vec::with_capacity(n);
        let mut w = Vec::with_capacity(n);
        let mut diag = Vec::with_capacity(n);
        for (k, (int, mom)) in integrals.into_iter().zip(moments).enumerate() {
            if !(int.re.is_finite() && int.im.is_finite() && mom.re.is_finite() && mom.im.is_finite()) {
                return Err(Error::QuadratureFailure { lo: edges[k], hi: edges[k + 1] });
            }
            let h = edges[k + 1] - edges[k];
            u.push(int / h.sqrt());
            w.push(h.sqrt());
            diag.push(mom * (half / h));
        }
        Ok(GalerkinMatrix { interval: iv, edges, mask, real, u, w, diag })
    }

    pub fn n(&self) -> usize {
        self.diag.len()
    }

    pub(crate) fn generators(&self) -> Generators<'_> {
        Generators { u: &self.u, w: &self.w, diag: &self.diag, symmetric: self.mask == Mask::Full }
    }

    pub fn entry(&self, i: usize, j: usize) -> C64 {
        if i > j {
            self.u[i] * self.w[j]
        } else if i == j {
            self.diag[i]
        } else if self.mask == Mask::Full {
            self.u[j] * self.w[i]
        } else {
            C64::new(0.0, 0.0)
        }
    }

    pub fn to_dense(&self) -> DMatrix<C64> {
        DMatrix::from_fn(self.n(), self.n(), |i, j| self.entry(i, j))
    }

    pub fn diagonal(&self) -> &[C64] {
        &self.diag
    }

    /// `M x` in O(n).
    pub fn matvec(&self, x: &[C64]) -> Vec<C64> {
        let n = self.n();
        let mut y = vec![C64::new(0.0, 0.0); n];
        let mut acc = C64::new(0.0, 0.0);
        for i in 0..n {
            y[i] = self.u[i] * acc + self.diag[i] * x[i];
            acc += x[i] * self.w[i];
        }
        if self.mask == Mask::Full {
            let mut acc = C64::new(0.0, 0.0);
            for i in (0..n).rev() {
                y[i] += acc * self.w[i];
                acc += self.u[i] * x[i];
            }
        }
        y
    }

    /// `Mᵀ x` in O(n) (equal to `M x` for the full mask).
    pub fn matvec_transpose(&self, x: &[C64]) -> Vec<C64> {
        if self.mask == Mask::Full {
            return self.matvec(x);
        }
        let n = self.n();
        let mut y: Vec<C64> = (0..n).map(|i| self.diag[i] * x[i]).collect();
        let mut acc = C64::new(0.0, 0.0);
        for i in (0..n).rev() {
            y[i] += acc * self.w[i];
            acc += self.u[i] * x[i];
        }
        y
    }

    pub fn frobenius(&self) -> f64 {
        self.generators().frobenius()
    }

    /// Number of singular values greater than `sigma > 0`.
    pub fn count_singular_above(&self, sigma: f64) -> usize {
        self.generators().count_singular_above(sigma)
    }

    /// The `k` largest singular values, nonincreasing, to relative accuracy ~1e−13.
    pub fn singular_values(&self, k: usize) -> Vec<f64> {
        let g = self.generators();
        let ub = g.frobenius() * (1.0 + 1e-12);
        if ub == 0.0 {
            return vec![0.0; k];
        }
        let count = |s: f64| g.count_singular_above(s);
        qsep::top_values(&count, k.min(self.n()), 0.0, ub, 1e-13, 1e-15 * ub)
    }

    fn require_real_symmetric(&self) -> Result<()> {
        if self.mask != Mask::Full || !self.real {
            return Err(Error::UnsupportedVariant { op: "signed eigenvalues", variant: "complex or masked matrix" });
        }
        Ok(())
    }

    /// Number of eigenvalues greater than `sigma` (real symbols, full mask).
    pub fn count_eigen_above(&self, sigma: f64) -> Result<usize> {
        self.require_real_symmetric()?;
        Ok(self.generators().count_eigen_above(sigma))
    }

    /// Smallest eigenvalue (real symbols, full mask), by bisection on inertia counts.
    pub fn min_eigenvalue(&self) -> Result<f64> {
        self.require_real_symmetric()?;
        let g = self.generators();
        let ub = g.frobenius() * (1.0 + 1e-12) + f64::MIN_POSITIVE;
        let n = self.n();
        let (mut a, mut b) = (-ub, ub);
        for _ in 0..200 {
            let mid = 0.5 * (a + b);
            if b - a <= 1e-15 * ub {
                break;
            }
            if g.count_eigen_above(mid) == n {
                a = mid;
            } else {
                b = mid;
            }
        }
        Ok(0.5 * (a + b))
    }

    /// The `k` largest eigenvalues (real symbols, full mask).
    pub fn top_eigenvalues(&self, k: usize) -> Result<Vec<f64>> {
        self.require_real_symmetric()?;
        let g = self.generators();
        let ub = g.frobenius() * (1.0 + 1e-12);
        let count = |s: f64| g.count_eigen_above(s);
        Ok(qsep::top_values(&count, k.min(self.n()), -ub, ub, 1e-13, 1e-15 * ub))
    }
}

#[cfg(test)]
mod tests;
