//! Inertia counts for semiseparable-plus-diagonal matrices.
//!
//! A Galerkin compression of Q_φ is `A = L + D` (lower mask) or
//! `A = L + Lᵀ + D` (full), with `L_ij = u_i w_j` for `i > j`. Singular values
//! are located by Sylvester's law of inertia applied to the Hermitian
//! dilation `[[0, A], [A*, 0]] − σ`, whose block LDL* factorisation in the
//! interleaved ordering costs O(n) because the strictly lower blocks have the
//! form `P_i Q_jᵀ`. Bisection on the counts then isolates every value.

use crate::C64;

const CZERO: C64 = C64::new(0.0, 0.0);

#[derive(Clone, Copy, Debug, Default)]
struct M2([[C64; 2]; 2]);

impl M2 {
    fn adjoint(&self) -> M2 {
        let a = &self.0;
        M2([[a[0][0].conj(), a[1][0].conj()], [a[0][1].conj(), a[1][1].conj()]])
    }

    fn mul(&self, o: &M2) -> M2 {
        let (a, b) = (&self.0, &o.0);
        let mut r = [[CZERO; 2]; 2];
        for i in 0..2 {
            for j in 0..2 {
                r[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
            }
        }
        M2(r)
    }

    fn add(&self, o: &M2) -> M2 {
        let (a, b) = (&self.0, &o.0);
        M2([[a[0][0] + b[0][0], a[0][1] + b[0][1]], [a[1][0] + b[1][0], a[1][1] + b[1][1]]])
    }
}

/// Positive-eigenvalue count and (regularised) inverse of the Hermitian
/// 2×2 matrix `[[α, β], [β̄, γ]]`.
fn hermitian_pivot(alpha: f64, beta: C64, gamma: f64, pivmin: f64) -> (usize, M2) {
    let mean = 0.5 * (alpha + gamma);
    let rad = (0.25 * (alpha - gamma).powi(2) + beta.norm_sqr()).sqrt();
    let clamp = |l: f64| if l.abs() < pivmin { -pivmin } else { l };
    let (l1, l2) = (clamp(mean + rad), clamp(mean - rad));
    let positive = (l1 > 0.0) as usize + (l2 > 0.0) as usize;
    let mut det = alpha * gamma - beta.norm_sqr();
    if det.abs() < pivmin * (l1.abs().max(l2.abs())) {
        det = l1 * l2;
    }
    let inv = M2([[C64::new(gamma / det, 0.0), -beta / det], [-beta.conj() / det, C64::new(alpha / det, 0.0)]]);
    (positive, inv)
}

/// Generators of a semiseparable-plus-diagonal matrix.
#[derive(Clone, Copy, Debug)]
pub(crate) struct Generators<'a> {
    pub u: &'a [C64],
    pub w: &'a [f64],
    pub diag: &'a [C64],
    /// `true` for `L + Lᵀ + D`, `false` for `L + D`.
    pub symmetric: bool,
}

impl Generators<'_> {
    pub fn len(&self) -> usize {
        self.diag.len()
    }

    /// Frobenius norm, an upper bound for every singular value.
    pub fn frobenius(&self) -> f64 {
        let mut w2 = 0.0;
        let mut acc = 0.0;
        for i in 0..self.len() {
            acc += self.u[i].norm_sqr() * w2 + self.diag[i].norm_sqr();
            w2 += self.w[i] * self.w[i];
        }
        if self.symmetric {
            acc += acc - self.diag.iter().map(|d| d.norm_sqr()).sum::<f64>();
        }
        acc.sqrt()
    }

    fn pivmin(&self) -> f64 {
        let scale = self.frobenius().max(f64::MIN_POSITIVE);
        f64::MIN_POSITIVE.sqrt() * scale
    }

    /// Number of singular values strictly greater than `sigma > 0`.
    pub fn count_singular_above(&self, sigma: f64) -> usize {
        if self.symmetric {
            self.count_full(sigma)
        } else {
            self.count_lower(sigma)
        }
    }

    fn count_lower(&self, sigma: f64) -> usize {
        let pivmin = self.pivmin();
        let mut s = 0.0f64;
        let mut count = 0;
        for k in 0..self.len() {
            let (u, w, a) = (self.u[k], self.w[k], self.diag[k]);
            let alpha = -sigma - u.norm_sqr() * s;
            let (pos, inv) = hermitian_pivot(alpha, a, -sigma, pivmin);
            count += pos;
            // r = [−S ū, w]
            let r = [-(u.conj() * s), C64::new(w, 0.0)];
            let i = &inv.0;
            let q = r[0] * i[0][0] * r[0].conj()
                + r[0] * i[0][1] * r[1].conj()
                + r[1] * i[1][0] * r[0].conj()
                + r[1] * i[1][1] * r[1].conj();
            s += q.re;
        }
        count
    }

    fn count_full(&self, sigma: f64) -> usize {
        let pivmin = self.pivmin();
        let mut s = M2::default();
        let mut count = 0;
        for k in 0..self.len() {
            let (u, w, d) = (self.u[k], C64::new(self.w[k], 0.0), self.diag[k]);
            let sm = &s.0;
            // D_k = [[−σ, d], [d̄, −σ]] − P S P*, P = diag(u, ū)
            let alpha = -sigma - u.norm_sqr() * sm[0][0].re;
            let gamma = -sigma - u.norm_sqr() * sm[1][1].re;
            let beta = d - u * u * sm[0][1];
            let (pos, inv) = hermitian_pivot(alpha, beta, gamma, pivmin);
            count += pos;
            // R* = Qᵀ − S P*, Qᵀ = [[0, w], [w, 0]], P* = diag(ū, u)
            let rs = M2([
                [-(sm[0][0] * u.conj()), w - sm[0][1] * u],
                [w - sm[1][0] * u.conj(), -(sm[1][1] * u)],
            ]);
            let upd = rs.mul(&inv).mul(&rs.adjoint());
            s = s.add(&upd);
            // keep S exactly Hermitian
            let off = 0.5 * (s.0[0][1] + s.0[1][0].conj());
            s.0[0][1] = off;
            s.0[1][0] = off.conj();
            s.0[0][0].im = 0.0;
            s.0[1][1].im = 0.0;
        }
        count
    }

    /// Number of eigenvalues strictly greater than `sigma` of the real
    /// symmetric matrix `L + Lᵀ + D` (generators must be real).
    pub fn count_eigen_above(&self, sigma: f64) -> usize {
        debug_assert!(self.symmetric);
        let pivmin = self.pivmin();
        let mut s = 0.0;
        let mut count = 0;
        for k in 0..self.len() {
            let (u, w, d) = (self.u[k].re, self.w[k], self.diag[k].re);
            let mut p = d - sigma - u * u * s;
            if p.abs() < pivmin {
                p = -pivmin;
            }
            if p > 0.0 {
                count += 1;
            }
            let r = w - s * u;
            s += r * r / p;
        }
        count
    }
}

/// The `k` largest values of a finite multiset in `(lo, hi]`, located from
/// `count(σ) = #{values > σ}` by bisection to relative width `rel_tol`.
///
/// Values at or below `floor` are reported as `floor`-level zeros.
pub(crate) fn top_values<F>(count: &F, k: usize, lo: f64, hi: f64, rel_tol: f64, floor: f64) -> Vec<f64>
where
    F: Fn(f64) -> usize + Sync,
{
    let mut out = vec![0.0; k];
    if k == 0 || hi <= lo {
        return out;
    }
    // Find a lower end holding at least k values, or the floor.
    let mut a = if lo != 0.0 { lo } else { hi * 0.5 };
    let mut ca = count(a);
    while ca < k && a > floor && a > lo {
        a = (a * 0.25).max(floor).max(lo);
        ca = count(a);
    }
    let ch = count(hi);
    let mut found: Vec<(usize, f64)> = Vec::new();
    bisect(count, a, ca, hi, ch, k, rel_tol, floor, &mut found, 0);
    for (i, v) in found {
        out[i] = v;
    }
    out
}

#[allow(clippy::too_many_arguments)]
fn bisect<F>(
    count: &F,
    a: f64,
    ca: usize,
    b: f64,
    cb: usize,
    k: usize,
    rel_tol: f64,
    floor: f64,
    out: &mut Vec<(usize, f64)>,
    depth: usize,
) where
    F: Fn(f64) -> usize + Sync,
{
    // values with descending index in [cb, ca) lie in (a, b]
    if ca <= cb || cb >= k {
        return;
    }
    let width = b - a;
    if width <= rel_tol * b.abs().max(a.abs()) || width <= floor * 1e-3 {
        let v = 0.5 * (a + b);
        out.extend((cb..ca.min(k)).map(|i| (i, v)));
        return;
    }
    let mid = if a > 0.0 && b > 4.0 * a { (a * b).sqrt() } else { 0.5 * (a + b) };
    let cm = count(mid);
    if depth < 12 && ca - cb > 1 && cm > cb && cm < ca {
        let (mut left, mut right) = (Vec::new(), Vec::new());
        rayon::join(
            || bisect(count, a, ca, mid, cm, k, rel_tol, floor, &mut left, depth + 1),
            || bisect(count, mid, cm, b, cb, k, rel_tol, floor, &mut right, depth + 1),
        );
        out.extend(right);
        out.extend(left);
    } else {
        bisect(count, mid, cm, b, cb, k, rel_tol, floor, out, depth + 1);
        bisect(count, a, ca, mid, cm, k, rel_tol, floor, out, depth + 1);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::DMatrix;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn dense(g: &Generators) -> DMatrix<C64> {
        let n = g.len();
        DMatrix::from_fn(n, n, |i, j| {
            if i > j {
                g.u[i] * g.w[j]
            } else if i == j {
                g.diag[i]
            } else if g.symmetric {
                g.u[j] * g.w[i]
            } else {
                CZERO
            }
        })
    }

    fn random(n: usize, complex: bool, rng: &mut ChaCha8Rng) -> (Vec<C64>, Vec<f64>, Vec<C64>) {
        let c = |rng: &mut ChaCha8Rng| {
            C64::new(rng.random_range(-1.0..1.0), if complex { rng.random_range(-1.0..1.0) } else { 0.0 })
        };
        let u = (0..n).map(|_| c(rng)).collect();
        let w = (0..n).map(|_| rng.random_range(0.1..1.0)).collect();
        let d = (0..n).map(|_| c(rng)).collect();
        (u, w, d)
    }

    #[test]
    fn counts_match_dense_svd() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for trial in 0..24 {
            let n = 3 + trial % 9;
            let symmetric = trial % 2 == 0;
            let (u, w, d) = random(n, trial % 3 != 0, &mut rng);
            let g = Generators { u: &u, w: &w, diag: &d, symmetric };
            let sv = dense(&g).singular_values();
            let ub = g.frobenius() * 1.01;
            let f = |s: f64| g.count_singular_above(s);
            let top = top_values(&f, n, 0.0, ub, 1e-13, 1e-14 * ub);
            let mut want: Vec<f64> = sv.iter().copied().collect();
            want.sort_by(|a, b| b.total_cmp(a));
            for (a, b) in top.iter().zip(&want) {
                assert!((a - b).abs() <= 1e-10 * want[0], "n={n} sym={symmetric}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn eigen_counts_match_dense() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for n in 2..14 {
            let (u, w, d) = random(n, false, &mut rng);
            let g = Generators { u: &u, w: &w, diag: &d, symmetric: true };
            let m = dense(&g).map(|z| z.re);
            let eig = m.symmetric_eigen().eigenvalues;
            for sigma in [-0.7, -0.1, 0.0, 0.05, 0.3, 1.1] {
                let want = eig.iter().filter(|e| **e > sigma).count();
                assert_eq!(g.count_eigen_above(sigma), want, "n={n} σ={sigma}");
            }
        }
    }
}
