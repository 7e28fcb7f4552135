//! The acceptance suite: twelve numerical checks, each reducing to a
//! pass/fail line with the measured quantities attached.

use serde::Serialize;
use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::sync::OnceLock;
use std::time::Instant;

use rand::Rng;

use crate::discretize::{
    factor_residual, galerkin_matrix, galerkin_on_edges, spectrum_at, step_exact_spectrum, triangular_limit,
    uniform_edges_with, Grid, Mask, TriangularConfig,
};
use crate::matrixrep::{self, EXP_SHAPE_LOWER, EXP_SHAPE_UPPER, HANKEL_BAND};
use crate::sturm::{self, EigenResult};
use crate::symbols::{Interval, Symbol};
use crate::{classify, corpus, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Criterion {
    pub id: u8,
    /// Short name accepted by `--only`.
    pub family: &'static str,
    pub title: &'static str,
}

pub const CRITERIA: [Criterion; 12] = [
    Criterion { id: 1, family: "exact", title: "exact spectrum of 1-x (shooting and Galerkin)" },
    Criterion { id: 2, family: "trace", title: "trace equals the integral of the symbol" },
    Criterion { id: 3, family: "s2", title: "Hilbert-Schmidt norm identity" },
    Criterion { id: 4, family: "asymptotic", title: "n^2 s_n asymptotic law" },
    Criterion { id: 5, family: "volterra", title: "Volterra part n s_n limit" },
    Criterion { id: 6, family: "exp", title: "exponential symbol shape, growth and Parseval" },
    Criterion { id: 7, family: "finite_rank", title: "step symbols have rank equal to the step count" },
    Criterion { id: 8, family: "kronecker", title: "determinant of a(max(i,j))" },
    Criterion { id: 9, family: "positivity", title: "monotone symbols give positive operators" },
    Criterion { id: 10, family: "factorization", title: "factorization Q_phi = V*V" },
    Criterion { id: 11, family: "classification", title: "verdicts consistent with computed spectra" },
    Criterion { id: 12, family: "cross", title: "Hankel matrix against the [0,2] compression" },
];

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VerifyConfig {
    /// Families or ids to run; empty runs everything.
    pub only: Vec<String>,
    /// Multiplies every numeric pass threshold.
    pub tol_scale: f64,
    pub seed: u64,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig { only: Vec::new(), tol_scale: 1.0, seed: 20240611 }
    }
}

impl VerifyConfig {
    pub fn selects(&self, c: &Criterion) -> bool {
        self.only.is_empty() || self.only.iter().any(|o| o == c.family || o.parse::<u8>().ok() == Some(c.id))
    }

    /// Unknown `--only` entries.
    pub fn unknown_filters(&self) -> Vec<String> {
        self.only
            .iter()
            .filter(|o| !CRITERIA.iter().any(|c| *o == c.family || o.parse::<u8>().ok() == Some(c.id)))
            .cloned()
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Outcome {
    pub criterion: Criterion,
    pub pass: bool,
    pub seconds: f64,
    pub detail: String,
    pub metrics: BTreeMap<String, f64>,
}

impl Outcome {
    /// `PASS [3] s2: ... (detail)`
    pub fn line(&self) -> String {
        format!(
            "{} [{:>2}] {}: {} ({})",
            if self.pass { "PASS" } else { "FAIL" },
            self.criterion.id,
            self.criterion.family,
            self.criterion.title,
            self.detail
        )
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Suite {
    pub config: VerifyConfig,
    pub outcomes: Vec<Outcome>,
}

impl Suite {
    pub fn all_pass(&self) -> bool {
        self.outcomes.iter().all(|o| o.pass)
    }
}

struct Check {
    pass: bool,
    detail: String,
    metrics: BTreeMap<String, f64>,
}

impl Check {
    fn new() -> Self {
        Check { pass: true, detail: String::new(), metrics: BTreeMap::new() }
    }

    fn metric(&mut self, k: impl Into<String>, v: f64) {
        self.metrics.insert(k.into(), v);
    }

    /// Records `value < bound` as a condition of the check.
    fn below(&mut self, name: &str, value: f64, bound: f64) {
        let ok = value < bound;
        self.pass &= ok;
        self.metric(name, value);
        self.note(format!("{name}={value:.3e}{}{bound:.1e}", if ok { "<" } else { ">=" }));
    }

    fn require(&mut self, ok: bool, what: impl Into<String>) {
        self.pass &= ok;
        if !ok {
            self.note(format!("failed: {}", what.into()));
        }
    }

    fn note(&mut self, s: String) {
        if !self.detail.is_empty() {
            self.detail.push_str("; ");
        }
        self.detail.push_str(&s);
    }
}

/// Shooting eigenvalues of the monotone trio, shared by two checks.
struct Shared {
    trio: OnceLock<std::result::Result<Vec<(&'static str, Symbol, Vec<EigenResult>)>, String>>,
}

const TRIO_COUNT: usize = 201;

impl Shared {
    fn trio(&self) -> std::result::Result<&[(&'static str, Symbol, Vec<EigenResult>)], String> {
        use rayon::prelude::*;
        self.trio
            .get_or_init(|| {
                corpus::monotone_trio()
                    .into_par_iter()
                    .map(|(name, s)| {
                        let e = sturm::eigenvalues(&s, TRIO_COUNT).map_err(|e| format!("{name}: {e}"))?;
                        Ok((name, s, e))
                    })
                    .collect()
            })
            .as_deref()
            .map_err(Clone::clone)
    }
}

pub fn run(cfg: &VerifyConfig) -> Suite {
    let shared = Shared { trio: OnceLock::new() };
    let outcomes = CRITERIA.iter().filter(|c| cfg.selects(c)).map(|c| run_with(c, cfg, &shared)).collect();
    Suite { config: cfg.clone(), outcomes }
}

pub fn run_one(id: u8, cfg: &VerifyConfig) -> Option<Outcome> {
    let shared = Shared { trio: OnceLock::new() };
    CRITERIA.iter().find(|c| c.id == id).map(|c| run_with(c, cfg, &shared))
}

fn run_with(c: &Criterion, cfg: &VerifyConfig, shared: &Shared) -> Outcome {
    let t0 = Instant::now();
    let mut chk = Check::new();
    let res = match c.id {
        1 => exact_spectrum(&mut chk, cfg),
        2 => trace(&mut chk, cfg, shared),
        3 => hilbert_schmidt(&mut chk, cfg),
        4 => asymptotic(&mut chk, cfg, shared),
        5 => volterra(&mut chk, cfg),
        6 => exponential(&mut chk, cfg),
        7 => finite_rank(&mut chk, cfg),
        8 => kronecker(&mut chk, cfg),
        9 => positivity(&mut chk, cfg),
        10 => factorization(&mut chk, cfg),
        11 => classification(&mut chk, cfg),
        _ => cross(&mut chk, cfg),
    };
    if let Err(e) = res {
        chk.pass = false;
        chk.note(format!("error: {e}"));
    }
    Outcome { criterion: *c, pass: chk.pass, seconds: t0.elapsed().as_secs_f64(), detail: chk.detail, metrics: chk.metrics }
}

fn max_rel(pairs: impl Iterator<Item = (f64, f64)>) -> f64 {
    pairs.map(|(got, want)| (got - want).abs() / want.abs()).fold(0.0, f64::max)
}

fn exact_spectrum(chk: &mut Check, cfg: &VerifyConfig) -> Result<()> {
    let s = corpus::one_minus_x();
    let t0 = Instant::now();
    let eig = sturm::eigenvalues(&s, 21)?;
    let secs = t0.elapsed().as_secs_f64();
    let err = max_rel(eig.iter().map(|e| (e.lambda, corpus::one_minus_x_eigenvalue(e.n))));
    chk.below("sturm_rel_err", err, 1e-8 * cfg.tol_scale);
    chk.below("sturm_seconds", secs, 5.0);
    let est = spectrum_at(&s, Interval::unit(), 4096, 21, &Grid::Uniform, Mask::Full)?;
    let err = max_rel(est.svals.iter().enumerate().map(|(n, v)| (*v, corpus::one_minus_x_eigenvalue(n))));
    chk.below("galerkin4096_rel_err", err, 1e-3 * cfg.tol_scale);
    Ok(())
}

/// `λ_{K−1}(K−½)² Σ_{n≥K}(n+½)⁻²`: the tail under the `(n+½)⁻²` law.
fn trace_tail(eig: &[EigenResult], k: usize) -> f64 {
    let last = &eig[k - 1];
    let m = last.n as f64 + 0.5;
    last.lambda * m * m * sturm::inverse_square_tail(k)
}

fn trace(chk: &mut Check, cfg: &VerifyConfig, shared: &Shared) -> Result<()> {
    let trio = shared.trio().map_err(crate::Error::Degenerate)?;
    for (name, s, eig) in trio {
        let k = 200;
        let sum: f64 = eig[..k].iter().map(|e| e.lambda).sum::<f64>() + trace_tail(eig, k);
        let want = s.integral(0.0, 1.0).re;
        chk.below(&format!("{name}_rel_err"), (sum - want).abs() / want, 1e-4 * cfg.tol_scale);
    }
    Ok(())
}

fn hilbert_schmidt(chk: &mut Check, cfg: &VerifyConfig) -> Result<()> {
    let mut worst = 0.0f64;
    let entries = corpus::smooth_corpus();
    for e in &entries {
        let m = galerkin_matrix(&e.symbol, e.interval, 4096, &Grid::Uniform, Mask::Full)?;
        let want = (2.0 * e.symbol.x_l2sq(e.interval.lo, e.interval.hi)).sqrt();
        let rel = (m.frobenius() - want).abs() / want;
        chk.metric(format!("{}_rel_err", e.name), rel);
        worst = worst.max(rel);
    }
    chk.metric("symbols", entries.len() as f64);
    chk.require(entries.len() >= 10, "at least ten corpus symbols");
    chk.below("max_rel_err", worst, 1e-2 * cfg.tol_scale);
    Ok(())
}

fn asymptotic(chk: &mut Check, cfg: &VerifyConfig, shared: &Shared) -> Result<()> {
    let trio = shared.trio().map_err(crate::Error::Degenerate)?;
    for (name, s, eig) in trio {
        let c = sturm::asymptotic_constant(s)?;
        let dev = eig[50..=200]
            .iter()
            .map(|e| ((e.n * e.n) as f64 * e.lambda / c - 1.0).abs())
            .fold(0.0, f64::max);
        chk.below(&format!("{name}_max_dev"), dev, 0.05 * cfg.tol_scale);
    }
    let mut rng = corpus::rng(cfg.seed ^ 4);
    let s = corpus::random_step(&mut rng, 7, false);
    let iv = Interval::new(0.0, s.support().hi)?;
    let m = galerkin_on_edges(&s, iv, uniform_edges_with(iv, 1024, &s.breakpoints()), Mask::Full)?;
    let sv = m.singular_values(101);
    let ratio = 100.0 * 100.0 * sv[100] / sv[0];
    chk.below("step_n2s100_over_s0", ratio, 1e-2);
    Ok(())
}

fn volterra(chk: &mut Check, cfg: &VerifyConfig) -> Result<()> {
    let tcfg = TriangularConfig::default();
    let t = triangular_limit(&corpus::volterra(), Interval::unit(), &tcfg)?;
    chk.below("limit_dev", (t.limit - 1.0 / PI).abs(), 1e-3 * cfg.tol_scale);
    let raw = t.products.iter().map(|p| (p - 1.0 / PI).abs()).fold(0.0, f64::max);
    chk.metric("raw_product_max_dev", raw);
    let err = max_rel((tcfg.n_lo..=tcfg.n_hi).map(|n| (t.svals[n], 1.0 / (PI * (n as f64 + 0.5)))));
    chk.below("masked_rel_err", err, 1e-4 * cfg.tol_scale);
    Ok(())
}

const EXP_FREQS: [u64; 5] = [1, 4, 16, 64, 256];

fn bracket(v: &[f64]) -> f64 {
    let hi = v.iter().copied().fold(0.0, f64::max);
    let lo = v.iter().copied().fold(f64::INFINITY, f64::min);
    hi / lo
}

fn exponential(chk: &mut Check, cfg: &VerifyConfig) -> Result<()> {
    let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
    let mut parseval = 0.0f64;
    for n in EXP_FREQS {
        let e = matrixrep::exp_symbol_svals(n, 4096)?;
        let (l, h) = matrixrep::exp_shape_ratios(&e);
        lo = lo.min(l);
        hi = hi.max(h);
        let pv = matrixrep::exp_symbol_parseval(n);
        parseval = parseval.max((pv.normalized - pv.l2_norm_sq).abs());
    }
    chk.metric("shape_lower_ratio", lo);
    chk.metric("shape_upper_ratio", hi);
    chk.require(lo >= EXP_SHAPE_LOWER, format!("lower shape ratio {lo:.4} < {EXP_SHAPE_LOWER}"));
    chk.require(hi <= EXP_SHAPE_UPPER, format!("upper shape ratio {hi:.4} > {EXP_SHAPE_UPPER}"));
    chk.note(format!("shape ratios in [{lo:.4}, {hi:.3}]"));
    let rows = matrixrep::exp_symbol_growth(&EXP_FREQS, &[1.0, 0.75]);
    let ratios = |p: f64| rows.iter().filter(|r| r.p == p).map(|r| r.ratio).collect::<Vec<_>>();
    chk.below("s1_bracket", bracket(&ratios(1.0)), 4.0);
    chk.below("s34_bracket", bracket(&ratios(0.75)), 4.0);
    chk.below("parseval_abs_err", parseval, 1e-12 * cfg.tol_scale);
    Ok(())
}

fn finite_rank(chk: &mut Check, cfg: &VerifyConfig) -> Result<()> {
    let mut rng = corpus::rng(cfg.seed ^ 7);
    let mut rank_ok = 0usize;
    let mut worst = 0.0f64;
    let total = 50;
    for i in 0..total {
        let steps = rng.random_range(1..=12);
        let s = corpus::random_step(&mut rng, steps, i % 2 == 1);
        let exact = step_exact_spectrum(&s)?;
        let s0 = exact.svals[0];
        let rank = exact.svals.iter().filter(|v| **v > 1e-12 * s0).count();
        if rank == steps && classify::detect_step(&s) == Some(steps) {
            rank_ok += 1;
        }
        let iv = Interval::new(0.0, s.support().hi)?;
        let m = galerkin_on_edges(&s, iv, uniform_edges_with(iv, 64 * steps, &s.breakpoints()), Mask::Full)?;
        let g = m.singular_values(steps);
        worst = worst.max(max_rel(g.iter().zip(&exact.svals).map(|(a, b)| (*a, *b))));
    }
    chk.metric("rank_matches", rank_ok as f64);
    chk.require(rank_ok == total, format!("rank equals step count for {rank_ok}/{total}"));
    chk.note(format!("rank equals step count for {rank_ok}/{total}"));
    chk.below("galerkin_rel_err", worst, 1e-8 * cfg.tol_scale);
    Ok(())
}

fn kronecker(chk: &mut Check, cfg: &VerifyConfig) -> Result<()> {
    let mut rng = corpus::rng(cfg.seed ^ 8);
    let mut worst = 0.0f64;
    for _ in 0..1000 {
        let n = rng.random_range(1..=8);
        let a = corpus::random_complex(&mut rng, n);
        worst = worst.max(classify::kronecker_det(&a)?.relative_error());
    }
    chk.below("max_rel_err", worst, 1e-12 * cfg.tol_scale);
    Ok(())
}

fn positivity(chk: &mut Check, cfg: &VerifyConfig) -> Result<()> {
    let mut rng = corpus::rng(cfg.seed ^ 9);
    let mut worst = f64::INFINITY;
    for _ in 0..20 {
        let pieces = rng.random_range(1..=6);
        let s = corpus::random_monotone_linear(&mut rng, pieces);
        let iv = Interval::new(0.0, s.support().hi)?;
        let m = galerkin_matrix(&s, iv, 512, &Grid::Uniform, Mask::Full)?;
        let s0 = m.singular_values(1)[0];
        worst = worst.min(m.min_eigenvalue()? / s0);
    }
    chk.metric("min_eig_over_s0", worst);
    chk.require(worst > -1e-10 * cfg.tol_scale, format!("min eigenvalue / s0 = {worst:.3e}"));
    chk.note(format!("min eigenvalue / s0 = {worst:.3e}"));
    Ok(())
}

fn factorization(chk: &mut Check, cfg: &VerifyConfig) -> Result<()> {
    for (name, s) in [("1-x", corpus::one_minus_x()), ("(1-x)^2", corpus::one_minus_x_squared())] {
        let r: Vec<f64> = [512, 1024, 2048].iter().map(|n| factor_residual(&s, *n)).collect::<Result<_>>()?;
        chk.metric(format!("{name}_residual_512"), r[0]);
        chk.metric(format!("{name}_residual_1024"), r[1]);
        chk.require(r[0] > r[1] && r[1] > r[2], format!("{name} residual decreasing: {r:?}"));
        chk.below(&format!("{name}_residual_2048"), r[2], 1e-3 * cfg.tol_scale);
    }
    Ok(())
}

/// Partial nuclear norms of the compressions of `x⁻¹χ_[1,∞)` to `[0, X]`.
pub fn reciprocal_tail_partial_sums(levels: &[f64]) -> Result<Vec<f64>> {
    let s = corpus::reciprocal_tail();
    levels
        .iter()
        .map(|&x| {
            let cells = (32.0 * x.log2()).ceil() as usize;
            let mut edges = vec![0.0];
            edges.extend((0..=cells).map(|k| x.powf(k as f64 / cells as f64)));
            *edges.last_mut().expect("nonempty") = x;
            let m = galerkin_on_edges(&s, Interval::new(0.0, x)?, edges, Mask::Full)?;
            Ok(m.to_dense().singular_values().iter().sum())
        })
        .collect()
}

/// `sₙ(1+n)^{1/p}` over the second half of the computed range stays below
/// its maximum over the first half.
fn weak_sequence_bounded(svals: &[f64], p: f64) -> (f64, f64) {
    let w: Vec<f64> = svals.iter().enumerate().map(|(n, s)| s * (1.0 + n as f64).powf(1.0 / p)).collect();
    let half = w.len() / 2;
    let head = w[..half].iter().copied().fold(0.0, f64::max);
    let tail = w[half..].iter().copied().fold(0.0, f64::max);
    (head, tail)
}

fn classification(chk: &mut Check, _cfg: &VerifyConfig) -> Result<()> {
    let mut symbols: Vec<(String, Symbol, Interval)> =
        corpus::smooth_corpus().into_iter().map(|e| (e.name.to_string(), e.symbol, e.interval)).collect();
    symbols.push(("indicator".into(), corpus::volterra(), Interval::unit()));
    let mut checked = 0usize;
    for (name, s, iv) in &symbols {
        let sv = galerkin_matrix(s, *iv, 1024, &Grid::Uniform, Mask::Full)?.singular_values(128);
        for p in [0.4, 0.5, 0.75, 1.0, 2.0] {
            if !classify::classify_schatten(s, p).is_in() {
                continue;
            }
            checked += 1;
            let (head, tail) = weak_sequence_bounded(&sv, p);
            chk.require(tail <= head, format!("{name} weak sequence grows at p={p}: {head:.3e} -> {tail:.3e}"));
        }
    }
    chk.metric("in_verdicts_checked", checked as f64);
    chk.require(checked > 0, "no in-verdicts to check");
    chk.note(format!("{checked} in-verdicts with bounded weak sequences"));
    let v = classify::classify_schatten(&corpus::reciprocal_tail(), 1.0);
    chk.require(v.is_out(), format!("x^-1 on [1,inf) at p=1 gave {:?}", v.verdict));
    let levels = [4.0, 16.0, 64.0, 256.0];
    let sums = reciprocal_tail_partial_sums(&levels)?;
    for (x, s) in levels.iter().zip(&sums) {
        chk.metric(format!("partial_s1_X{x}"), *s);
    }
    // each quadrupling of X adds at least half of the trace increment ln 4
    let diverging = sums.windows(2).all(|w| w[1] - w[0] >= 0.5 * 4f64.ln());
    chk.require(diverging, format!("partial sums not diverging: {sums:?}"));
    chk.note(format!("out at p=1 via {}; partial sums {:.3?}", v.criterion, sums));
    Ok(())
}

fn cross(chk: &mut Check, _cfg: &VerifyConfig) -> Result<()> {
    let s = corpus::cosine(true);
    let c = matrixrep::fourier_coeffs(&s, 8, None)?;
    let h = matrixrep::hankel_window(&c, 200)?.singular_values();
    let q = galerkin_matrix(&s, Interval::new(0.0, 2.0)?, 2048, &Grid::Uniform, Mask::Full)?;
    let qs = q.singular_values(40);
    let ratios: Vec<f64> = qs.iter().zip(&h).map(|(a, b)| a / b).collect();
    let lo = ratios.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = ratios.iter().copied().fold(0.0, f64::max);
    chk.metric("band_lo", lo);
    chk.metric("band_hi", hi);
    chk.require(lo >= HANKEL_BAND.0 && hi <= HANKEL_BAND.1, format!("ratios [{lo:.4}, {hi:.4}] outside band"));
    chk.note(format!("ratios in [{lo:.4}, {hi:.4}] within [{}, {}]", HANKEL_BAND.0, HANKEL_BAND.1));
    for t in [1e-1, 3e-2, 1e-2, 3e-3] {
        let ch = h.iter().filter(|x| **x > t).count();
        let (q_hi, q_lo) = (q.count_singular_above(HANKEL_BAND.1 * t), q.count_singular_above(HANKEL_BAND.0 * t));
        chk.metric(format!("count_hankel_{t}"), ch as f64);
        chk.metric(format!("count_galerkin_{t}"), q.count_singular_above(t) as f64);
        chk.require(q_hi <= ch && ch <= q_lo, format!("count at {t}: hankel {ch} outside [{q_hi}, {q_lo}]"));
    }
    Ok(())
}
