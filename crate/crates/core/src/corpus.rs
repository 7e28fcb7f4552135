//! Reference symbols and seeded random families used by the checks.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;

use crate::symbols::{Interpolation, Interval, Symbol};
use crate::C64;

#[derive(Clone, Debug)]
pub struct Entry {
    pub name: &'static str,
    pub symbol: Symbol,
    /// Interval on which the symbol is discretised (its support).
    pub interval: Interval,
}

fn entry(name: &'static str, symbol: Symbol) -> Entry {
    let interval = Interval::new(0.0, symbol.support().hi).expect("bounded corpus support");
    Entry { name, symbol, interval }
}

pub fn one_minus_x() -> Symbol {
    Symbol::poly_on(0.0, 1.0, &[1.0, -1.0]).expect("valid")
}

pub fn one_minus_x_squared() -> Symbol {
    Symbol::poly_on(0.0, 1.0, &[1.0, -2.0, 1.0]).expect("valid")
}

/// Continuous piecewise-linear 1 → 0.8 → 0 with a kink at ½.
pub fn tent() -> Symbol {
    let c = |v: &[f64]| v.iter().map(|x| C64::new(*x, 0.0)).collect::<Vec<_>>();
    Symbol::ppoly(vec![0.0, 0.5, 1.0], vec![c(&[1.0, -0.4]), c(&[1.6, -1.6])], None).expect("valid")
}

pub fn volterra() -> Symbol {
    Symbol::indicator(1.0).expect("valid")
}

/// `cos 2πt`, restricted to `[0, 1]` or extended with period 1.
pub fn cosine(periodic: bool) -> Symbol {
    let h = C64::new(0.5, 0.0);
    Symbol::trig(1.0, vec![h, C64::new(0.0, 0.0), h], periodic).expect("valid")
}

/// `x⁻¹` on `[1, ∞)`: bounded, not compact.
pub fn reciprocal_tail() -> Symbol {
    Symbol::power_on(1.0, f64::INFINITY, -1.0, &[1.0]).expect("valid")
}

/// The smooth monotone symbols with exact closed-form Sturm–Liouville data.
pub fn monotone_trio() -> Vec<(&'static str, Symbol)> {
    vec![("1-x", one_minus_x()), ("(1-x)^2", one_minus_x_squared()), ("tent", tent())]
}

/// Bounded-support symbols covering every variant.
pub fn smooth_corpus() -> Vec<Entry> {
    let grid: Vec<f64> = (0..=16).map(|k| k as f64 / 16.0).collect();
    let damped: Vec<f64> = grid.iter().map(|x| (-2.0 * x).exp() * (1.0 - x)).collect();
    let mut wave = vec![C64::new(0.0, 0.0); 7];
    wave[6] = C64::new(1.0, 0.0);
    let c = |v: &[f64]| v.iter().map(|x| C64::new(*x, 0.0)).collect::<Vec<_>>();
    vec![
        entry("1-x", one_minus_x()),
        entry("(1-x)^2", one_minus_x_squared()),
        entry("(1-x)^3", Symbol::poly_on(0.0, 1.0, &[1.0, -3.0, 3.0, -1.0]).expect("valid")),
        entry("tent", tent()),
        entry("x(1-x)", Symbol::poly_on(0.0, 1.0, &[0.0, 1.0, -1.0]).expect("valid")),
        entry("sqrt(x)", Symbol::power_on(0.0, 1.0, 0.5, &[1.0]).expect("valid")),
        entry("1-x/3", Symbol::poly_on(0.0, 3.0, &[1.0, -1.0 / 3.0]).expect("valid")),
        entry("cos(2pi x)", cosine(false)),
        entry("exp(6pi i x)", Symbol::trig(1.0, wave, false).expect("valid")),
        entry("sampled exp(-2x)(1-x)", Symbol::sampled_real(&grid, &damped, Interpolation::Linear).expect("valid")),
        entry(
            "two-piece",
            Symbol::ppoly(vec![0.0, 1.0, 2.0], vec![c(&[2.0, -1.0]), c(&[0.5, 0.0, -0.125])], None).expect("valid"),
        ),
        entry("step", Symbol::step_real(&[0.5, 1.0, 2.0], &[3.0, 1.0, 0.5]).expect("valid")),
    ]
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Step symbol with exactly `steps` nonzero telescoped coefficients:
/// breakpoints at least 0.05 apart, adjacent values differing by at least 0.1.
pub fn random_step(rng: &mut impl Rng, steps: usize, complex: bool) -> Symbol {
    let mut xs = Vec::with_capacity(steps);
    let mut x = 0.0;
    for _ in 0..steps {
        x += rng.random_range(0.05..0.5);
        xs.push(x);
    }
    let mut values: Vec<C64> = Vec::with_capacity(steps);
    let mut last = C64::new(0.0, 0.0);
    for _ in 0..steps {
        let v = loop {
            let re = rng.random_range(-2.0..2.0);
            let im = if complex { rng.random_range(-2.0..2.0) } else { 0.0 };
            let v = C64::new(re, im);
            if (v - last).norm() >= 0.1 {
                break v;
            }
        };
        values.push(v);
        last = v;
    }
    values.reverse();
    Symbol::step(xs, values).expect("valid random step")
}

/// Continuous, nonincreasing, nonnegative piecewise-linear symbol on `[0, b]`
/// vanishing at `b`.
pub fn random_monotone_linear(rng: &mut impl Rng, pieces: usize) -> Symbol {
    let mut xs = vec![0.0];
    for _ in 0..pieces {
        let last = *xs.last().expect("nonempty");
        xs.push(last + rng.random_range(0.1..1.0));
    }
    let mut vals = vec![0.0; pieces + 1];
    for i in (0..pieces).rev() {
        vals[i] = vals[i + 1] + rng.random_range(0.0..1.0);
    }
    vals[0] += 0.05;
    let coeffs = (0..pieces)
        .map(|i| {
            let slope = (vals[i + 1] - vals[i]) / (xs[i + 1] - xs[i]);
            vec![C64::new(vals[i] - slope * xs[i], 0.0), C64::new(slope, 0.0)]
        })
        .collect();
    Symbol::ppoly(xs, coeffs, None).expect("valid random monotone symbol")
}

/// Complex vector with entries uniform in the unit square.
pub fn random_complex(rng: &mut impl Rng, n: usize) -> Vec<C64> {
    (0..n).map(|_| C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))).collect()
}

/// `π⁻²(n+½)⁻²`, the eigenvalues for φ = 1 − x.
pub fn one_minus_x_eigenvalue(n: usize) -> f64 {
    let m = n as f64 + 0.5;
    1.0 / (PI * PI * m * m)
}
