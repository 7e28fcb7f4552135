//! Wire format of symbols:
//! `{"kind":"step"|"ppoly"|"trig"|"sampled", ...variant fields..., "real":bool}`.
//!
//! Complex numbers are written either as a plain number or as `[re, im]`.
//! The last ppoly breakpoint may be the string `"inf"`.

use serde::{Deserialize, Serialize};

use super::{Interpolation, Symbol, SymbolKind};
use crate::{Error, C64};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum CNum {
    Real(f64),
    Pair([f64; 2]),
}

impl From<CNum> for C64 {
    fn from(c: CNum) -> C64 {
        match c {
            CNum::Real(r) => C64::new(r, 0.0),
            CNum::Pair([re, im]) => C64::new(re, im),
        }
    }
}

impl From<C64> for CNum {
    fn from(c: C64) -> CNum {
        if c.im == 0.0 {
            CNum::Real(c.re)
        } else {
            CNum::Pair([c.re, c.im])
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Bound {
    Finite(f64),
    Word(String),
}

impl TryFrom<&Bound> for f64 {
    type Error = Error;
    fn try_from(b: &Bound) -> Result<f64, Error> {
        match b {
            Bound::Finite(x) => Ok(*x),
            Bound::Word(w) if matches!(w.as_str(), "inf" | "+inf" | "infinity") => Ok(f64::INFINITY),
            Bound::Word(w) => Err(Error::InvalidSymbol(format!("unrecognised breakpoint {w:?}"))),
        }
    }
}

fn bound(x: f64) -> Bound {
    if x.is_infinite() {
        Bound::Word("inf".into())
    } else {
        Bound::Finite(x)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum SymbolJson {
    Step {
        breakpoints: Vec<f64>,
        values: Vec<CNum>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        real: Option<bool>,
    },
    Ppoly {
        breakpoints: Vec<Bound>,
        coeffs: Vec<Vec<CNum>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        powers: Option<Vec<f64>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        real: Option<bool>,
    },
    Trig {
        period: f64,
        coeffs: Vec<CNum>,
        #[serde(default)]
        periodic: bool,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        real: Option<bool>,
    },
    Sampled {
        grid: Vec<f64>,
        values: Vec<CNum>,
        #[serde(default = "default_interp")]
        interp: Interpolation,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        real: Option<bool>,
    },
}

fn default_interp() -> Interpolation {
    Interpolation::Linear
}

fn cs(v: Vec<CNum>) -> Vec<C64> {
    v.into_iter().map(C64::from).collect()
}

impl TryFrom<SymbolJson> for Symbol {
    type Error = Error;

    fn try_from(j: SymbolJson) -> Result<Symbol, Error> {
        let (sym, claimed) = match j {
            SymbolJson::Step { breakpoints, values, real } => (Symbol::step(breakpoints, cs(values))?, real),
            SymbolJson::Ppoly { breakpoints, coeffs, powers, real } => {
                let bps = breakpoints.iter().map(f64::try_from).collect::<Result<Vec<_>, _>>()?;
                (Symbol::ppoly(bps, coeffs.into_iter().map(cs).collect(), powers)?, real)
            }
            SymbolJson::Trig { period, coeffs, periodic, real } => (Symbol::trig(period, cs(coeffs), periodic)?, real),
            SymbolJson::Sampled { grid, values, interp, real } => (Symbol::sampled(grid, cs(values), interp)?, real),
        };
        if claimed == Some(true) && !sym.is_real() {
            return Err(Error::InvalidSymbol("symbol marked real has complex values".into()));
        }
        if claimed == Some(false) {
            return Ok(Symbol { real: false, ..sym });
        }
        Ok(sym)
    }
}

impl From<Symbol> for SymbolJson {
    fn from(s: Symbol) -> SymbolJson {
        let real = Some(s.real);
        let cn = |v: &[C64]| v.iter().map(|c| CNum::from(*c)).collect::<Vec<_>>();
        match &s.kind {
            SymbolKind::Step { breakpoints, values } => {
                SymbolJson::Step { breakpoints: breakpoints.clone(), values: cn(values), real }
            }
            SymbolKind::PiecewisePoly { breakpoints, coeffs, powers } => SymbolJson::Ppoly {
                breakpoints: breakpoints.iter().map(|x| bound(*x)).collect(),
                coeffs: coeffs.iter().map(|c| cn(c)).collect(),
                powers: if powers.iter().all(|p| *p == 0.0) { None } else { Some(powers.clone()) },
                real,
            },
            SymbolKind::TrigPoly { period, coeffs, periodic } => {
                SymbolJson::Trig { period: *period, coeffs: cn(coeffs), periodic: *periodic, real }
            }
            SymbolKind::Sampled { grid, values, interp } => {
                SymbolJson::Sampled { grid: grid.clone(), values: cn(values), interp: *interp, real }
            }
        }
    }
}

impl Symbol {
    /// Parses the JSON wire format.
    pub fn from_json(text: &str) -> crate::Result<Symbol> {
        let j: SymbolJson = serde_json::from_str(text).map_err(|e| Error::InvalidSymbol(e.to_string()))?;
        Symbol::try_from(j)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("symbols always serialise")
    }
}
