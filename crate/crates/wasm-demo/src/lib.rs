//! Browser bindings for a small interactive page (`www/index.html`).
//!
//! Each export takes plain values, returns a JSON document and fails with
//! a readable message. The `*_report` functions are the same operations
//! without the JS boundary, so they can be tested natively.

use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

use maxkernel::classify;
use maxkernel::discretize::{self, Grid, Mask};
use maxkernel::matrixrep;
use maxkernel::sturm;
use maxkernel::symbols::Symbol;

pub const MAX_CELLS: usize = 8192;
pub const MAX_COUNT: usize = 400;

fn parse(symbol_json: &str) -> Result<Symbol, String> {
    Symbol::from_json(symbol_json).map_err(|e| e.to_string())
}

fn bounded(name: &str, v: usize, lo: usize, hi: usize) -> Result<usize, String> {
    if v < lo || v > hi {
        Err(format!("{name} must lie in [{lo}, {hi}], got {v}"))
    } else {
        Ok(v)
    }
}

/// Galerkin singular values on `cells` uniform cells, with the shooting
/// eigenvalues alongside when the symbol is monotone, smooth and has φ(1) = 0.
pub fn spectrum_report(symbol_json: &str, cells: usize, count: usize) -> Result<String, String> {
    let s = parse(symbol_json)?;
    let cells = bounded("cells", cells, 2, MAX_CELLS)?;
    let count = bounded("count", count, 1, MAX_COUNT.min(cells))?;
    let iv = discretize::truncation_interval(&s, 1e-4).map_err(|e| e.to_string())?;
    let est = discretize::spectrum_at(&s, iv, cells, count, &Grid::Uniform, Mask::Full).map_err(|e| e.to_string())?;
    let (shooting, shooting_error) = match sturm::eigenvalues(&s, count.min(60)) {
        Ok(e) => (Some(e.iter().map(|r| r.lambda).collect::<Vec<f64>>()), None),
        Err(e) => (None, Some(e.to_string())),
    };
    let trace = classify::trace_value(&s).ok().map(|t| t.re);
    Ok(json!({
        "interval": [iv.lo, iv.hi],
        "cells": cells,
        "galerkin": est.svals,
        "shooting": shooting,
        "shooting_error": shooting_error,
        "trace": trace,
    })
    .to_string())
}

/// Boundedness, compactness and Schatten verdicts for a comma-separated list of p.
pub fn classify_report(symbol_json: &str, p_list: &str) -> Result<String, String> {
    let s = parse(symbol_json)?;
    let ps = p_list
        .split(',')
        .map(|t| t.trim().parse::<f64>().map_err(|_| format!("not a number: {t:?}")))
        .collect::<Result<Vec<f64>, String>>()?;
    if let Some(p) = ps.iter().find(|p| !(**p > 0.0 && p.is_finite())) {
        return Err(format!("p must be positive, got {p}"));
    }
    let verdicts: Vec<Value> = ps.iter().map(|p| json!({ "p": p, "result": classify::classify_schatten(&s, *p) })).collect();
    Ok(json!({
        "bounded": classify::is_bounded(&s),
        "compact": classify::is_compact(&s),
        "verdicts": verdicts,
    })
    .to_string())
}

/// Exact spectrum of the periodised operator for e^{2πiNx}χ(0,1), the
/// lower bounds for the operator itself, and the shape `min{1/(n+1), N/(n+1)²}`.
pub fn exp_report(n_freq: u32, count: usize) -> Result<String, String> {
    let count = bounded("count", count, 1, 4096)?;
    let e = matrixrep::exp_symbol_svals(n_freq.into(), count).map_err(|e| e.to_string())?;
    let shape: Vec<f64> = (0..count).map(|n| matrixrep::exp_shape(n_freq.into(), n)).collect();
    let (lo, hi) = matrixrep::exp_shape_ratios(&e);
    Ok(json!({
        "N": n_freq,
        "upper": e.upper_bounds(),
        "lower": e.lower_bounds,
        "shape": shape,
        "ratios": [lo, hi],
        "s1": matrixrep::exp_symbol_schatten(n_freq.into(), 1.0),
        "log_n_plus_1": (n_freq as f64 + 1.0).ln(),
    })
    .to_string())
}

#[wasm_bindgen]
pub fn galerkin_spectrum(symbol_json: &str, cells: usize, count: usize) -> Result<String, JsError> {
    spectrum_report(symbol_json, cells, count).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn classify_symbol(symbol_json: &str, p_list: &str) -> Result<String, JsError> {
    classify_report(symbol_json, p_list).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn exp_symbol_spectrum(n_freq: u32, count: usize) -> Result<String, JsError> {
    exp_report(n_freq, count).map_err(|e| JsError::new(&e))
}
