//! Text output: CSV tables with the resolved configuration in a comment
//! header, and JSON documents. Formatting is fully deterministic.

use serde::Serialize;
use serde_json::{json, Value};
use std::fmt::Write;

use crate::discretize::SpectrumEstimate;
use crate::matrixrep::GrowthRow;
use crate::sturm::EigenResult;

/// Shortest round-trip decimal form; identical input gives identical text.
pub fn fmt_f64(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x.is_infinite() {
        if x > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        format!("{x:e}")
    }
}

fn header(config: &Value) -> String {
    format!("# config: {}\n", serde_json::to_string(config).expect("config serializes"))
}

/// `n,s_n,method,level` rows for every refinement level (exact methods
/// have the single level 0).
pub fn spectrum_csv(config: &Value, est: &SpectrumEstimate) -> String {
    let mut out = header(config);
    out.push_str("n,s_n,method,level\n");
    let method = est.method.as_str();
    if est.refinement_history.is_empty() {
        for (i, s) in est.svals.iter().enumerate() {
            let _ = writeln!(out, "{i},{},{method},0", fmt_f64(*s));
        }
    } else {
        for (level, l) in est.refinement_history.iter().enumerate() {
            for (i, s) in l.svals.iter().enumerate() {
                let _ = writeln!(out, "{i},{},{method},{level}", fmt_f64(*s));
            }
        }
    }
    out
}

pub fn spectrum_json(config: &Value, est: &SpectrumEstimate) -> String {
    to_pretty(&json!({ "config": config, "spectrum": est }))
}

/// Sturm eigenvalues as `n,s_n,method,level` rows.
pub fn eigen_csv(config: &Value, eig: &[EigenResult]) -> String {
    let mut out = header(config);
    out.push_str("n,s_n,method,level\n");
    for e in eig {
        let _ = writeln!(out, "{},{},prufer,0", e.n, fmt_f64(e.lambda));
    }
    out
}

/// One eigenreport object `{"n","omega","lambda","residual"}` per value.
pub fn eigen_json(config: &Value, eig: &[EigenResult]) -> String {
    to_pretty(&json!({ "config": config, "eigenvalues": eig }))
}

/// Side-by-side Sturm and Galerkin values; returns the text and
/// the largest relative deviation.
pub fn compare_csv(config: &Value, eig: &[EigenResult], est: &SpectrumEstimate) -> (String, f64) {
    let mut out = header(config);
    out.push_str("n,sturm,galerkin,rel_dev\n");
    let mut worst = 0.0f64;
    for (e, g) in eig.iter().zip(&est.svals) {
        let dev = (g - e.lambda).abs() / e.lambda;
        worst = worst.max(dev);
        let _ = writeln!(out, "{},{},{},{}", e.n, fmt_f64(e.lambda), fmt_f64(*g), fmt_f64(dev));
    }
    let _ = writeln!(out, "# max_rel_dev: {}", fmt_f64(worst));
    (out, worst)
}

pub fn growth_csv(config: &Value, rows: &[GrowthRow]) -> String {
    let mut out = header(config);
    out.push_str("N,p,norm,reference,ratio\n");
    for r in rows {
        let _ = writeln!(out, "{},{},{},{},{}", r.n_freq, fmt_f64(r.p), fmt_f64(r.norm), fmt_f64(r.reference), fmt_f64(r.ratio));
    }
    out
}

pub fn to_pretty<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("report serializes");
    s.push('\n');
    s
}
