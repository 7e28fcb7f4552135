//! `maxkernel` command-line driver.
//!
//! Exit codes: 0 success, 1 failed verification, 2 invalid input, 3 numeric failure.

use std::io::Write;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use maxkernel::classify::{self, Membership, Verdict};
use maxkernel::discretize::{self, SpectrumConfig, SpectrumEstimate};
use maxkernel::matrixrep;
use maxkernel::report;
use maxkernel::sturm;
use maxkernel::symbols::{Interval, Symbol};
use maxkernel::verify::{self, VerifyConfig};
use maxkernel::Error;

#[derive(Parser, Debug)]
#[command(name = "maxkernel", version, about = "Spectra of integral operators with kernel φ(max(x, y))")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    opts: Opts,
}

#[derive(Subcommand, Debug, Clone, Copy, PartialEq, Eq)]
enum Command {
    /// Schatten-class verdicts for each requested p.
    Classify,
    /// Singular values by the method selected with --method.
    Spectrum,
    /// Shooting eigenvalues of a monotone symbol on [0, 1].
    Sturm,
    /// Weighted Hankel matrix of a periodic symbol.
    Hankel,
    /// Growth table of the exponential symbols e^{2πiNx}χ(0,1).
    Expdemo,
    /// Run the acceptance checks.
    Verify,
}

impl Command {
    fn name(self) -> &'static str {
        match self {
            Command::Classify => "classify",
            Command::Spectrum => "spectrum",
            Command::Sturm => "sturm",
            Command::Hankel => "hankel",
            Command::Expdemo => "expdemo",
            Command::Verify => "verify",
        }
    }
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
#[value(rename_all = "snake_case")]
enum SpecMethod {
    Galerkin,
    StepExact,
    Sturm,
    Exp,
    Hankel,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
enum Format {
    Csv,
    Json,
}

#[derive(Args, Debug)]
struct Opts {
    /// Symbol JSON, inline or as a file path.
    #[arg(long, global = true)]
    symbol: Option<String>,
    /// Schatten exponents, comma separated.
    #[arg(long, global = true, value_delimiter = ',')]
    p: Vec<f64>,
    /// Cells of the first Galerkin level (or Hankel half-size M).
    #[arg(long, global = true)]
    n: Option<usize>,
    /// Refinement tolerance; for verify, a factor on every pass threshold.
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Number of values to report.
    #[arg(long = "K", global = true)]
    k: Option<usize>,
    /// Frequencies of the exponential symbol, comma separated.
    #[arg(long = "N", global = true, value_delimiter = ',')]
    freq: Vec<u64>,
    #[arg(long, global = true, value_enum)]
    method: Option<SpecMethod>,
    #[arg(long, global = true)]
    out: Option<String>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Side-by-side Sturm and Galerkin values.
    #[arg(long, global = true)]
    compare: bool,
    /// Restrict verify to these families or ids.
    #[arg(long, global = true, value_delimiter = ',')]
    only: Vec<String>,
    /// Interval `lo,hi` for the Galerkin compression.
    #[arg(long, global = true, value_delimiter = ',', num_args = 2)]
    interval: Vec<f64>,
}

enum Failure {
    Input(String),
    Numeric(String),
    Verify(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Verify(_) => 1,
            Failure::Input(_) => 2,
            Failure::Numeric(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Input(m) | Failure::Numeric(m) | Failure::Verify(m) => m,
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::QuadratureFailure { .. }
            | Error::NoConvergence { .. }
            | Error::BracketingFailure { .. }
            | Error::Degenerate(_) => Failure::Numeric(e.to_string()),
            _ => Failure::Input(e.to_string()),
        }
    }
}

type Run<T> = Result<T, Failure>;

fn input(msg: impl Into<String>) -> Failure {
    Failure::Input(msg.into())
}

fn threads() -> Run<Option<usize>> {
    let Ok(v) = std::env::var("MAXKERNEL_THREADS") else { return Ok(None) };
    let n: usize = v.trim().parse().map_err(|_| input(format!("MAXKERNEL_THREADS must be a positive integer, got {v:?}")))?;
    if n == 0 {
        return Err(input("MAXKERNEL_THREADS must be at least 1"));
    }
    rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(|e| input(e.to_string()))?;
    Ok(Some(n))
}

fn load_symbol(src: Option<&str>) -> Run<Symbol> {
    let src = src.ok_or_else(|| input("--symbol is required"))?;
    let text = if src.trim_start().starts_with('{') {
        src.to_string()
    } else {
        std::fs::read_to_string(src).map_err(|e| input(format!("cannot read {src}: {e}")))?
    };
    Ok(Symbol::from_json(&text)?)
}

fn symbol_value(s: &Symbol) -> Value {
    serde_json::from_str(&s.to_json()).expect("symbol JSON is valid")
}

struct Job {
    command: Command,
    opts: Opts,
    threads: Option<usize>,
}

impl Job {
    fn format(&self) -> Format {
        self.opts.format.unwrap_or(Format::Csv)
    }

    fn config(&self, extra: Value) -> Value {
        let mut c = json!({
            "command": self.command.name(),
            "format": match self.format() { Format::Csv => "csv", Format::Json => "json" },
            "out": self.opts.out,
            "threads": self.threads.unwrap_or_else(rayon::current_num_threads),
            "version": env!("CARGO_PKG_VERSION"),
        });
        if let (Value::Object(m), Value::Object(e)) = (&mut c, extra) {
            m.extend(e);
        }
        c
    }

    fn count(&self, default: usize) -> Run<usize> {
        match self.opts.k {
            Some(0) => Err(input("--K must be at least 1")),
            Some(k) => Ok(k),
            None => Ok(default),
        }
    }

    fn interval(&self, s: &Symbol, tol: f64) -> Run<Interval> {
        match self.opts.interval.as_slice() {
            [] => Ok(discretize::truncation_interval(s, tol)?),
            [lo, hi] => Ok(Interval::new(*lo, *hi)?),
            _ => Err(input("--interval takes lo,hi")),
        }
    }
}

fn membership_word(v: &Verdict) -> &'static str {
    match v.verdict {
        Membership::DefinitelyIn => "in",
        Membership::DefinitelyOut => "out",
        Membership::Unknown => "unknown",
    }
}

fn cmd_classify(job: &Job) -> Run<String> {
    let s = load_symbol(job.opts.symbol.as_deref())?;
    let ps = if job.opts.p.is_empty() { vec![1.0] } else { job.opts.p.clone() };
    if let Some(p) = ps.iter().find(|p| !(**p > 0.0 && p.is_finite())) {
        return Err(input(format!("p must be positive, got {p}")));
    }
    let verdicts: Vec<(f64, Verdict)> = ps.iter().map(|p| (*p, classify::classify_schatten(&s, *p))).collect();
    let bounded = classify::is_bounded(&s);
    let compact = classify::is_compact(&s);
    let config = job.config(json!({ "symbol": symbol_value(&s), "p": ps }));
    if let Some((p, _)) = verdicts.iter().find(|(_, v)| v.criterion == "numeric_failure") {
        return Err(Failure::Numeric(format!("classification at p = {p} failed numerically")));
    }
    let out = match job.format() {
        Format::Json => report::to_pretty(&json!({
            "config": config,
            "bounded": bounded,
            "compact": compact,
            "verdicts": verdicts.iter().map(|(p, v)| json!({ "p": p, "result": v })).collect::<Vec<_>>(),
        })),
        Format::Csv => {
            let mut o = format!("# config: {}\n", config);
            o.push_str(&format!("bounded: {} ({}) {}\n", membership_word(&bounded), bounded.criterion, bounded.to_json()));
            o.push_str(&format!("compact: {} ({}) {}\n", membership_word(&compact), compact.criterion, compact.to_json()));
            for (p, v) in &verdicts {
                o.push_str(&format!("p={}: {} ({}) {}\n", report::fmt_f64(*p), membership_word(v), v.criterion, v.to_json()));
            }
            o
        }
    };
    Ok(out)
}

fn galerkin(job: &Job, s: &Symbol, count: usize) -> Run<(SpectrumEstimate, Value)> {
    let tol = job.opts.tol.unwrap_or(1e-4);
    if !(tol > 0.0) {
        return Err(input("--tol must be positive"));
    }
    let iv = job.interval(s, tol)?;
    let cfg = SpectrumConfig {
        n0: job.opts.n.unwrap_or(64),
        tol,
        tracked: count.min(16),
        count,
        ..SpectrumConfig::default()
    };
    let cv = json!({ "interval": [iv.lo, iv.hi], "n0": cfg.n0, "tol": cfg.tol, "tracked": cfg.tracked,
                     "max_doublings": cfg.max_doublings, "grid": cfg.grid, "mask": cfg.mask });
    Ok((discretize::spectrum(s, iv, &cfg)?, cv))
}

fn spectrum_output(job: &Job, config: Value, est: &SpectrumEstimate) -> String {
    match job.format() {
        Format::Csv => report::spectrum_csv(&config, est),
        Format::Json => report::spectrum_json(&config, est),
    }
}

fn sturm_output(job: &Job, s: &Symbol, count: usize) -> Run<String> {
    let eig = sturm::eigenvalues(s, count)?;
    let mut extra = json!({ "symbol": symbol_value(s), "method": "sturm", "K": count });
    if job.opts.compare {
        let (est, cv) = galerkin(job, s, count)?;
        extra["galerkin"] = cv;
        let config = job.config(extra);
        let (csv, worst) = report::compare_csv(&config, &eig, &est);
        return Ok(match job.format() {
            Format::Csv => csv,
            Format::Json => report::to_pretty(&json!({
                "config": config, "eigenvalues": eig, "galerkin": est.svals, "max_rel_dev": worst,
            })),
        });
    }
    let config = job.config(extra);
    Ok(match job.format() {
        Format::Csv => report::eigen_csv(&config, &eig),
        Format::Json => report::eigen_json(&config, &eig),
    })
}

fn exp_freq(job: &Job) -> Run<u64> {
    match job.opts.freq.as_slice() {
        [] => Ok(16),
        [n] => Ok(*n),
        _ => Err(input("this command takes a single --N")),
    }
}

fn hankel_estimate(job: &Job, s: &Symbol) -> Run<(SpectrumEstimate, Value)> {
    let trig = s.kind().name() == "trig";
    let probe = matrixrep::fourier_coeffs(s, 256, None)?;
    let m = match job.opts.n {
        Some(m) => m,
        None => matrixrep::default_hankel_size(&probe, trig),
    };
    let coeffs = matrixrep::fourier_coeffs(s, 2 * m + 2, None)?;
    let h = matrixrep::hankel_window(&coeffs, m)?;
    let mut est = h.spectrum();
    if let Some(k) = job.opts.k {
        est.svals.truncate(k);
        est.errors.truncate(k);
    }
    Ok((est, json!({ "M": m, "period": coeffs.period, "coverage": h.coverage })))
}

fn cmd_spectrum(job: &Job) -> Run<String> {
    let method = job.opts.method.unwrap_or(SpecMethod::Galerkin);
    if method == SpecMethod::Exp {
        let n = exp_freq(job)?;
        let count = job.count(64)?;
        let e = matrixrep::exp_symbol_svals(n, count)?;
        let config = job.config(json!({ "method": "exp", "N": n, "K": count }));
        return Ok(match job.format() {
            Format::Csv => report::spectrum_csv(&config, &e.estimate),
            Format::Json => report::to_pretty(&json!({ "config": config, "spectrum": e })),
        });
    }
    let s = load_symbol(job.opts.symbol.as_deref())?;
    match method {
        SpecMethod::Sturm => sturm_output(job, &s, job.count(16)?),
        SpecMethod::Galerkin => {
            let count = job.count(16)?;
            let (est, cv) = galerkin(job, &s, count)?;
            let config = job.config(json!({ "symbol": symbol_value(&s), "method": "galerkin", "K": count, "galerkin": cv }));
            Ok(spectrum_output(job, config, &est))
        }
        SpecMethod::StepExact => {
            let mut est = discretize::step_exact_spectrum(&s)?;
            if let Some(k) = job.opts.k {
                est.svals.truncate(k);
                est.errors.truncate(k);
            }
            let config = job.config(json!({ "symbol": symbol_value(&s), "method": "step_exact", "K": job.opts.k }));
            Ok(spectrum_output(job, config, &est))
        }
        SpecMethod::Hankel => {
            let (est, hv) = hankel_estimate(job, &s)?;
            let config = job.config(json!({ "symbol": symbol_value(&s), "method": "hankel", "hankel": hv }));
            Ok(spectrum_output(job, config, &est))
        }
        SpecMethod::Exp => unreachable!("handled above"),
    }
}

fn cmd_sturm(job: &Job) -> Run<String> {
    let s = load_symbol(job.opts.symbol.as_deref())?;
    sturm_output(job, &s, job.count(16)?)
}

fn cmd_hankel(job: &Job) -> Run<String> {
    let s = load_symbol(job.opts.symbol.as_deref())?;
    let (est, hv) = hankel_estimate(job, &s)?;
    let config = job.config(json!({ "symbol": symbol_value(&s), "method": "hankel", "hankel": hv }));
    Ok(spectrum_output(job, config, &est))
}

fn cmd_expdemo(job: &Job) -> Run<String> {
    let ns = if job.opts.freq.is_empty() { vec![1, 4, 16, 64, 256] } else { job.opts.freq.clone() };
    let ps = if job.opts.p.is_empty() { vec![1.0, 0.75] } else { job.opts.p.clone() };
    if ns.contains(&0) {
        return Err(input("--N values must be at least 1"));
    }
    if let Some(p) = ps.iter().find(|p| !(**p > 0.5 && p.is_finite())) {
        return Err(input(format!("the power sums need p > 1/2, got {p}")));
    }
    let rows = matrixrep::exp_symbol_growth(&ns, &ps);
    let config = job.config(json!({ "N": ns, "p": ps }));
    Ok(match job.format() {
        Format::Csv => report::growth_csv(&config, &rows),
        Format::Json => {
            let count = job.count(1024)?;
            let shape: Vec<Value> = ns
                .iter()
                .map(|n| {
                    let e = matrixrep::exp_symbol_svals(*n, count).expect("N ≥ 1 checked above");
                    let (lo, hi) = matrixrep::exp_shape_ratios(&e);
                    json!({ "N": n, "K": count, "lower_ratio": lo, "upper_ratio": hi,
                            "parseval": matrixrep::exp_symbol_parseval(*n) })
                })
                .collect();
            report::to_pretty(&json!({
                "config": config,
                "growth": rows,
                "shape": shape,
                "shape_constants": [matrixrep::EXP_SHAPE_LOWER, matrixrep::EXP_SHAPE_UPPER],
            }))
        }
    })
}

fn cmd_verify(job: &Job) -> Run<String> {
    let cfg = VerifyConfig {
        only: job.opts.only.clone(),
        tol_scale: job.opts.tol.unwrap_or(1.0),
        ..VerifyConfig::default()
    };
    if !(cfg.tol_scale > 0.0 && cfg.tol_scale.is_finite()) {
        return Err(input("--tol must be a positive factor"));
    }
    let unknown = cfg.unknown_filters();
    if !unknown.is_empty() {
        return Err(input(format!("unknown criterion filter(s): {}", unknown.join(", "))));
    }
    let suite = verify::run(&cfg);
    let config = job.config(json!({ "only": cfg.only, "tol": cfg.tol_scale, "seed": cfg.seed }));
    let out = match job.format() {
        Format::Json => report::to_pretty(&json!({ "config": config, "outcomes": suite.outcomes, "all_pass": suite.all_pass() })),
        Format::Csv => {
            let mut o = format!("# config: {}\n", config);
            for r in &suite.outcomes {
                o.push_str(&r.line());
                o.push('\n');
            }
            o
        }
    };
    if suite.all_pass() {
        Ok(out)
    } else {
        emit(job, &out)?;
        let failed: Vec<&str> = suite.outcomes.iter().filter(|o| !o.pass).map(|o| o.criterion.family).collect();
        Err(Failure::Verify(format!("failed: {}", failed.join(", "))))
    }
}

fn emit(job: &Job, text: &str) -> Run<()> {
    match &job.opts.out {
        Some(path) => std::fs::write(path, text).map_err(|e| input(format!("cannot write {path}: {e}"))),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes()).and_then(|_| out.flush()).map_err(|e| input(e.to_string()))
        }
    }
}

fn run(cli: Cli) -> Run<()> {
    let threads = threads()?;
    let job = Job { command: cli.command, opts: cli.opts, threads };
    let text = match job.command {
        Command::Classify => cmd_classify(&job)?,
        Command::Spectrum => cmd_spectrum(&job)?,
        Command::Sturm => cmd_sturm(&job)?,
        Command::Hankel => cmd_hankel(&job)?,
        Command::Expdemo => cmd_expdemo(&job)?,
        Command::Verify => cmd_verify(&job)?,
    };
    emit(&job, &text)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}
