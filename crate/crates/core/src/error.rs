use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid symbol: {0}")]
    InvalidSymbol(String),
    #[error("operation `{op}` is not supported for {variant} symbols")]
    UnsupportedVariant { op: &'static str, variant: &'static str },
    #[error("empty interval [{lo}, {hi}]")]
    EmptyInterval { lo: f64, hi: f64 },
    #[error("interval must be finite, got [{lo}, {hi}]")]
    UnboundedInterval { lo: f64, hi: f64 },
    #[error("adaptive quadrature exceeded its depth limit on [{lo}, {hi}]")]
    QuadratureFailure { lo: f64, hi: f64 },
    #[error("no convergence after {levels} refinement levels (last change {last_change:e})")]
    NoConvergence { levels: usize, last_change: f64 },
    #[error("symbol is not nonincreasing and nonnegative")]
    NotMonotone,
    #[error("symbol is not integrable on (0, ∞)")]
    NonIntegrable,
    #[error("|φ'|^(1/2) is not integrable")]
    NonIntegrableRoot,
    #[error("symbol is not piecewise C¹ and continuous on (0, 1): {0}")]
    NotSmoothEnough(String),
    #[error("φ' > 0 detected near x = {0}")]
    PositiveDerivative(f64),
    #[error("φ(1) = {0} must vanish for the eigenvalue search")]
    NonzeroEndpoint(f64),
    #[error("could not bracket eigenvalue {index}")]
    BracketingFailure { index: usize },
    #[error("degenerate solution: {0}")]
    Degenerate(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}
