//! Spectral analysis of the integral operators
//!
//! ```text
//! (Q_φ f)(x) = ∫₀^∞ φ(max{x, y}) f(y) dy
//! ```
//!
//! on `L²(0, ∞)`, together with their triangular (Volterra) parts.
//!
//! The crate is organised by pipeline stage:
//!
//! | module | purpose |
//! |--------|---------|
//! | [`symbols`] | closed-form symbols φ, evaluation, scaling, variation, moduli |
//! | [`classify`] | dyadic norms and boundedness / compactness / Schatten verdicts |
//! | [`discretize`] | Galerkin compressions, structured spectra, Schatten reports |
//! | [`sturm`] | Prüfer-angle shooting for monotone smooth symbols on `[0, 1]` |
//! | [`matrixrep`] | weighted Hankel representation and the exponential symbol |
//! | [`verify`] | the acceptance checks, shared by the CLI and the test suite |
//!
//! Everything operates on immutable values, so all public functions are safe
//! to call from several threads at once.

pub mod classify;
pub mod corpus;
pub mod discretize;
mod error;
pub mod matrixrep;
pub(crate) mod quad;
pub mod report;
pub mod sturm;
pub mod symbols;
pub mod verify;

pub use error::{Error, Result};
pub use num_complex::Complex64 as C64;
