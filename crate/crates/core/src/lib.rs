//! Numerical laboratory for weighted Hardy- and Rellich-type identities
//! on the half line.
//!
//! The library verifies, to tight tolerances, a family of exact
//! equalities and inequalities relating the weighted norms
//! ||f||^2 = int |f(r)|^2 r^beta dr of a compactly supported function,
//! its derivatives, and the second-order operator
//! L_alpha = d^2/dr^2 + (alpha/r) d/dr:
//!
//! * the Hardy equality with explicit remainder and its shifted variant,
//! * two Rellich equalities with remainder terms, the substitution
//!   identity linking them, and the resulting sharp inequality,
//! * the integration-by-parts chain behind the derivations,
//! * the polar reduction identifying weighted half-line norms with
//!   n-dimensional radial integrals, cross-validated by Monte Carlo,
//! * sharpness probes driving Rayleigh quotients toward the constants.
//!
//! Modules mirror that structure: [`funcspace`] builds test functions
//! with exact jets, [`operators`] the constants and pointwise operators,
//! [`quad`] adaptive weighted quadrature and the Monte Carlo oracle,
//! [`identities`] the named residual checks, [`extremal`] the sharpness
//! probes, and [`report`] deterministic CSV/JSON serialization.

pub mod error;
pub mod extremal;
pub mod funcspace;
pub mod identities;
pub mod operators;
pub mod quad;
pub mod report;

pub use error::{Error, Result};
