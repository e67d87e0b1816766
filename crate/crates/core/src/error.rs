use thiserror::Error;

/// Errors shared across the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid support: requires 0 < a < b < inf, got [{lo}, {hi}]")]
    InvalidSupport { lo: f64, hi: f64 },

    #[error("insufficient smoothness: polynomial bump needs k >= 3, got {k}")]
    InsufficientSmoothness { k: u32 },

    #[error("quadrature did not converge: error estimate {achieved:.3e} above target {target:.3e} after {panels} panels")]
    NoConvergence {
        achieved: f64,
        target: f64,
        panels: usize,
    },

    #[error("non-finite integrand value at r = {at}")]
    NonFiniteIntegrand { at: f64 },

    #[error("excluded parameter for {check}: {detail}")]
    ExcludedParameter { check: &'static str, detail: String },

    #[error("Hermitian-lemma constant c must be nonzero")]
    ZeroC,

    #[error("zero denominator in Rayleigh quotient")]
    ZeroDenominator,

    #[error("degenerate sampling: only {accepted} accepted points (need >= {needed})")]
    DegenerateSampling { accepted: u64, needed: u64 },

    #[error("overflow guard: log-width m = {m} exceeds {max}")]
    OverflowGuard { m: f64, max: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
