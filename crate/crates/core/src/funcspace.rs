//! Compactly supported test functions on (0, inf) carrying exact
//! second-order jets.
//!
//! Every function here vanishes identically outside a closed interval
//! [a, b] with 0 < a < b, so no downstream integral ever samples the
//! origin. Jets are closed-form; finite differences appear only in
//! cross-check tests.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Closed support interval [lo, hi], bounded away from 0.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Support {
    pub lo: f64,
    pub hi: f64,
}

impl Support {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if !(lo > 0.0 && hi > lo && hi.is_finite()) {
            return Err(Error::InvalidSupport { lo, hi });
        }
        Ok(Self { lo, hi })
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn contains(&self, r: f64) -> bool {
        r >= self.lo && r <= self.hi
    }
}

impl fmt::Display for Support {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.lo, self.hi)
    }
}

/// Value and first two derivatives of a function at a point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jet {
    pub v: Complex64,
    pub d1: Complex64,
    pub d2: Complex64,
}

impl Jet {
    pub const ZERO: Jet = Jet {
        v: Complex64::new(0.0, 0.0),
        d1: Complex64::new(0.0, 0.0),
        d2: Complex64::new(0.0, 0.0),
    };

    pub fn real(v: f64, d1: f64, d2: f64) -> Self {
        Jet {
            v: Complex64::new(v, 0.0),
            d1: Complex64::new(d1, 0.0),
            d2: Complex64::new(d2, 0.0),
        }
    }
}

pub(crate) type JetRule = Arc<dyn Fn(f64) -> Jet + Send + Sync>;

/// A twice continuously differentiable complex-valued function with
/// compact support in (0, inf), evaluated through its exact jet.
///
/// Immutable after construction; cloning shares the rule.
#[derive(Clone)]
pub struct TestFunction {
    support: Support,
    rule: JetRule,
    label: String,
}

impl fmt::Debug for TestFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TestFunction")
            .field("support", &self.support)
            .field("label", &self.label)
            .finish()
    }
}

impl TestFunction {
    fn new(support: Support, label: String, rule: JetRule) -> Self {
        Self {
            support,
            rule,
            label,
        }
    }

    /// Crate-internal escape hatch for constructions with bespoke jets
    /// (the log-scale extremizer family).
    pub(crate) fn from_rule(support: Support, label: String, rule: JetRule) -> Self {
        Self::new(support, label, rule)
    }

    pub fn support(&self) -> Support {
        self.support
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// Jet at r. Exactly zero outside the support interval.
    pub fn jet(&self, r: f64) -> Jet {
        if self.support.contains(r) {
            (self.rule)(r)
        } else {
            Jet::ZERO
        }
    }

    pub fn value(&self, r: f64) -> Complex64 {
        self.jet(r).v
    }

    /// r -> e^{i omega r} f(r); jet by the product rule.
    pub fn modulate(&self, omega: f64) -> TestFunction {
        let base = self.clone();
        let label = if omega == 0.0 {
            self.label.clone()
        } else {
            format!("{}*e^(i{}r)", self.label, omega)
        };
        TestFunction::new(
            self.support,
            label,
            Arc::new(move |r| {
                let j = base.jet(r);
                let phase = Complex64::new(0.0, omega * r).exp();
                let i_omega = Complex64::new(0.0, omega);
                Jet {
                    v: phase * j.v,
                    d1: phase * (j.d1 + i_omega * j.v),
                    d2: phase * (j.d2 + 2.0 * i_omega * j.d1 - omega * omega * j.v),
                }
            }),
        )
    }

    /// r -> r^gamma f(r); jet by the product rule. Support unchanged,
    /// so negative gamma never meets r = 0.
    pub fn scale_power(&self, gamma: f64) -> TestFunction {
        let base = self.clone();
        let label = if gamma == 0.0 {
            self.label.clone()
        } else {
            format!("{}*r^{}", self.label, gamma)
        };
        TestFunction::new(
            self.support,
            label,
            Arc::new(move |r| {
                let j = base.jet(r);
                let p = r.powf(gamma);
                let p1 = gamma * r.powf(gamma - 1.0);
                let p2 = gamma * (gamma - 1.0) * r.powf(gamma - 2.0);
                Jet {
                    v: p * j.v,
                    d1: p1 * j.v + p * j.d1,
                    d2: p2 * j.v + 2.0 * p1 * j.d1 + p * j.d2,
                }
            }),
        )
    }

    /// r -> f(lambda r); support becomes [a/lambda, b/lambda].
    ///
    /// Panics if lambda <= 0.
    pub fn dilate(&self, lambda: f64) -> TestFunction {
        assert!(lambda > 0.0, "dilation factor must be positive");
        let base = self.clone();
        let support = Support {
            lo: self.support.lo / lambda,
            hi: self.support.hi / lambda,
        };
        let label = if lambda == 1.0 {
            self.label.clone()
        } else {
            format!("{}@dil{}", self.label, lambda)
        };
        TestFunction::new(
            support,
            label,
            Arc::new(move |r| {
                let j = base.jet(lambda * r);
                Jet {
                    v: j.v,
                    d1: lambda * j.d1,
                    d2: lambda * lambda * j.d2,
                }
            }),
        )
    }
}

/// f(r) = ((r-a)(b-r))^k on [a, b], zero elsewhere. C^{k-1}, so k >= 3
/// guarantees the C^2 regularity every identity needs.
pub fn poly_bump(a: f64, b: f64, k: u32) -> Result<TestFunction> {
    let support = Support::new(a, b)?;
    if k < 3 {
        return Err(Error::InsufficientSmoothness { k });
    }
    let kf = k as f64;
    Ok(TestFunction::new(
        support,
        format!("poly({a},{b},{k})"),
        Arc::new(move |r| {
            let p = (r - a) * (b - r);
            if p <= 0.0 {
                return Jet::ZERO;
            }
            let p1 = (a + b) - 2.0 * r;
            let pk2 = p.powi(k as i32 - 2);
            let pk1 = pk2 * p;
            let pk = pk1 * p;
            Jet::real(
                pk,
                kf * pk1 * p1,
                kf * (kf - 1.0) * pk2 * p1 * p1 - 2.0 * kf * pk1,
            )
        }),
    ))
}

/// Jet of the reference mollifier chi(s) = exp(-1/(1-s^2)) on (-1, 1),
/// returned as (chi, chi', chi'').
pub(crate) fn mollifier_jet(s: f64) -> (f64, f64, f64) {
    let t = 1.0 - s * s;
    // chi and both derivatives are below 1e-300 here; exact zero avoids
    // inf * 0 when 1/t^3 overflows.
    if t <= 1e-6 {
        return (0.0, 0.0, 0.0);
    }
    let chi = (-1.0 / t).exp();
    let u1 = -2.0 * s / (t * t); // (ln chi)'
    let u2 = -2.0 * (1.0 + 3.0 * s * s) / (t * t * t); // (ln chi)''
    (chi, u1 * chi, (u2 + u1 * u1) * chi)
}

/// Smooth bump exp(-1/(1-s^2)) with s = (2r-a-b)/(b-a); a genuinely
/// C-infinity member of the corpus.
pub fn mollifier_bump(a: f64, b: f64) -> Result<TestFunction> {
    let support = Support::new(a, b)?;
    let c = 2.0 / (b - a);
    Ok(TestFunction::new(
        support,
        format!("moll({a},{b})"),
        Arc::new(move |r| {
            let s = c * r - (a + b) / (b - a);
            let (v, d1, d2) = mollifier_jet(s);
            Jet::real(v, c * d1, c * c * d2)
        }),
    ))
}

/// Which base bump a [`FamilySpec`] starts from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BumpKind {
    #[serde(rename = "polynomial-bump")]
    Polynomial,
    #[serde(rename = "mollifier-bump")]
    Mollifier,
}

/// Deterministic recipe for one corpus member. Optional fields are
/// combinators applied to the base bump, in the fixed order
/// power -> modulation -> dilation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FamilySpec {
    pub kind: BumpKind,
    pub a: f64,
    pub b: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub omega: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda: Option<f64>,
}

impl FamilySpec {
    pub fn poly(a: f64, b: f64, k: u32) -> Self {
        FamilySpec {
            kind: BumpKind::Polynomial,
            a,
            b,
            k: Some(k),
            omega: None,
            gamma: None,
            lambda: None,
        }
    }

    pub fn mollifier(a: f64, b: f64) -> Self {
        FamilySpec {
            kind: BumpKind::Mollifier,
            a,
            b,
            k: None,
            omega: None,
            gamma: None,
            lambda: None,
        }
    }

    pub fn with_omega(mut self, omega: f64) -> Self {
        self.omega = Some(omega);
        self
    }

    pub fn with_gamma(mut self, gamma: f64) -> Self {
        self.gamma = Some(gamma);
        self
    }

    pub fn with_lambda(mut self, lambda: f64) -> Self {
        self.lambda = Some(lambda);
        self
    }

    pub fn build(&self) -> Result<TestFunction> {
        let mut f = match self.kind {
            BumpKind::Polynomial => poly_bump(self.a, self.b, self.k.unwrap_or(3))?,
            BumpKind::Mollifier => mollifier_bump(self.a, self.b)?,
        };
        if let Some(gamma) = self.gamma {
            f = f.scale_power(gamma);
        }
        if let Some(omega) = self.omega {
            f = f.modulate(omega);
        }
        if let Some(lambda) = self.lambda {
            if !(lambda > 0.0) {
                return Err(Error::InvalidSupport {
                    lo: self.a / lambda,
                    hi: self.b / lambda,
                });
            }
            f = f.dilate(lambda);
        }
        Ok(f)
    }
}
