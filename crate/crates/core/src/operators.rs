//! The constants C_{alpha,beta}, H_Q, R_Q and the pointwise operators
//! built from second-order jets: the weighted second derivative
//! L_alpha = d^2/dr^2 + (alpha/r) d/dr and the remainder profiles
//! f* and f#.
//!
//! Operators are lazy: they map a jet source to a pointwise rule and
//! never precompute a grid. Bare (non compactly supported) handles are
//! admitted for unit testing; quadrature requires an explicit support
//! interval, so they can never leak into an integral by accident.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;

use crate::funcspace::{Jet, Support, TestFunction};

/// C_{alpha,beta} = (beta-3)(2 alpha - beta + 1)/4.
///
/// Vanishes exactly when beta = 3 or 2 alpha - beta + 1 = 0.
pub fn c_const(alpha: f64, beta: f64) -> f64 {
    (beta - 3.0) * (2.0 * alpha - beta + 1.0) / 4.0
}

/// H_Q = (Q-2)/2.
pub fn h_const(q: f64) -> f64 {
    (q - 2.0) / 2.0
}

/// R_Q = Q(Q-4)/4. Satisfies c_const(n-1, n-1) = r_const(n).
pub fn r_const(q: f64) -> f64 {
    q * (q - 4.0) / 4.0
}

/// Anything that yields a second-order jet at a radius.
pub trait JetFn: Send + Sync {
    fn jet(&self, r: f64) -> Jet;

    /// Compact support, if the source has one. Bare handles return None
    /// and are rejected wherever an integral needs a domain.
    fn support(&self) -> Option<Support> {
        None
    }
}

impl JetFn for TestFunction {
    fn jet(&self, r: f64) -> Jet {
        TestFunction::jet(self, r)
    }

    fn support(&self) -> Option<Support> {
        Some(TestFunction::support(self))
    }
}

/// Bare power r^gamma with its exact jet; unit-test handle only.
#[derive(Debug, Clone, Copy)]
pub struct PowerFn {
    pub exponent: f64,
}

impl PowerFn {
    pub fn new(exponent: f64) -> Self {
        Self { exponent }
    }
}

impl JetFn for PowerFn {
    fn jet(&self, r: f64) -> Jet {
        let g = self.exponent;
        Jet::real(
            r.powf(g),
            g * r.powf(g - 1.0),
            g * (g - 1.0) * r.powf(g - 2.0),
        )
    }
}

type PointRule = Arc<dyn Fn(f64) -> Complex64 + Send + Sync>;

/// A pointwise complex function computed from a source jet; vanishes
/// wherever the source does.
#[derive(Clone)]
pub struct DerivedFunction {
    support: Option<Support>,
    rule: PointRule,
    label: String,
}

impl fmt::Debug for DerivedFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("DerivedFunction")
            .field("support", &self.support)
            .field("label", &self.label)
            .finish()
    }
}

impl DerivedFunction {
    /// Build from a jet source and a rule receiving (r, jet of source at r).
    pub fn from_jet<J, R>(source: &J, label: impl Into<String>, rule: R) -> Self
    where
        J: JetFn + Clone + 'static,
        R: Fn(f64, Jet) -> Complex64 + Send + Sync + 'static,
    {
        let src = source.clone();
        DerivedFunction {
            support: source.support(),
            rule: Arc::new(move |r| rule(r, src.jet(r))),
            label: label.into(),
        }
    }

    pub fn eval(&self, r: f64) -> Complex64 {
        (self.rule)(r)
    }

    pub fn support(&self) -> Option<Support> {
        self.support
    }

    pub fn label(&self) -> &str {
        &self.label
    }
}

/// L_alpha f = f'' + (alpha/r) f'.
pub fn apply_l<J: JetFn + Clone + 'static>(alpha: f64, f: &J) -> DerivedFunction {
    DerivedFunction::from_jet(f, format!("L_{alpha}[f]"), move |r, j| {
        j.d2 + (alpha / r) * j.d1
    })
}

/// f* = f' + ((beta-3)/(2r)) f.
pub fn f_star<J: JetFn + Clone + 'static>(beta: f64, f: &J) -> DerivedFunction {
    let c = (beta - 3.0) / 2.0;
    DerivedFunction::from_jet(f, format!("fstar_{beta}"), move |r, j| j.d1 + (c / r) * j.v)
}

/// f# = f'' + ((beta-2)/r) f' + ((beta-3)^2/(4r^2)) f.
pub fn f_sharp<J: JetFn + Clone + 'static>(beta: f64, f: &J) -> DerivedFunction {
    let c1 = beta - 2.0;
    let c2 = (beta - 3.0) * (beta - 3.0) / 4.0;
    DerivedFunction::from_jet(f, format!("fsharp_{beta}"), move |r, j| {
        j.d2 + (c1 / r) * j.d1 + (c2 / (r * r)) * j.v
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::funcspace::{mollifier_bump, poly_bump};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn constants_match_closed_forms() {
        assert_eq!(c_const(4.0, 4.0), 1.25);
        assert_eq!(c_const(7.0, 3.0), 0.0); // beta = 3 zero factor
        assert_eq!(c_const(-2.0, 3.0), 0.0);
        assert_eq!(c_const(1.0, 1.0), -1.0);
        assert_eq!(h_const(2.0), 0.0);
        assert_eq!(h_const(2.0), h_const(1.0 + 1.0)); // Q = beta + 1 at beta = 1
        assert_eq!(h_const(4.0), 1.0);
        assert_eq!(r_const(4.0), 0.0);
        assert_eq!(r_const(2.0), -1.0);
        assert_eq!(r_const(5.0), 1.25);
        assert_eq!(r_const(5.0), c_const(4.0, 4.0));
        assert_eq!(r_const(2.0), c_const(1.0, 1.0));
    }

    #[test]
    fn c_equals_r_on_the_diagonal() {
        for n in 2..=10 {
            let nf = n as f64;
            let diff = (c_const(nf - 1.0, nf - 1.0) - r_const(nf)).abs();
            assert!(diff <= 1e-15, "n = {n}: diff = {diff}");
        }
    }

    #[test]
    fn c_degenerates_exactly_on_both_lines() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..20 {
            let alpha: f64 = rng.gen_range(-4.0..6.0);
            assert_eq!(c_const(alpha, 3.0), 0.0);
            // 2 alpha - beta + 1 = 0 with beta = 2 alpha + 1
            assert_eq!(c_const(alpha, 2.0 * alpha + 1.0), 0.0);
        }
    }

    #[test]
    fn l_on_simple_powers() {
        let sq = PowerFn::new(2.0);
        for alpha in [-1.0, 0.0, 2.5, 4.0] {
            let lf = apply_l(alpha, &sq);
            for r in [0.5, 1.0, 3.0] {
                let expect = 2.0 + 2.0 * alpha;
                assert!((lf.eval(r).re - expect).abs() < 1e-13);
            }
        }
        // r^{-1} is harmonic for the three-dimensional radial operator
        let inv = PowerFn::new(-1.0);
        let lf = apply_l(2.0, &inv);
        for r in [0.5, 1.0, 4.0] {
            assert!(lf.eval(r).norm() < 1e-14);
        }
    }

    #[test]
    fn l_coefficient_on_general_power_matches_minus_c() {
        // L_alpha r^gamma = gamma(gamma - 1 + alpha) r^{gamma-2}; at
        // gamma = (3-beta)/2 the coefficient equals -c_const(alpha, beta).
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..40 {
            let alpha: f64 = rng.gen_range(-3.0..6.0);
            let beta: f64 = rng.gen_range(-3.0..6.0);
            let gamma = (3.0 - beta) / 2.0;
            let coeff = gamma * (gamma - 1.0 + alpha);
            assert!(
                (coeff + c_const(alpha, beta)).abs() <= 1e-13 * coeff.abs().max(1.0),
                "alpha={alpha} beta={beta}"
            );
        }
    }

    #[test]
    fn star_and_sharp_reduce_at_beta_3() {
        let f = poly_bump(1.0, 2.0, 4).unwrap();
        let fs = f_star(3.0, &f);
        let fsh = f_sharp(3.0, &f);
        let l1 = apply_l(1.0, &f);
        for r in [1.1, 1.5, 1.9] {
            let j = f.jet(r);
            assert_eq!(fs.eval(r), j.d1); // f* = f' exactly
            assert!((fsh.eval(r) - l1.eval(r)).norm() < 1e-14 * l1.eval(r).norm().max(1e-300));
        }
    }

    #[test]
    fn extremizing_power_is_annihilated() {
        // r^{(3-beta)/2} is killed pointwise by f*, f#, and L_alpha + C/r^2.
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        for _ in 0..20 {
            let alpha: f64 = rng.gen_range(-3.0..6.0);
            let beta: f64 = rng.gen_range(-3.0..6.0);
            let c = c_const(alpha, beta);
            let power = PowerFn::new((3.0 - beta) / 2.0);
            let fs = f_star(beta, &power);
            let fsh = f_sharp(beta, &power);
            let lf = apply_l(alpha, &power);
            for _ in 0..50 {
                let r: f64 = rng.gen_range(0.5..5.0);
                assert!(fs.eval(r).norm() <= 1e-13, "f* at r={r}");
                assert!(fsh.eval(r).norm() <= 1e-13, "f# at r={r}");
                let resid = (lf.eval(r) + c / (r * r) * power.jet(r).v).norm();
                assert!(resid <= 1e-13, "(L+C/r^2) at r={r}: {resid}");
            }
        }
    }

    #[test]
    fn operators_are_linear() {
        let f = mollifier_bump(1.0, 3.0).unwrap();
        let g = poly_bump(1.0, 3.0, 4).unwrap().modulate(2.0);
        let c1 = Complex64::new(0.7, -1.3);
        let c2 = Complex64::new(-0.4, 0.9);
        // c1 f + c2 g as a combined test function via a derived closure
        let combo = {
            let (f, g) = (f.clone(), g.clone());
            move |r: f64| {
                let (jf, jg) = (f.jet(r), g.jet(r));
                Jet {
                    v: c1 * jf.v + c2 * jg.v,
                    d1: c1 * jf.d1 + c2 * jg.d1,
                    d2: c1 * jf.d2 + c2 * jg.d2,
                }
            }
        };
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for (alpha, beta) in [(0.0, 2.0), (4.0, 4.0), (-1.5, 5.0)] {
            for _ in 0..100 {
                let r: f64 = rng.gen_range(1.05..2.95);
                let j = combo(r);
                let direct_l = j.d2 + alpha / r * j.d1;
                let split_l = c1 * apply_l(alpha, &f).eval(r) + c2 * apply_l(alpha, &g).eval(r);
                assert!(
                    (direct_l - split_l).norm() <= 1e-14 * direct_l.norm().max(1e-300),
                    "L linearity at r={r}"
                );
                let direct_s = j.d1 + (beta - 3.0) / (2.0 * r) * j.v;
                let split_s = c1 * f_star(beta, &f).eval(r) + c2 * f_star(beta, &g).eval(r);
                assert!((direct_s - split_s).norm() <= 1e-14 * direct_s.norm().max(1e-300));
                let direct_sh =
                    j.d2 + (beta - 2.0) / r * j.d1 + (beta - 3.0).powi(2) / (4.0 * r * r) * j.v;
                let split_sh = c1 * f_sharp(beta, &f).eval(r) + c2 * f_sharp(beta, &g).eval(r);
                assert!((direct_sh - split_sh).norm() <= 1e-14 * direct_sh.norm().max(1e-300));
            }
        }
    }

    #[test]
    fn sharp_coefficient_sum_vanishes_on_power() {
        // (3-beta)(1-beta)/4 + (beta-2)(3-beta)/2 + (beta-3)^2/4 = 0
        for beta in [-2.0f64, 0.0, 1.5, 3.0, 4.0, 6.0] {
            let s = (3.0 - beta) * (1.0 - beta) / 4.0
                + (beta - 2.0) * (3.0 - beta) / 2.0
                + (beta - 3.0) * (beta - 3.0) / 4.0;
            assert!(s.abs() < 1e-14, "beta={beta}: {s}");
        }
    }

    #[test]
    fn derived_function_vanishes_with_its_source() {
        let f = poly_bump(1.0, 2.0, 3).unwrap();
        let lf = apply_l(3.0, &f);
        assert_eq!(lf.eval(0.7), Complex64::new(0.0, 0.0));
        assert_eq!(lf.eval(2.3), Complex64::new(0.0, 0.0));
        assert_eq!(lf.support(), Some(f.support()));
        assert_eq!(f_star(1.0, &PowerFn::new(1.0)).support(), None);
    }
}
