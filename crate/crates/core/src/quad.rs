//! Weighted integrals, Hermitian inner products, and norms over (0, inf)
//! against the measure r^beta dr, plus a Monte Carlo oracle for
//! n-dimensional radial integrals.
//!
//! Supports are compact and bounded away from 0, so the weight is folded
//! into the integrand and panels subdivide a finite interval only. The
//! adaptive scheme is globally greedy: the panel with the largest error
//! estimate is bisected until the summed estimate meets the target.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Mutex, OnceLock};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::funcspace::Support;

/// Tuning knobs for the adaptive integrator.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct QuadratureConfig {
    /// Relative tolerance target.
    #[serde(default = "default_rel_tol")]
    pub rel_tol: f64,
    /// Absolute floor; kept tiny so the relative target normally governs.
    #[serde(default = "default_abs_tol")]
    pub abs_tol: f64,
    /// Maximum bisection depth per panel.
    #[serde(default = "default_max_depth")]
    pub max_depth: u32,
    /// Gauss-Legendre nodes per panel.
    #[serde(default = "default_nodes")]
    pub nodes_per_panel: u32,
}

fn default_rel_tol() -> f64 {
    1e-12
}
fn default_abs_tol() -> f64 {
    1e-280
}
fn default_max_depth() -> u32 {
    40
}
fn default_nodes() -> u32 {
    15
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        QuadratureConfig {
            rel_tol: default_rel_tol(),
            abs_tol: default_abs_tol(),
            max_depth: default_max_depth(),
            nodes_per_panel: default_nodes(),
        }
    }
}

impl QuadratureConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.rel_tol > 0.0) || self.max_depth < 1 || self.nodes_per_panel < 2 {
            return Err(Error::ExcludedParameter {
                check: "quadrature-config",
                detail: format!(
                    "need rel_tol > 0, max_depth >= 1, nodes_per_panel >= 2; got {self:?}"
                ),
            });
        }
        Ok(())
    }
}

/// A converged integral with its a-posteriori error estimate.
#[derive(Debug, Clone, Copy)]
pub struct IntegralResult {
    pub value: Complex64,
    pub error_estimate: f64,
    pub panels_used: usize,
}

/// Real-valued variant returned by [`norm_sq`].
#[derive(Debug, Clone, Copy)]
pub struct RealIntegral {
    pub value: f64,
    pub error_estimate: f64,
    pub panels_used: usize,
}

/// Gauss-Legendre nodes and weights on [-1, 1], cached per order.
fn gauss_legendre(n: u32) -> std::sync::Arc<(Vec<f64>, Vec<f64>)> {
    static CACHE: OnceLock<Mutex<HashMap<u32, std::sync::Arc<(Vec<f64>, Vec<f64>)>>>> =
        OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let mut map = cache.lock().unwrap();
    map.entry(n)
        .or_insert_with(|| std::sync::Arc::new(compute_gauss_legendre(n)))
        .clone()
}

/// Newton iteration on the Legendre recurrence; standard construction.
fn compute_gauss_legendre(n: u32) -> (Vec<f64>, Vec<f64>) {
    let nf = n as f64;
    let mut nodes = vec![0.0; n as usize];
    let mut weights = vec![0.0; n as usize];
    for i in 0..n as usize {
        let mut x = (PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() <= 1e-15 {
                let (_, d) = legendre_with_derivative(n, x);
                dp = d;
                break;
            }
        }
        nodes[i] = x;
        weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    (nodes, weights)
}

fn legendre_with_derivative(n: u32, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// One fixed-rule evaluation; returns (integral, integral of |h|).
fn panel_rule<F>(h: &F, lo: f64, hi: f64, nodes: &[f64], weights: &[f64]) -> (Complex64, f64)
where
    F: Fn(f64) -> Complex64,
{
    let mid = 0.5 * (lo + hi);
    let half = 0.5 * (hi - lo);
    let mut sum = Complex64::new(0.0, 0.0);
    let mut abs_sum = 0.0;
    for (&x, &w) in nodes.iter().zip(weights) {
        let v = h(mid + half * x);
        sum += w * v;
        abs_sum += w * v.norm();
    }
    (half * sum, half * abs_sum)
}

struct Panel {
    lo: f64,
    hi: f64,
    depth: u32,
    value: Complex64,
    err: f64,
    abs: f64,
}

fn make_panel<F>(h: &F, lo: f64, hi: f64, depth: u32, nodes: &[f64], weights: &[f64]) -> Result<Panel>
where
    F: Fn(f64) -> Complex64,
{
    let mid = 0.5 * (lo + hi);
    let (coarse, _) = panel_rule(h, lo, hi, nodes, weights);
    let (left, abs_l) = panel_rule(h, lo, mid, nodes, weights);
    let (right, abs_r) = panel_rule(h, mid, hi, nodes, weights);
    let fine = left + right;
    if !fine.is_finite() || !coarse.is_finite() {
        return Err(Error::NonFiniteIntegrand { at: mid });
    }
    Ok(Panel {
        lo,
        hi,
        depth,
        value: fine,
        err: (coarse - fine).norm(),
        abs: abs_l + abs_r,
    })
}

/// Hard cap on subdivisions; an unreachable tolerance must fail fast
/// instead of expanding the bisection tree toward 2^max_depth leaves.
const MAX_PANELS: usize = 4096;

fn adaptive<F>(h: F, support: Support, cfg: &QuadratureConfig) -> Result<IntegralResult>
where
    F: Fn(f64) -> Complex64,
{
    cfg.validate()?;
    let gl = gauss_legendre(cfg.nodes_per_panel);
    let (nodes, weights) = (&gl.0, &gl.1);

    let mut panels = vec![make_panel(&h, support.lo, support.hi, 0, nodes, weights)?];
    loop {
        let value: Complex64 = panels.iter().map(|p| p.value).sum();
        let err: f64 = panels.iter().map(|p| p.err).sum();
        let resabs: f64 = panels.iter().map(|p| p.abs).sum();
        let target = cfg.abs_tol.max(cfg.rel_tol * value.norm());
        // cannot honestly resolve below accumulated rounding
        let floor = 50.0 * f64::EPSILON * resabs;
        if err <= target || err <= floor {
            return Ok(IntegralResult {
                value,
                error_estimate: err.max(f64::EPSILON * resabs),
                panels_used: panels.len(),
            });
        }
        // bisect the worst panel that still has depth budget
        let mut worst: Option<(usize, f64)> = None;
        if panels.len() < MAX_PANELS {
            for (i, p) in panels.iter().enumerate() {
                if p.depth < cfg.max_depth && worst.map_or(true, |(_, e)| p.err > e) {
                    worst = Some((i, p.err));
                }
            }
        }
        let Some((idx, _)) = worst else {
            return Err(Error::NoConvergence {
                achieved: err,
                target,
                panels: panels.len(),
            });
        };
        let p = panels.swap_remove(idx);
        let mid = 0.5 * (p.lo + p.hi);
        panels.push(make_panel(&h, p.lo, mid, p.depth + 1, nodes, weights)?);
        panels.push(make_panel(&h, mid, p.hi, p.depth + 1, nodes, weights)?);
    }
}

/// Integral of g(r) r^beta over the support.
pub fn weighted_integral<F>(
    g: F,
    support: Support,
    beta: f64,
    cfg: &QuadratureConfig,
) -> Result<IntegralResult>
where
    F: Fn(f64) -> Complex64,
{
    // Support validity is enforced at construction; re-check cheaply so a
    // hand-built interval touching 0 is rejected rather than integrated.
    if !(support.lo > 0.0 && support.hi > support.lo && support.hi.is_finite()) {
        return Err(Error::InvalidSupport {
            lo: support.lo,
            hi: support.hi,
        });
    }
    adaptive(move |r| g(r) * r.powf(beta), support, cfg)
}

/// Hermitian product <f, g> = integral of f(r) conj(g(r)) r^beta dr.
///
/// Linear in the first slot, conjugated in the second.
pub fn inner<F, G>(
    f: F,
    g: G,
    support: Support,
    beta: f64,
    cfg: &QuadratureConfig,
) -> Result<IntegralResult>
where
    F: Fn(f64) -> Complex64,
    G: Fn(f64) -> Complex64,
{
    weighted_integral(move |r| f(r) * g(r).conj(), support, beta, cfg)
}

/// ||f||^2 in L^2(r^beta dr); the integrand |f|^2 is real by
/// construction, so no imaginary leakage can occur.
pub fn norm_sq<F>(f: F, support: Support, beta: f64, cfg: &QuadratureConfig) -> Result<RealIntegral>
where
    F: Fn(f64) -> Complex64,
{
    let res = weighted_integral(
        move |r| Complex64::new(f(r).norm_sqr(), 0.0),
        support,
        beta,
        cfg,
    )?;
    debug_assert!(res.value.im == 0.0);
    Ok(RealIntegral {
        value: res.value.re,
        error_estimate: res.error_estimate,
        panels_used: res.panels_used,
    })
}

/// Monte Carlo estimate with its standard error.
#[derive(Debug, Clone, Copy)]
pub struct McEstimate {
    pub estimate: f64,
    pub std_error: f64,
    pub accepted: u64,
}

const MC_CHUNK: u64 = 1 << 16;
const MC_MIN_ACCEPTED: u64 = 100;

/// Monte Carlo oracle for integral over R^n of |g(|x|)|^2 |x|^p dx, with
/// g supported in [a, b]: uniform rejection sampling in the box [-b, b]^n
/// keeping a <= |x| <= b, volume-scaled mean and standard error.
///
/// Box rejection is deliberately independent of any polar reduction.
/// Sampling is chunked with a fixed chunk-to-seed map, so the result is
/// bit-identical for a given (seed, samples) no matter how chunks are
/// scheduled.
pub fn mc_radial<F>(
    n: u32,
    profile: F,
    support: Support,
    weight_power: f64,
    samples: u64,
    seed: u64,
) -> Result<McEstimate>
where
    F: Fn(f64) -> Complex64,
{
    assert!(n >= 2, "radial reduction needs dimension >= 2");
    let (a, b) = (support.lo, support.hi);
    let volume = (2.0 * b).powi(n as i32);

    let mut sum = 0.0;
    let mut sum_sq = 0.0;
    let mut accepted = 0u64;
    let chunks = samples.div_ceil(MC_CHUNK);
    let mut remaining = samples;
    for chunk in 0..chunks {
        let len = remaining.min(MC_CHUNK);
        remaining -= len;
        let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(chunk));
        let mut c_sum = 0.0;
        let mut c_sum_sq = 0.0;
        for _ in 0..len {
            let mut r2 = 0.0;
            for _ in 0..n {
                let x: f64 = rng.gen_range(-b..b);
                r2 += x * x;
            }
            let r = r2.sqrt();
            if r >= a && r <= b {
                accepted += 1;
                let h = profile(r).norm_sqr() * r.powf(weight_power);
                c_sum += h;
                c_sum_sq += h * h;
            }
        }
        sum += c_sum;
        sum_sq += c_sum_sq;
    }
    if accepted < MC_MIN_ACCEPTED {
        return Err(Error::DegenerateSampling {
            accepted,
            needed: MC_MIN_ACCEPTED,
        });
    }
    let nf = samples as f64;
    let mean = sum / nf;
    let var = (sum_sq / nf - mean * mean).max(0.0);
    Ok(McEstimate {
        estimate: volume * mean,
        std_error: volume * (var / nf).sqrt(),
        accepted,
    })
}

/// Surface area of the unit sphere S^{n-1}: 2 pi^{n/2} / Gamma(n/2).
pub fn sphere_area(n: u32) -> f64 {
    assert!(n >= 1);
    // Gamma(n/2) by upward recursion from Gamma(1) or Gamma(1/2).
    let mut g = if n % 2 == 0 { 1.0 } else { PI.sqrt() };
    let mut x = if n % 2 == 0 { 1.0 } else { 0.5 };
    while x < n as f64 / 2.0 {
        g *= x;
        x += 1.0;
    }
    2.0 * PI.powf(n as f64 / 2.0) / g
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::funcspace::{mollifier_bump, poly_bump};
    use proptest::prelude::*;
    use rand::Rng;

    fn cfg() -> QuadratureConfig {
        QuadratureConfig::default()
    }

    /// Exact rational value of B(j+1, l+1) = j! l! / (j+l+1)!.
    fn beta_fn(j: u64, l: u64) -> f64 {
        let mut num = 1.0f64;
        for i in 1..=j {
            num *= i as f64;
        }
        for i in 1..=l {
            num *= i as f64;
        }
        let mut den = 1.0f64;
        for i in 1..=(j + l + 1) {
            den *= i as f64;
        }
        num / den
    }

    /// Closed form of int_1^2 (r-1)^k (2-r)^k r^beta dr for integer beta,
    /// via the binomial expansion of r^beta = (1 + (r-1))^beta.
    fn shifted_beta_integral(k: u64, beta: u64) -> f64 {
        let mut total = 0.0;
        let mut binom = 1.0f64;
        for j in 0..=beta {
            total += binom * beta_fn(k + j, k);
            binom *= (beta - j) as f64 / (j + 1) as f64;
        }
        total
    }

    #[test]
    fn gauss_legendre_nodes_are_sane() {
        let gl = gauss_legendre(15);
        assert_eq!(gl.0.len(), 15);
        let wsum: f64 = gl.1.iter().sum();
        assert!((wsum - 2.0).abs() < 1e-14);
        // symmetry of the node set
        for i in 0..7 {
            assert!((gl.0[i] + gl.0[14 - i]).abs() < 1e-14);
        }
    }

    #[test]
    fn panel_rule_is_exact_on_polynomials() {
        // n-node Gauss-Legendre integrates degree 2n-1 exactly; with the
        // weight r^beta folded in, r^q r^beta stays polynomial for
        // integer beta >= 0.
        let support = Support::new(1.0, 2.0).unwrap();
        let gl = gauss_legendre(15);
        for beta in 0..=4u32 {
            for q in 0..=(29 - beta) {
                let exact = (2f64.powi(q as i32 + beta as i32 + 1) - 1.0)
                    / (q as f64 + beta as f64 + 1.0);
                let (val, _) = panel_rule(
                    &|r: f64| Complex64::new(r.powi(q as i32) * r.powi(beta as i32), 0.0),
                    support.lo,
                    support.hi,
                    &gl.0,
                    &gl.1,
                );
                assert!(
                    (val.re - exact).abs() <= 1e-13 * exact,
                    "q={q} beta={beta}: got {} want {exact}",
                    val.re
                );
            }
        }
    }

    #[test]
    fn beta_integral_family_matches_closed_forms() {
        let f = poly_bump(1.0, 2.0, 3).unwrap();
        let support = f.support();
        let r0 = weighted_integral(|r| f.value(r), support, 0.0, &cfg()).unwrap();
        assert!((r0.value.re - 1.0 / 140.0).abs() <= 1e-12 / 140.0);
        let r1 = weighted_integral(|r| f.value(r), support, 1.0, &cfg()).unwrap();
        assert!((r1.value.re - 3.0 / 280.0).abs() <= 1e-12 * 3.0 / 280.0);

        let n0 = norm_sq(|r| f.value(r), support, 0.0, &cfg()).unwrap();
        assert!((n0.value - 1.0 / 12012.0).abs() <= 1e-12 / 12012.0);
    }

    #[test]
    fn zero_function_integrates_to_exact_zero() {
        let support = Support::new(1.0, 2.0).unwrap();
        let r = weighted_integral(|_| Complex64::new(0.0, 0.0), support, 2.0, &cfg()).unwrap();
        assert_eq!(r.value, Complex64::new(0.0, 0.0));
        assert_eq!(r.error_estimate, 0.0);
        let n = norm_sq(|_| Complex64::new(0.0, 0.0), support, 2.0, &cfg()).unwrap();
        assert_eq!(n.value, 0.0);
    }

    #[test]
    fn support_touching_zero_is_rejected() {
        let bad = Support { lo: 0.0, hi: 1.0 };
        assert!(matches!(
            weighted_integral(|_| Complex64::new(1.0, 0.0), bad, 0.0, &cfg()),
            Err(Error::InvalidSupport { .. })
        ));
    }

    #[test]
    fn starved_integrator_reports_no_convergence() {
        let f = mollifier_bump(1.0, 3.0).unwrap();
        let starve = QuadratureConfig {
            nodes_per_panel: 2,
            max_depth: 3,
            ..cfg()
        };
        assert!(matches!(
            norm_sq(|r| f.value(r), f.support(), 0.0, &starve),
            Err(Error::NoConvergence { .. })
        ));
    }

    #[test]
    fn error_estimates_are_honest_on_beta_family() {
        // true error <= 10x reported estimate, over bumps steep enough to
        // force real subdivision (k up to 8 exceeds single-panel exactness)
        for k in [3u64, 5, 8] {
            let f = poly_bump(1.0, 2.0, k as u32).unwrap();
            for beta in 0..=4u64 {
                let exact = shifted_beta_integral(2 * k, beta);
                let got = norm_sq(|r| f.value(r), f.support(), beta as f64, &cfg()).unwrap();
                let true_err = (got.value - exact).abs();
                assert!(
                    true_err <= 10.0 * got.error_estimate,
                    "k={k} beta={beta}: true {true_err:.3e} vs reported {:.3e}",
                    got.error_estimate
                );
                // converged results meet the requested tolerance
                assert!(got.error_estimate <= 1e-12 * got.value + 1e-13 * got.value);
            }
        }
    }

    #[test]
    fn inner_conjugate_symmetry_example() {
        let f = poly_bump(1.0, 2.0, 3).unwrap();
        let g = f.modulate(3.0);
        let support = f.support();
        let fg = inner(|r| f.value(r), |r| g.value(r), support, 2.0, &cfg()).unwrap();
        let gf = inner(|r| g.value(r), |r| f.value(r), support, 2.0, &cfg()).unwrap();
        assert!((fg.value - gf.value.conj()).norm() <= 1e-12 * fg.value.norm());
    }

    #[test]
    fn inner_self_is_real_nonnegative() {
        let f = mollifier_bump(1.0, 3.0).unwrap().modulate(2.0);
        let r = inner(|x| f.value(x), |x| f.value(x), f.support(), 1.0, &cfg()).unwrap();
        assert!(r.value.re > 0.0);
        assert!(r.value.im.abs() <= 1e-13 * r.value.re);
    }

    #[test]
    fn integration_by_parts_one_liner() {
        // 2 Re<(f/r)', f/r^2> = -(beta-1) ||f/r^2||^2 for the smooth bump
        let f = mollifier_bump(1.0, 3.0).unwrap();
        let support = f.support();
        let beta = 4.0;
        let lhs = 2.0
            * inner(
                |r| {
                    let j = f.jet(r);
                    j.d1 / r - j.v / (r * r)
                },
                |r| f.value(r) / (r * r),
                support,
                beta,
                &cfg(),
            )
            .unwrap()
            .value
            .re;
        let nrm = norm_sq(|r| f.value(r) / (r * r), support, beta, &cfg()).unwrap();
        let rhs = -(beta - 1.0) * nrm.value;
        assert!((lhs - rhs).abs() <= 1e-10 * nrm.value.abs().max(lhs.abs()));
    }

    #[test]
    fn mc_is_bit_reproducible() {
        let f = poly_bump(1.0, 2.0, 3).unwrap();
        let a = mc_radial(3, |r| f.value(r), f.support(), 0.0, 50_000, 99).unwrap();
        let b = mc_radial(3, |r| f.value(r), f.support(), 0.0, 50_000, 99).unwrap();
        assert_eq!(a.estimate.to_bits(), b.estimate.to_bits());
        assert_eq!(a.std_error.to_bits(), b.std_error.to_bits());
        let c = mc_radial(3, |r| f.value(r), f.support(), 0.0, 50_000, 100).unwrap();
        assert_ne!(a.estimate.to_bits(), c.estimate.to_bits());
    }

    #[test]
    fn mc_matches_quadrature_within_three_sigma() {
        let f = poly_bump(1.0, 2.0, 3).unwrap();
        let support = f.support();
        // n = 2, p = 0: reference is 2 pi int |f|^2 r dr
        let mc = mc_radial(2, |r| f.value(r), support, 0.0, 1_000_000, 2024).unwrap();
        let q = norm_sq(|r| f.value(r), support, 1.0, &cfg()).unwrap();
        let want = sphere_area(2) * q.value;
        assert!(
            (mc.estimate - want).abs() <= 3.0 * mc.std_error,
            "mc {} vs {} ({} sigma)",
            mc.estimate,
            want,
            (mc.estimate - want).abs() / mc.std_error
        );
        // n = 3, p = -4: the weighted norm behind the second-order theory
        let mc = mc_radial(3, |r| f.value(r), support, -4.0, 1_000_000, 2025).unwrap();
        let q = norm_sq(|r| f.value(r), support, -2.0, &cfg()).unwrap();
        let want = sphere_area(3) * q.value;
        assert!((mc.estimate - want).abs() <= 3.0 * mc.std_error);
    }

    #[test]
    fn mc_degenerate_sampling_and_zero_function() {
        let f = poly_bump(1.0, 2.0, 3).unwrap();
        assert!(matches!(
            mc_radial(3, |r| f.value(r), f.support(), 0.0, 50, 7),
            Err(Error::DegenerateSampling { .. })
        ));
        let z = mc_radial(2, |_| Complex64::new(0.0, 0.0), f.support(), 0.0, 10_000, 7).unwrap();
        assert_eq!(z.estimate, 0.0);
        assert_eq!(z.std_error, 0.0);
    }

    #[test]
    fn sphere_areas_match_known_values() {
        assert!((sphere_area(2) - 2.0 * PI).abs() < 1e-14);
        assert!((sphere_area(3) - 4.0 * PI).abs() < 1e-13);
        assert!((sphere_area(4) - 2.0 * PI * PI).abs() < 1e-13);
        assert!((sphere_area(5) - 8.0 * PI * PI / 3.0).abs() < 1e-13);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(50))]
        #[test]
        fn hermitian_structure(seed in 0u64..5000, beta in -2.0f64..6.0) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let w1: f64 = rng.gen_range(-6.0..6.0);
            let w2: f64 = rng.gen_range(-6.0..6.0);
            let g1: f64 = rng.gen_range(-1.5..1.5);
            let f = poly_bump(1.0, 2.0, 3).unwrap().modulate(w1);
            let g = poly_bump(1.0, 2.0, 4).unwrap().scale_power(g1).modulate(w2);
            let support = f.support();
            let c = cfg();

            let fg = inner(|r| f.value(r), |r| g.value(r), support, beta, &c).unwrap().value;
            let gf = inner(|r| g.value(r), |r| f.value(r), support, beta, &c).unwrap().value;
            let scale = fg.norm().max(1e-300);
            // Hermitian symmetry
            prop_assert!((fg - gf.conj()).norm() <= 1e-11 * scale.max(1.0));

            // conjugate-linearity in the second slot: <f, z g> = conj(z) <f, g>
            let z = Complex64::new(1.3, -0.4);
            let fzg = inner(|r| f.value(r), |r| z * g.value(r), support, beta, &c).unwrap().value;
            prop_assert!((fzg - z.conj() * fg).norm() <= 1e-11 * scale.max(1.0));

            // positivity
            let ff = inner(|r| f.value(r), |r| f.value(r), support, beta, &c).unwrap().value;
            prop_assert!(ff.re >= 0.0);
            prop_assert!(ff.im.abs() <= 1e-13 * ff.re.max(1e-300));
        }
    }
}
