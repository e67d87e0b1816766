//! Executes the configured sweeps and writes deterministic reports.
//!
//! Work items (check x parameters x function) are independent; they run
//! on a rayon pool sized by --jobs, are collected in submission order,
//! and are sorted before serialization, so outputs are byte-identical
//! for a given config regardless of worker count.

use std::fs;
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use halfline::extremal::{self, TracePoint};
use halfline::funcspace::TestFunction;
use halfline::identities::{self, CheckCfg, IdentityReport, McCfg};
use halfline::report;
use halfline::Error as CoreError;

use crate::config::RunConfig;

/// Process exit codes: 0 all checks pass, 1 residual failure, 2 config
/// error, 3 numeric failure (no convergence / degenerate sampling).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Pass,
    ResidualFailure,
    NumericFailure,
}

impl Outcome {
    pub fn exit_code(self) -> i32 {
        match self {
            Outcome::Pass => 0,
            Outcome::ResidualFailure => 1,
            Outcome::NumericFailure => 3,
        }
    }
}

fn numeric_failure(e: &CoreError) -> bool {
    matches!(
        e,
        CoreError::NoConvergence { .. }
            | CoreError::DegenerateSampling { .. }
            | CoreError::NonFiniteIntegrand { .. }
    )
}

type Job = Box<dyn Fn() -> Result<Vec<IdentityReport>, CoreError> + Send + Sync>;

fn check_cfg(cfg: &RunConfig) -> CheckCfg {
    CheckCfg {
        quad: cfg.quad,
        tol: cfg.tolerance,
        ineq_tol: cfg.ineq_tolerance,
    }
}

/// Off-grid parameter checks of the abstract Hermitian lemma; the suite
/// exercises it on seeded random vectors so the name stays reachable
/// from a config.
const LEMMA_SEED: u64 = 0x1e_aa21;
const LEMMA_CASES: usize = 10;

fn lemma_jobs(cfg: &RunConfig) -> Vec<Job> {
    let ccfg = check_cfg(cfg);
    (0..LEMMA_CASES)
        .map(|i| {
            let ccfg = ccfg.clone();
            Box::new(move || {
                let mut rng = ChaCha8Rng::seed_from_u64(LEMMA_SEED.wrapping_add(i as u64));
                let dim = 8;
                let draw = |rng: &mut ChaCha8Rng| {
                    (0..dim)
                        .map(|_| {
                            Complex64::new(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0))
                        })
                        .collect::<Vec<_>>()
                };
                let u = draw(&mut rng);
                let v = draw(&mut rng);
                let mut c: f64 = 0.0;
                while c.abs() < 0.1 {
                    c = rng.gen_range(-4.0..4.0);
                }
                identities::check_lemma21(&u, &v, c, &ccfg).map(|r| vec![r])
            }) as Job
        })
        .collect()
}

fn dimred_jobs(cfg: &RunConfig, corpus: &[TestFunction]) -> Vec<Job> {
    let ccfg = check_cfg(cfg);
    let mc = cfg.mc.clone();
    let mut jobs: Vec<Job> = Vec::new();
    for &n in &mc.dims {
        for f in corpus {
            let f = f.clone();
            let ccfg = ccfg.clone();
            let settings = McCfg {
                samples: mc.samples,
                // decorrelate dimensions; quantity index shifts further inside
                seed: mc.seed.wrapping_add((n as u64) << 48),
            };
            jobs.push(Box::new(move || {
                identities::check_dimensional_reduction(&f, n, settings, &ccfg)
            }));
        }
    }
    jobs
}

fn verify_jobs(cfg: &RunConfig, corpus: &[TestFunction]) -> Vec<Job> {
    let ccfg = check_cfg(cfg);
    let mut jobs: Vec<Job> = Vec::new();
    for check in &cfg.checks {
        match check.as_str() {
            "h1" => {
                for &beta in &cfg.betas {
                    for f in corpus {
                        let (f, ccfg) = (f.clone(), ccfg.clone());
                        jobs.push(Box::new(move || {
                            identities::check_hardy_h1(&f, beta, &ccfg).map(|r| vec![r])
                        }));
                    }
                }
            }
            "r1" | "r7" => {
                let is_r1 = check == "r1";
                for &alpha in &cfg.alphas {
                    for &beta in &cfg.betas {
                        for f in corpus {
                            let (f, ccfg) = (f.clone(), ccfg.clone());
                            jobs.push(Box::new(move || {
                                if is_r1 {
                                    identities::check_rellich_r1(&f, alpha, beta, &ccfg)
                                        .map(|r| vec![r])
                                } else {
                                    identities::check_rellich_ineq_r7(&f, alpha, beta, &ccfg)
                                        .map(|r| vec![r])
                                }
                            }));
                        }
                    }
                }
            }
            "r2" | "r6" => {
                let is_r2 = check == "r2";
                for &alpha in &cfg.alphas {
                    for &beta in &cfg.betas {
                        // the paper's own exclusion line
                        if (beta - alpha - 2.0).abs() <= 1e-9 {
                            continue;
                        }
                        for f in corpus {
                            let (f, ccfg) = (f.clone(), ccfg.clone());
                            jobs.push(Box::new(move || {
                                if is_r2 {
                                    identities::check_rellich_r2(&f, alpha, beta, &ccfg)
                                        .map(|r| vec![r])
                                } else {
                                    identities::check_r6(&f, alpha, beta, &ccfg)
                                }
                            }));
                        }
                    }
                }
            }
            "ibp_chain" => {
                for &beta in &cfg.betas {
                    for f in corpus {
                        let (f, ccfg) = (f.clone(), ccfg.clone());
                        jobs.push(Box::new(move || {
                            identities::check_ibp_chain(&f, beta, &ccfg)
                        }));
                    }
                }
            }
            "beta2_sign" => {
                for f in corpus {
                    let (f, ccfg) = (f.clone(), ccfg.clone());
                    jobs.push(Box::new(move || {
                        identities::check_beta2_sign(&f, &ccfg).map(|r| vec![r])
                    }));
                }
            }
            "lemma21" => jobs.extend(lemma_jobs(cfg)),
            "r5" => {
                for &a in &cfg.alphas {
                    for &beta in &cfg.betas {
                        for f in corpus {
                            let (f, ccfg) = (f.clone(), ccfg.clone());
                            jobs.push(Box::new(move || identities::check_r5(&f, a, beta, &ccfg)));
                        }
                    }
                }
            }
            "coefficient" => {
                for &alpha in &cfg.alphas {
                    for &beta in &cfg.betas {
                        if (beta - alpha - 2.0).abs() <= 1e-9 {
                            continue;
                        }
                        let ccfg = ccfg.clone();
                        jobs.push(Box::new(move || {
                            identities::check_coefficient_identity(alpha, beta, &ccfg)
                                .map(|r| vec![r])
                        }));
                    }
                }
            }
            "remark23" => {
                for &t in &cfg.betas {
                    for f in corpus {
                        let (f, ccfg) = (f.clone(), ccfg.clone());
                        jobs.push(Box::new(move || identities::check_remark23(&f, t, &ccfg)));
                    }
                }
            }
            "dimred" => jobs.extend(dimred_jobs(cfg, corpus)),
            other => unreachable!("validated check name {other}"),
        }
    }
    jobs
}

/// Number of work items a `verify` run would schedule; every configured
/// check name must contribute at least one.
pub fn plan_size(cfg: &RunConfig) -> anyhow::Result<usize> {
    let corpus = cfg.build_corpus()?;
    Ok(verify_jobs(cfg, &corpus).len())
}

fn run_jobs(jobs: Vec<Job>, jobs_n: Option<usize>) -> Result<Vec<IdentityReport>, CoreError> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs_n.unwrap_or(0))
        .build()
        .expect("thread pool");
    let results: Vec<Result<Vec<IdentityReport>, CoreError>> =
        pool.install(|| jobs.par_iter().map(|job| job()).collect());
    let mut reports = Vec::new();
    for res in results {
        reports.extend(res?);
    }
    Ok(reports)
}

fn write_reports(out_dir: &Path, reports: &mut Vec<IdentityReport>) -> anyhow::Result<()> {
    report::sort_reports(reports);
    fs::create_dir_all(out_dir)?;
    fs::write(out_dir.join("reports.csv"), report::reports_to_csv(reports))?;
    fs::write(out_dir.join("reports.json"), report::reports_to_json(reports))?;
    Ok(())
}

fn finish(
    out_dir: &Path,
    result: Result<Vec<IdentityReport>, CoreError>,
) -> anyhow::Result<Outcome> {
    match result {
        Ok(mut reports) => {
            write_reports(out_dir, &mut reports)?;
            let failed: Vec<_> = reports.iter().filter(|r| !r.pass).collect();
            for r in &failed {
                eprintln!(
                    "FAIL {} alpha={:?} beta={:?} {}: rel_residual {:.3e}",
                    r.name, r.alpha, r.beta, r.fn_label, r.rel_residual
                );
            }
            println!(
                "{} checks, {} failed",
                reports.len(),
                failed.len()
            );
            Ok(if failed.is_empty() {
                Outcome::Pass
            } else {
                Outcome::ResidualFailure
            })
        }
        Err(e) if numeric_failure(&e) => {
            eprintln!("numeric failure: {e}");
            Ok(Outcome::NumericFailure)
        }
        Err(e) => Err(e.into()),
    }
}

/// The `verify` subcommand: corpus x grid x identity sweep.
pub fn cmd_verify(cfg: &RunConfig, out_dir: &Path, jobs_n: Option<usize>) -> anyhow::Result<Outcome> {
    let corpus = cfg.build_corpus()?;
    let jobs = verify_jobs(cfg, &corpus);
    finish(out_dir, run_jobs(jobs, jobs_n))
}

/// The `oracle` subcommand: Monte Carlo cross-validation of the polar
/// reduction for every configured dimension.
pub fn cmd_oracle(cfg: &RunConfig, out_dir: &Path, jobs_n: Option<usize>) -> anyhow::Result<Outcome> {
    let corpus = cfg.build_corpus()?;
    let jobs = dimred_jobs(cfg, &corpus);
    finish(out_dir, run_jobs(jobs, jobs_n))
}

fn trace_path(out_dir: &Path, tag: &str, kind: &str) -> PathBuf {
    out_dir.join("traces").join(format!("{tag}_{kind}.csv"))
}

/// The `extremal` subcommand: family traces plus simplex descent for
/// each configured target; exit 0 iff every trace point respects the
/// theorem's lower bound.
pub fn cmd_extremal(cfg: &RunConfig, out_dir: &Path, _jobs_n: Option<usize>) -> anyhow::Result<Outcome> {
    fs::create_dir_all(out_dir.join("traces"))?;
    let mut all_ok = true;
    for target in &cfg.extremal.targets {
        let (alpha, beta) = target.alpha_beta();
        let kind = target.ratio_target();
        let family: Result<Vec<TracePoint>, CoreError> =
            extremal::family_trace(kind, alpha, beta, &cfg.extremal.m_list, &cfg.quad);
        let family = match family {
            Ok(t) => t,
            Err(e) if numeric_failure(&e) => {
                eprintln!("numeric failure in family trace {}: {e}", target.tag());
                return Ok(Outcome::NumericFailure);
            }
            Err(e) => return Err(e.into()),
        };
        let descent = match extremal::minimize_ratio(
            kind,
            alpha,
            beta,
            &cfg.extremal.init,
            cfg.extremal.max_iters,
            &cfg.quad,
        ) {
            Ok(t) => t,
            Err(e) if numeric_failure(&e) => {
                eprintln!("numeric failure in descent {}: {e}", target.tag());
                return Ok(Outcome::NumericFailure);
            }
            Err(e) => return Err(e.into()),
        };

        for (name, trace) in [("family", &family), ("minimize", &descent)] {
            fs::write(
                trace_path(out_dir, &target.tag(), name),
                report::trace_to_csv(trace),
            )?;
            if !extremal::respects_lower_bound(trace) {
                eprintln!("lower bound violated on {} {name} trace", target.tag());
                all_ok = false;
            }
        }
        let best = descent.last().map(|p| p.ratio).unwrap_or(f64::NAN);
        println!(
            "{}: family gap {:.6e} -> {:.6e}, best ratio {best:.9} (target {:.9})",
            target.tag(),
            family.first().map(|p| p.gap).unwrap_or(f64::NAN),
            family.last().map(|p| p.gap).unwrap_or(f64::NAN),
            extremal::sharp_target(kind, alpha, beta),
        );
    }
    Ok(if all_ok {
        Outcome::Pass
    } else {
        Outcome::ResidualFailure
    })
}
