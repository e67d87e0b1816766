//! Run configuration: a versioned JSON document naming the parameter
//! grids, the function corpus, the checks to run, and the numeric
//! settings for quadrature, Monte Carlo, and the sharpness explorer.

use std::fs;
use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};
use serde::{Deserialize, Serialize};

use halfline::extremal::{RatioTarget, MAX_LOG_WIDTH};
use halfline::funcspace::{FamilySpec, TestFunction};
use halfline::quad::QuadratureConfig;

/// Identity names addressable from a config, in canonical order.
pub const CHECK_NAMES: &[&str] = &[
    "h1",
    "r1",
    "r2",
    "ibp_chain",
    "beta2_sign",
    "lemma21",
    "r5",
    "r6",
    "r7",
    "coefficient",
    "remark23",
    "dimred",
];

/// Checks run by `verify` when the config lists none. The Monte Carlo
/// cross-validation stays behind the `oracle` subcommand (or an explicit
/// entry) so the default sweep stays quadrature-fast.
pub fn default_checks() -> Vec<String> {
    CHECK_NAMES
        .iter()
        .filter(|n| **n != "dimred")
        .map(|s| s.to_string())
        .collect()
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct McSettings {
    #[serde(default = "default_dims")]
    pub dims: Vec<u32>,
    #[serde(default = "default_samples")]
    pub samples: u64,
    #[serde(default = "default_seed")]
    pub seed: u64,
}

fn default_dims() -> Vec<u32> {
    vec![2, 3, 4]
}
fn default_samples() -> u64 {
    1_000_000
}
fn default_seed() -> u64 {
    20260801
}

impl Default for McSettings {
    fn default() -> Self {
        McSettings {
            dims: default_dims(),
            samples: default_samples(),
            seed: default_seed(),
        }
    }
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", tag = "kind")]
pub enum ExtremalTarget {
    Rellich { alpha: f64, beta: f64 },
    Hardy { beta: f64 },
}

impl ExtremalTarget {
    pub fn ratio_target(&self) -> RatioTarget {
        match self {
            ExtremalTarget::Rellich { .. } => RatioTarget::Rellich,
            ExtremalTarget::Hardy { .. } => RatioTarget::Hardy,
        }
    }

    pub fn alpha_beta(&self) -> (f64, f64) {
        match *self {
            ExtremalTarget::Rellich { alpha, beta } => (alpha, beta),
            ExtremalTarget::Hardy { beta } => (0.0, beta),
        }
    }

    /// Filesystem-safe tag for trace files.
    pub fn tag(&self) -> String {
        match *self {
            ExtremalTarget::Rellich { alpha, beta } => format!("rellich_a{alpha}_b{beta}"),
            ExtremalTarget::Hardy { beta } => format!("hardy_b{beta}"),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExtremalSettings {
    #[serde(default = "default_targets")]
    pub targets: Vec<ExtremalTarget>,
    #[serde(default = "default_m_list")]
    pub m_list: Vec<f64>,
    #[serde(default = "default_max_iters")]
    pub max_iters: usize,
    /// Seed of the minimizer's starting simplex; support gives center and
    /// log-width, gamma the initial power offset.
    #[serde(default = "default_init")]
    pub init: FamilySpec,
}

fn default_targets() -> Vec<ExtremalTarget> {
    vec![
        ExtremalTarget::Rellich {
            alpha: 4.0,
            beta: 4.0,
        },
        ExtremalTarget::Hardy { beta: 2.0 },
    ]
}
fn default_m_list() -> Vec<f64> {
    vec![2.0, 4.0, 6.0, 8.0, 10.0]
}
fn default_max_iters() -> usize {
    200
}
fn default_init() -> FamilySpec {
    FamilySpec::mollifier((-8.0f64).exp(), 8.0f64.exp())
}

impl Default for ExtremalSettings {
    fn default() -> Self {
        ExtremalSettings {
            targets: default_targets(),
            m_list: default_m_list(),
            max_iters: default_max_iters(),
            init: default_init(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunConfig {
    pub schema_version: u32,
    pub alphas: Vec<f64>,
    pub betas: Vec<f64>,
    pub corpus: Vec<FamilySpec>,
    #[serde(default = "default_checks")]
    pub checks: Vec<String>,
    #[serde(default)]
    pub quad: QuadratureConfig,
    #[serde(default)]
    pub mc: McSettings,
    #[serde(default)]
    pub extremal: ExtremalSettings,
    /// Pass threshold for equality residuals.
    #[serde(default = "default_tolerance")]
    pub tolerance: f64,
    /// Allowed relative undershoot for inequalities.
    #[serde(default = "default_ineq_tolerance")]
    pub ineq_tolerance: f64,
    #[serde(default = "default_output")]
    pub output: String,
}

fn default_tolerance() -> f64 {
    1e-8
}
fn default_ineq_tolerance() -> f64 {
    1e-10
}
fn default_output() -> String {
    "out".to_string()
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)
            .with_context(|| format!("cannot read config {}", path.display()))?;
        let cfg: RunConfig = serde_json::from_str(&text)
            .with_context(|| format!("config {} is not valid JSON", path.display()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.schema_version != 1 {
            bail!("unsupported schema_version {}", self.schema_version);
        }
        if self.alphas.is_empty() || self.betas.is_empty() {
            bail!("alphas and betas must be nonempty");
        }
        if self.corpus.is_empty() {
            bail!("corpus must be nonempty");
        }
        for name in &self.checks {
            if !CHECK_NAMES.contains(&name.as_str()) {
                bail!(
                    "unknown check name {name:?}; known checks: {}",
                    CHECK_NAMES.join(", ")
                );
            }
        }
        for spec in &self.corpus {
            spec.build()
                .map_err(|e| anyhow!("invalid corpus entry {spec:?}: {e}"))?;
        }
        self.quad
            .validate()
            .map_err(|e| anyhow!("invalid quadrature config: {e}"))?;
        for &n in &self.mc.dims {
            if !(2..=5).contains(&n) {
                bail!("mc dimension {n} outside the supported range 2..=5");
            }
        }
        for &m in &self.extremal.m_list {
            if !(m > 0.0) {
                bail!("extremal m-list entry {m} must be positive");
            }
            if m > MAX_LOG_WIDTH {
                bail!("extremal m-list entry {m} exceeds the overflow guard {MAX_LOG_WIDTH}");
            }
        }
        self.extremal
            .init
            .build()
            .map_err(|e| anyhow!("invalid extremal init: {e}"))?;
        if !(self.tolerance > 0.0) || !(self.ineq_tolerance > 0.0) {
            bail!("tolerances must be positive");
        }
        Ok(())
    }

    pub fn build_corpus(&self) -> Result<Vec<TestFunction>> {
        self.corpus
            .iter()
            .map(|s| s.build().map_err(|e| anyhow!("{e}")))
            .collect()
    }
}
