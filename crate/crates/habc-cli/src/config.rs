//! Versioned experiment configuration.
//!
//! A config file plus a master seed pins every byte of an experiment's
//! output: problem data, likelihood, sampler hyperparameters, chain
//! schedule, and random streams all resolve from it deterministically.
//! The on-disk dialect is TOML with a mandatory `schema` version field;
//! unknown keys are rejected so typos fail loudly instead of silently
//! falling back to defaults.

use std::fmt;
use std::path::Path;

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};

/// Version of the config schema this binary reads and writes.
pub const SCHEMA_VERSION: u32 = 1;

fn default_thinning() -> u64 {
    1
}

fn default_burn_in() -> f64 {
    0.1
}

/// Top-level experiment description. Field semantics are documented on the
/// preset constructors; everything here round-trips through TOML.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub schema: u32,
    /// Human label; becomes part of log lines, never of file names.
    pub name: String,
    /// Root seed from which every chain's streams derive.
    pub master_seed: u64,
    pub chains: u32,
    /// Main kernel steps per chain.
    pub steps: u64,
    /// Record θ every `thinning` steps (0 is treated as 1).
    #[serde(default = "default_thinning")]
    pub thinning: u64,
    /// Fraction of each trace discarded before summary statistics.
    #[serde(default = "default_burn_in")]
    pub burn_in_frac: f64,
    /// Output directory; overridable by `HABC_OUT_DIR` and `--out-dir`.
    pub out_dir: String,
    pub problem: ProblemConfig,
    pub sampler: SamplerSection,
    /// Present only for gradient bias/variance studies (`gradprobe`).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub probe: Option<ProbeSection>,
}

/// Which inference problem to run, with its data and ABC settings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum ProblemConfig {
    /// Rate of an exponential, observed through the average of
    /// `draws_per_sim` draws; the posterior is an analytic Gamma.
    ExpDemo {
        prior_alpha: f64,
        prior_beta: f64,
        draws_per_sim: usize,
        /// The observed average y.
        observed: f64,
        /// ε-kernel width (one statistic).
        epsilon: Vec<f64>,
        /// Simulation replicates S per likelihood evaluation.
        replicates: usize,
        init_theta: Vec<f64>,
    },
    /// Blowfly population dynamics; the observed series is summarized to
    /// ten statistics by the same pipeline as simulations.
    Blowfly {
        /// Path to the observed daily-count series (one value per line);
        /// omitted means the bundled series.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        observed_path: Option<String>,
        epsilon: Vec<f64>,
        replicates: usize,
        init_theta: Vec<f64>,
    },
    /// Two-class logistic regression on bundled 8×8 digit images
    /// (tractable likelihood; used for high-dimensional gradient studies).
    Logreg {
        /// Path to label,pixels CSV; omitted means the bundled digits.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        data_path: Option<String>,
        /// Mini-batch size n.
        batch_size: usize,
        /// Steps of plain gradient descent used to locate θ_MAP, from
        /// which every chain starts.
        map_descent_steps: u64,
        map_descent_rate: f64,
    },
}

impl ProblemConfig {
    pub fn kind_name(&self) -> &'static str {
        match self {
            ProblemConfig::ExpDemo { .. } => "exp-demo",
            ProblemConfig::Blowfly { .. } => "blowfly",
            ProblemConfig::Logreg { .. } => "logreg",
        }
    }
}

/// Sampler selection plus every hyperparameter the kernels take. Optional
/// fields apply only to some kernels; validation rejects configs that set
/// a field their kernel ignores silently.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SamplerSection {
    pub kind: SamplerKind,
    /// Step size η (gradient kernels).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eta: Option<f64>,
    /// Friction scalar c (SGHMC/SGNHT noise scale).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub friction_c: Option<f64>,
    /// Thermostat initial value ξ₀ (SGNHT).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub xi0: Option<f64>,
    /// Random-walk proposal scale per coordinate (Metropolis).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub proposal_std: Option<Vec<f64>>,
    /// Keep replicate seeds in the chain state across steps.
    pub persistent_seeds: bool,
    /// Per-seed flip probability γ (persistent chains only).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma: Option<f64>,
    pub likelihood: LikelihoodChoice,
    /// How ∇U is estimated (gradient kernels only).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gradient: Option<GradientSection>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SamplerKind {
    /// Pseudo-marginal random-walk Metropolis.
    SlMcmc,
    Sgld,
    Sghmc,
    Sgnht,
}

impl SamplerKind {
    pub fn is_gradient_kernel(self) -> bool {
        !matches!(self, SamplerKind::SlMcmc)
    }

    pub fn name(self) -> &'static str {
        match self {
            SamplerKind::SlMcmc => "sl-mcmc",
            SamplerKind::Sgld => "sgld",
            SamplerKind::Sghmc => "sghmc",
            SamplerKind::Sgnht => "sgnht",
        }
    }
}

impl fmt::Display for SamplerKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LikelihoodChoice {
    KernelEps,
    Synthetic,
}

/// Gradient estimator settings (η's companion; see the sampler section).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GradientSection {
    pub method: GradientMethodChoice,
    /// Perturbation half-width; scalar, or one entry per coordinate.
    pub d_theta: Vec<f64>,
    /// SPSA mask repeats R (ignored by the other methods).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub repeats: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GradientMethodChoice {
    Fdsa,
    Spsa,
    /// Analytic mini-batch gradient (logistic regression baseline only).
    Exact,
}

/// Settings for the gradient bias/variance study.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProbeSection {
    /// Fresh-seed trials per (likelihood, S) cell.
    pub trials: usize,
    /// Replicate counts S to probe.
    pub replicate_counts: Vec<usize>,
}

impl ExperimentConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig = toml::from_str(text).context("parsing config")?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading config {}", path.display()))?;
        Self::from_toml_str(&text)
            .with_context(|| format!("in config {}", path.display()))
    }

    pub fn to_toml_string(&self) -> Result<String> {
        toml::to_string_pretty(self).context("serializing config")
    }

    /// Reject invalid settings with the offending field's path.
    pub fn validate(&self) -> Result<()> {
        if self.schema != SCHEMA_VERSION {
            bail!(
                "schema: expected version {SCHEMA_VERSION}, got {}",
                self.schema
            );
        }
        if self.chains == 0 {
            bail!("chains: must be at least 1");
        }
        if !(0.0..1.0).contains(&self.burn_in_frac) {
            bail!("burn_in_frac: must lie in [0, 1)");
        }
        if self.out_dir.is_empty() {
            bail!("out_dir: must be non-empty");
        }
        self.validate_problem()?;
        self.validate_sampler()?;
        if let Some(probe) = &self.probe {
            if probe.trials < 2 {
                bail!("probe.trials: need at least 2");
            }
            if probe.replicate_counts.iter().any(|&s| s < 2) {
                bail!("probe.replicate_counts: every S must be at least 2");
            }
            if !matches!(self.problem, ProblemConfig::ExpDemo { .. }) {
                bail!("probe: only supported for problem.kind = \"exp-demo\"");
            }
        }
        Ok(())
    }

    fn validate_problem(&self) -> Result<()> {
        let check_eps = |eps: &[f64], dim: usize, kind: &str| -> Result<()> {
            if eps.len() != dim {
                bail!("problem.epsilon: {kind} needs {dim} entries, got {}", eps.len());
            }
            if eps.iter().any(|e| !(e.is_finite() && *e > 0.0)) {
                bail!("problem.epsilon: entries must be positive");
            }
            Ok(())
        };
        match &self.problem {
            ProblemConfig::ExpDemo {
                prior_alpha,
                prior_beta,
                draws_per_sim,
                observed,
                epsilon,
                replicates,
                init_theta,
            } => {
                if !(prior_alpha.is_finite() && *prior_alpha > 0.0)
                    || !(prior_beta.is_finite() && *prior_beta > 0.0)
                {
                    bail!("problem.prior_alpha/prior_beta: must be positive");
                }
                if *draws_per_sim == 0 {
                    bail!("problem.draws_per_sim: must be at least 1");
                }
                if !(observed.is_finite() && *observed > 0.0) {
                    bail!("problem.observed: must be positive");
                }
                check_eps(epsilon, 1, "exp-demo")?;
                if *replicates == 0 {
                    bail!("problem.replicates: must be at least 1");
                }
                if init_theta.len() != 1 || !(init_theta[0] > 0.0) {
                    bail!("problem.init_theta: exp-demo needs one positive entry");
                }
            }
            ProblemConfig::Blowfly {
                epsilon,
                replicates,
                init_theta,
                ..
            } => {
                check_eps(epsilon, 10, "blowfly")?;
                if *replicates < 2 {
                    bail!("problem.replicates: blowfly synthetic likelihood needs S >= 2");
                }
                if init_theta.len() != 6 {
                    bail!("problem.init_theta: blowfly needs 6 entries");
                }
                if init_theta.iter().any(|t| !t.is_finite()) {
                    bail!("problem.init_theta: entries must be finite");
                }
            }
            ProblemConfig::Logreg {
                batch_size,
                map_descent_steps,
                map_descent_rate,
                ..
            } => {
                if *batch_size == 0 {
                    bail!("problem.batch_size: must be at least 1");
                }
                if *map_descent_steps == 0 {
                    bail!("problem.map_descent_steps: must be at least 1");
                }
                if !(map_descent_rate.is_finite() && *map_descent_rate > 0.0) {
                    bail!("problem.map_descent_rate: must be positive");
                }
            }
        }
        Ok(())
    }

    fn validate_sampler(&self) -> Result<()> {
        let s = &self.sampler;
        let is_logreg = matches!(self.problem, ProblemConfig::Logreg { .. });
        match s.kind {
            SamplerKind::SlMcmc => {
                if is_logreg {
                    bail!("sampler.kind: sl-mcmc needs a simulator problem");
                }
                let std = s
                    .proposal_std
                    .as_ref()
                    .context("sampler.proposal_std: required for sl-mcmc")?;
                if std.iter().any(|v| !(v.is_finite() && *v > 0.0)) {
                    bail!("sampler.proposal_std: entries must be positive");
                }
                if s.gradient.is_some() {
                    bail!("sampler.gradient: sl-mcmc takes no gradient settings");
                }
                if s.eta.is_some() || s.friction_c.is_some() || s.xi0.is_some() {
                    bail!("sampler.eta/friction_c/xi0: not used by sl-mcmc");
                }
            }
            SamplerKind::Sgld | SamplerKind::Sghmc | SamplerKind::Sgnht => {
                let eta = s.eta.context("sampler.eta: required for gradient kernels")?;
                if !(eta.is_finite() && eta > 0.0) {
                    bail!("sampler.eta: must be positive");
                }
                if s.proposal_std.is_some() {
                    bail!("sampler.proposal_std: only sl-mcmc uses it");
                }
                let grad = s
                    .gradient
                    .as_ref()
                    .context("sampler.gradient: required for gradient kernels")?;
                if grad.d_theta.is_empty()
                    || grad.d_theta.iter().any(|d| !(d.is_finite() && *d > 0.0))
                {
                    bail!("sampler.gradient.d_theta: entries must be positive");
                }
                match grad.method {
                    GradientMethodChoice::Exact => {
                        if !is_logreg {
                            bail!(
                                "sampler.gradient.method: exact gradients exist only \
                                 for logreg"
                            );
                        }
                    }
                    GradientMethodChoice::Spsa => {
                        let r = grad
                            .repeats
                            .context("sampler.gradient.repeats: required for spsa")?;
                        if r == 0 {
                            bail!("sampler.gradient.repeats: must be at least 1");
                        }
                    }
                    GradientMethodChoice::Fdsa => {}
                }
                if matches!(s.kind, SamplerKind::Sghmc | SamplerKind::Sgnht) {
                    let c = s
                        .friction_c
                        .context("sampler.friction_c: required for sghmc/sgnht")?;
                    if !(c.is_finite() && c >= 0.0) {
                        bail!("sampler.friction_c: must be non-negative");
                    }
                } else if s.friction_c.is_some() {
                    bail!("sampler.friction_c: only sghmc/sgnht use it");
                }
                if s.kind == SamplerKind::Sgnht {
                    let xi = s.xi0.context("sampler.xi0: required for sgnht")?;
                    if !xi.is_finite() {
                        bail!("sampler.xi0: must be finite");
                    }
                } else if s.xi0.is_some() {
                    bail!("sampler.xi0: only sgnht uses it");
                }
            }
        }
        if s.persistent_seeds {
            if is_logreg {
                bail!("sampler.persistent_seeds: logreg has no replicate seeds");
            }
            let gamma = s
                .gamma
                .context("sampler.gamma: required when persistent_seeds = true")?;
            if !(0.0..=1.0).contains(&gamma) {
                bail!("sampler.gamma: must lie in [0, 1]");
            }
        } else if s.gamma.is_some() {
            bail!("sampler.gamma: only persistent-seed chains flip seeds");
        }
        Ok(())
    }
}
