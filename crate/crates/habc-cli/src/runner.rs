//! Experiment execution: builds the configured problem, runs every chain
//! on its own worker thread, and writes the output bundle.
//!
//! Determinism contract: all randomness in chain `c` derives from
//! `derive_stream(master_seed, (c + 1) · 16 + role)`, with a role substream
//! per concern (initial seeds, kernel noise, masks, flips, fresh seeds,
//! batches, momentum). Chains therefore neither share streams nor depend
//! on scheduling, and rerunning a config reproduces every output byte.
//!
//! Bundle layout: `trace_<chain>.csv` (header `step,theta_0,...`, LF line
//! endings), `projection_<chain>.csv` for problems with more than two
//! parameters, `diagnostics.json`, and `config.resolved` (the exact config
//! that ran, after CLI/env overrides).

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use serde::Serialize;

use habc_core::diagnostics::{
    increment_autocorr, project_2d, tvd_vs_analytic, ChainTrace, ProjectionMatrix,
};
use habc_core::gradients::{
    abc_grad_u, central_difference_grad, exact_grad_u_logreg, spsa_average_grad, DTheta,
    GradMethod, GradientConfig, GradientEstimate, PerturbationMask,
};
use habc_core::likelihoods::LikelihoodKind;
use habc_core::samplers::{
    abc_mcmc_step, run_chain, seed_flip_per_replicate, seed_flip_step, sgld_step,
    sgnht_step, ChainRun, SamplerConfig, SamplerState, SghmcKernel,
};
use habc_core::simulators::{
    exp_demo_true_posterior, BlowflySimulator, ExpDemoSimulator,
    LogisticRegressionTarget, Simulator,
};
use habc_core::special::GammaDist;
use habc_core::stream::{derive_stream, draw_seed_vector};
use habc_core::types::{EpsilonVector, ParameterVector, SeedVector, SummaryVector};

use crate::config::{
    ExperimentConfig, GradientMethodChoice, GradientSection, LikelihoodChoice,
    ProblemConfig, SamplerKind, SamplerSection,
};
use crate::data;

/// Number of stream roles reserved per chain (see module docs).
const STREAM_BLOCK: u64 = 16;
/// Role offsets inside a chain's stream block.
const ROLE_INIT_SEEDS: u64 = 0;
const ROLE_KERNEL_NOISE: u64 = 1;
const ROLE_MASKS: u64 = 2;
const ROLE_FLIPS: u64 = 3;
const ROLE_FRESH_SEEDS: u64 = 4;
const ROLE_BATCHES: u64 = 5;
const ROLE_MOMENTUM: u64 = 6;
/// Experiment-level substream for the 2-D projection matrix.
const PROJECTION_SUBSTREAM: u64 = 1;

fn chain_stream(master_seed: u64, chain: u32, role: u64) -> habc_core::stream::Stream {
    derive_stream(master_seed, (chain as u64 + 1) * STREAM_BLOCK + role)
}

/// Per-chain entry of `diagnostics.json`.
#[derive(Debug, Clone, Serialize)]
pub struct ChainDiagnostics {
    pub chain: u32,
    pub retained_samples: usize,
    pub sim_calls: u64,
    pub flip_sims: u64,
    pub invalid_steps: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub acceptance_rate: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub avg_momentum_sq: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub final_thermostat: Option<f64>,
    /// Total variational distance against the analytic posterior (problems
    /// that have one).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tvd: Option<f64>,
    /// Lag-1 autocorrelation of position increments after burn-in.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub increment_autocorr_lag1: Option<f64>,
}

/// Experiment-level summary of `diagnostics.json`.
#[derive(Debug, Clone, Serialize)]
pub struct AggregateDiagnostics {
    pub sim_calls_total: u64,
    pub invalid_steps_total: u64,
    pub sims_per_step: f64,
    /// Invalid-step events as a fraction of all main steps.
    pub invalid_fraction: f64,
    /// Mean of the per-chain TVDs, when they exist.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tvd_mean: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Diagnostics {
    pub schema: u32,
    pub name: String,
    pub problem: String,
    pub sampler: String,
    pub master_seed: u64,
    pub steps: u64,
    pub thinning: u64,
    pub burn_in_frac: f64,
    pub chains: Vec<ChainDiagnostics>,
    pub aggregate: AggregateDiagnostics,
}

/// A finished experiment: where it wrote and what it measured.
pub struct RunOutcome {
    pub out_dir: PathBuf,
    pub diagnostics: Diagnostics,
}

struct ChainOutput {
    run: ChainRun,
    trace: ChainTrace,
}

/// The fully built problem, ready to hand to chain workers.
enum BuiltProblem {
    Sim {
        sim: Box<dyn Simulator + Send>,
        y: SummaryVector,
        eps: EpsilonVector,
        init: ParameterVector,
        replicates: usize,
        /// Analytic posterior for TVD, when the problem has one.
        posterior: Option<GammaDist>,
    },
    Logreg {
        target: LogisticRegressionTarget,
        theta_map: ParameterVector,
        batch_size: usize,
    },
}

impl BuiltProblem {
    fn dim(&self) -> usize {
        match self {
            BuiltProblem::Sim { init, .. } => init.dim(),
            BuiltProblem::Logreg { target, .. } => target.param_dim(),
        }
    }
}

fn build_problem(cfg: &ExperimentConfig) -> Result<BuiltProblem> {
    match &cfg.problem {
        ProblemConfig::ExpDemo {
            prior_alpha,
            prior_beta,
            draws_per_sim,
            observed,
            epsilon,
            replicates,
            init_theta,
        } => {
            let sim = ExpDemoSimulator::new(*draws_per_sim, *prior_alpha, *prior_beta)
                .map_err(|e| anyhow::anyhow!("problem: {e}"))?;
            let posterior = exp_demo_true_posterior(
                *prior_alpha,
                *prior_beta,
                *observed,
                *draws_per_sim,
            )
            .map_err(|e| anyhow::anyhow!("problem.observed: {e}"))?;
            Ok(BuiltProblem::Sim {
                sim: Box::new(sim),
                y: SummaryVector::new(vec![*observed]),
                eps: EpsilonVector::new(epsilon.clone())
                    .map_err(|e| anyhow::anyhow!("problem.epsilon: {e}"))?,
                init: ParameterVector::new(init_theta.clone())
                    .map_err(|e| anyhow::anyhow!("problem.init_theta: {e}"))?,
                replicates: *replicates,
                posterior: Some(posterior),
            })
        }
        ProblemConfig::Blowfly {
            observed_path,
            epsilon,
            replicates,
            init_theta,
        } => {
            let sim = BlowflySimulator::standard();
            let text = match observed_path {
                Some(path) => fs::read_to_string(path)
                    .with_context(|| format!("problem.observed_path: reading {path}"))?,
                None => data::BLOWFLY_OBSERVED_CSV.to_string(),
            };
            let series = data::parse_series(&text).context("problem.observed_path")?;
            let y = sim.summarize_series(&series);
            if y.is_degenerate() {
                bail!("problem.observed_path: series summarizes to degenerate statistics");
            }
            Ok(BuiltProblem::Sim {
                sim: Box::new(sim),
                y,
                eps: EpsilonVector::new(epsilon.clone())
                    .map_err(|e| anyhow::anyhow!("problem.epsilon: {e}"))?,
                init: ParameterVector::new(init_theta.clone())
                    .map_err(|e| anyhow::anyhow!("problem.init_theta: {e}"))?,
                replicates: *replicates,
                posterior: None,
            })
        }
        ProblemConfig::Logreg {
            data_path,
            batch_size,
            map_descent_steps,
            map_descent_rate,
        } => {
            let text = match data_path {
                Some(path) => fs::read_to_string(path)
                    .with_context(|| format!("problem.data_path: reading {path}"))?,
                None => data::DIGITS_CSV.to_string(),
            };
            let target = data::parse_digits(&text).context("problem.data_path")?;
            if *batch_size > target.num_examples() {
                bail!(
                    "problem.batch_size: {batch_size} exceeds dataset size {}",
                    target.num_examples()
                );
            }
            let theta_map =
                logreg_map_estimate(&target, *map_descent_steps, *map_descent_rate)?;
            Ok(BuiltProblem::Logreg {
                target,
                theta_map,
                batch_size: *batch_size,
            })
        }
    }
}

/// Full-batch gradient ascent on the log posterior: the deterministic MAP
/// search every logreg chain starts from.
fn logreg_map_estimate(
    target: &LogisticRegressionTarget,
    steps: u64,
    rate: f64,
) -> Result<ParameterVector> {
    let full: Vec<usize> = (0..target.num_examples()).collect();
    let mut theta = ParameterVector::new(vec![0.0; target.param_dim()])
        .expect("zero vector is valid");
    for step in 0..steps {
        let (_, grad) = target
            .minibatch_loglik_and_grad(&theta, &full)
            .map_err(|e| anyhow::anyhow!("MAP descent: {e}"))?;
        let next: Vec<f64> = theta
            .values()
            .iter()
            .zip(&grad)
            .map(|(t, g)| t + rate * g)
            .collect();
        theta = match ParameterVector::try_from_update(next) {
            Some(t) => t,
            None => bail!(
                "problem.map_descent_rate: descent diverged at step {step}; \
                 lower the rate"
            ),
        };
    }
    Ok(theta)
}

fn core_likelihood(choice: LikelihoodChoice) -> LikelihoodKind {
    match choice {
        LikelihoodChoice::KernelEps => LikelihoodKind::KernelEps,
        LikelihoodChoice::Synthetic => LikelihoodKind::Synthetic,
    }
}

fn core_d_theta(d: &[f64], dim: usize) -> Result<DTheta> {
    if d.len() == 1 {
        Ok(DTheta::Scalar(d[0]))
    } else if d.len() == dim {
        Ok(DTheta::PerCoordinate(d.to_vec()))
    } else {
        bail!(
            "sampler.gradient.d_theta: need 1 or {dim} entries, got {}",
            d.len()
        )
    }
}

fn core_gradient_config(
    grad: &GradientSection,
    likelihood: LikelihoodChoice,
    dim: usize,
) -> Result<GradientConfig> {
    let method = match grad.method {
        GradientMethodChoice::Fdsa => GradMethod::Fdsa,
        GradientMethodChoice::Spsa => GradMethod::Spsa,
        GradientMethodChoice::Exact => GradMethod::Exact,
    };
    Ok(GradientConfig {
        d_theta: core_d_theta(&grad.d_theta, dim)?,
        repeats: grad.repeats.unwrap_or(1),
        method,
        likelihood: core_likelihood(likelihood),
    })
}

/// Run one chain of a simulator-backed problem (Metropolis or gradient
/// kernel, persistent or fresh seeds).
#[allow(clippy::too_many_arguments)]
fn run_simulator_chain(
    sim: &dyn Simulator,
    y: &SummaryVector,
    eps: &EpsilonVector,
    init: &ParameterVector,
    replicates: usize,
    sampler: &SamplerSection,
    steps: u64,
    thinning: u64,
    master_seed: u64,
    chain: u32,
) -> Result<ChainRun> {
    let dim = init.dim();
    let prior = sim.spec().prior.clone();
    let likelihood = core_likelihood(sampler.likelihood);
    let persistent = sampler.persistent_seeds;
    let gamma = sampler.gamma.unwrap_or(0.0);

    let mut init_stream = chain_stream(master_seed, chain, ROLE_INIT_SEEDS);
    let seeds0 = draw_seed_vector(replicates, &mut init_stream);
    let mut noise = chain_stream(master_seed, chain, ROLE_KERNEL_NOISE);
    let mut flips = chain_stream(master_seed, chain, ROLE_FLIPS);

    if sampler.kind == SamplerKind::SlMcmc {
        let proposal_std = sampler.proposal_std.clone().expect("validated");
        if proposal_std.len() != dim {
            bail!(
                "sampler.proposal_std: need {dim} entries, got {}",
                proposal_std.len()
            );
        }
        let state = SamplerState::metropolis_chain(sim, init.clone(), seeds0)
            .map_err(|e| anyhow::anyhow!("chain init: {e}"))?;
        let mut main = |st: &mut SamplerState| {
            abc_mcmc_step(
                st,
                sim,
                y,
                eps,
                &prior,
                &proposal_std,
                likelihood,
                persistent,
                &mut noise,
            )
        };
        let mut flip = |st: &mut SamplerState| {
            seed_flip_step(st, sim, y, eps, likelihood, gamma, &mut flips)
        };
        let flip_opt: Option<&mut dyn FnMut(&mut SamplerState) -> _> =
            if persistent && gamma > 0.0 {
                Some(&mut flip)
            } else {
                None
            };
        return Ok(run_chain(state, &mut main, flip_opt, steps, thinning));
    }

    // Gradient kernels.
    let grad_section = sampler.gradient.as_ref().expect("validated");
    let grad_cfg = core_gradient_config(grad_section, sampler.likelihood, dim)?;
    grad_cfg
        .validate(dim)
        .map_err(|e| anyhow::anyhow!("sampler.gradient: {e}"))?;
    let core_cfg = SamplerConfig {
        eta: sampler.eta.expect("validated"),
        friction_c: sampler.friction_c.unwrap_or(0.0),
        gamma,
        mass: None,
        persistent_seeds: persistent,
        grad_cfg: grad_cfg.clone(),
        vhat_decay: 0.99,
    };
    core_cfg
        .validate(dim)
        .map_err(|e| anyhow::anyhow!("sampler: {e}"))?;

    let mut mask_stream = chain_stream(master_seed, chain, ROLE_MASKS);
    let mut fresh_stream = chain_stream(master_seed, chain, ROLE_FRESH_SEEDS);
    let mut grad_fn = |theta: &ParameterVector, seeds: &SeedVector| -> GradientEstimate {
        let fresh;
        let use_seeds = if persistent {
            seeds
        } else {
            fresh = draw_seed_vector(replicates, &mut fresh_stream);
            &fresh
        };
        abc_grad_u(
            sim,
            theta,
            use_seeds,
            y,
            eps,
            &prior,
            &grad_cfg,
            &mut mask_stream,
        )
        .expect("gradient config validated")
    };

    let mut momentum_stream = chain_stream(master_seed, chain, ROLE_MOMENTUM);
    let state = match sampler.kind {
        SamplerKind::Sgld => SamplerState::gradient_chain(init.clone(), seeds0),
        SamplerKind::Sghmc => SamplerState::gradient_chain(init.clone(), seeds0)
            .with_fresh_momentum(&mut momentum_stream),
        SamplerKind::Sgnht => SamplerState::gradient_chain(init.clone(), seeds0)
            .with_fresh_momentum(&mut momentum_stream)
            .with_thermostat(sampler.xi0.expect("validated")),
        SamplerKind::SlMcmc => unreachable!("handled above"),
    };

    let mut sghmc = SghmcKernel::new(dim, true);
    let kind = sampler.kind;
    let mut main = |st: &mut SamplerState| match kind {
        SamplerKind::Sgld => sgld_step(st, &mut grad_fn, &core_cfg, &mut noise),
        SamplerKind::Sghmc => sghmc.step(st, &mut grad_fn, &core_cfg, &mut noise),
        SamplerKind::Sgnht => sgnht_step(st, &mut grad_fn, &core_cfg, &mut noise),
        SamplerKind::SlMcmc => unreachable!("handled above"),
    };
    let mut flip = |st: &mut SamplerState| {
        seed_flip_per_replicate(st, sim, y, eps, gamma, &mut flips)
    };
    let flip_opt: Option<&mut dyn FnMut(&mut SamplerState) -> _> =
        if persistent && gamma > 0.0 {
            Some(&mut flip)
        } else {
            None
        };
    Ok(run_chain(state, &mut main, flip_opt, steps, thinning))
}

/// Run one chain on the logistic-regression posterior: the gradient comes
/// from the mini-batch potential, either analytically or through SPSA /
/// central differences treating it as a black box. Both sides of every
/// perturbation share the step's batch.
#[allow(clippy::too_many_arguments)]
fn run_logreg_chain(
    target: &LogisticRegressionTarget,
    theta_map: &ParameterVector,
    batch_size: usize,
    sampler: &SamplerSection,
    steps: u64,
    thinning: u64,
    master_seed: u64,
    chain: u32,
) -> Result<ChainRun> {
    let dim = target.param_dim();
    let grad_section = sampler.gradient.as_ref().expect("validated");
    let d_theta = core_d_theta(&grad_section.d_theta, dim)?;
    let repeats = grad_section.repeats.unwrap_or(1);
    let method = grad_section.method;

    let core_cfg = SamplerConfig {
        eta: sampler.eta.expect("validated"),
        friction_c: sampler.friction_c.unwrap_or(0.0),
        gamma: 0.0,
        mass: None,
        persistent_seeds: false,
        grad_cfg: GradientConfig::default(),
        vhat_decay: 0.99,
    };

    let mut init_stream = chain_stream(master_seed, chain, ROLE_INIT_SEEDS);
    let seeds0 = draw_seed_vector(1, &mut init_stream);
    let mut noise = chain_stream(master_seed, chain, ROLE_KERNEL_NOISE);
    let mut mask_stream = chain_stream(master_seed, chain, ROLE_MASKS);
    let mut batch_stream = chain_stream(master_seed, chain, ROLE_BATCHES);

    let mut grad_fn = |theta: &ParameterVector, _: &SeedVector| -> GradientEstimate {
        let batch = target
            .sample_batch(batch_size, &mut batch_stream)
            .expect("batch size validated");
        match method {
            GradientMethodChoice::Exact => {
                exact_grad_u_logreg(target, theta, &batch).expect("shapes fixed")
            }
            GradientMethodChoice::Spsa | GradientMethodChoice::Fdsa => {
                let mut l = |t: &ParameterVector| {
                    target
                        .minibatch_loglik_and_grad(t, &batch)
                        .map(|(lp, _)| lp)
                        .unwrap_or(f64::NEG_INFINITY)
                };
                let (lik_grad, evals) = if method == GradientMethodChoice::Spsa {
                    let masks: Vec<PerturbationMask> = (0..repeats)
                        .map(|_| PerturbationMask::draw(dim, &mut mask_stream))
                        .collect();
                    (
                        spsa_average_grad(&mut l, theta, &d_theta, &masks),
                        2 * repeats as u64,
                    )
                } else {
                    (
                        central_difference_grad(&mut l, theta, &d_theta),
                        2 * dim as u64,
                    )
                };
                let valid = lik_grad.iter().all(|g| g.is_finite());
                GradientEstimate {
                    grad: lik_grad.iter().map(|g| -g).collect(),
                    sims_used: evals,
                    method: if method == GradientMethodChoice::Spsa {
                        GradMethod::Spsa
                    } else {
                        GradMethod::Fdsa
                    },
                    valid,
                }
            }
        }
    };

    let mut momentum_stream = chain_stream(master_seed, chain, ROLE_MOMENTUM);
    let state = match sampler.kind {
        SamplerKind::Sgld => SamplerState::gradient_chain(theta_map.clone(), seeds0),
        SamplerKind::Sghmc => SamplerState::gradient_chain(theta_map.clone(), seeds0)
            .with_fresh_momentum(&mut momentum_stream),
        SamplerKind::Sgnht => SamplerState::gradient_chain(theta_map.clone(), seeds0)
            .with_fresh_momentum(&mut momentum_stream)
            .with_thermostat(sampler.xi0.expect("validated")),
        SamplerKind::SlMcmc => unreachable!("rejected in validation"),
    };

    let mut sghmc = SghmcKernel::new(dim, true);
    let kind = sampler.kind;
    let mut main = |st: &mut SamplerState| match kind {
        SamplerKind::Sgld => sgld_step(st, &mut grad_fn, &core_cfg, &mut noise),
        SamplerKind::Sghmc => sghmc.step(st, &mut grad_fn, &core_cfg, &mut noise),
        SamplerKind::Sgnht => sgnht_step(st, &mut grad_fn, &core_cfg, &mut noise),
        SamplerKind::SlMcmc => unreachable!("rejected in validation"),
    };
    Ok(run_chain(state, &mut main, None, steps, thinning))
}

fn run_one_chain(
    problem: &BuiltProblem,
    cfg: &ExperimentConfig,
    chain: u32,
) -> Result<ChainOutput> {
    let run = match problem {
        BuiltProblem::Sim {
            sim,
            y,
            eps,
            init,
            replicates,
            ..
        } => run_simulator_chain(
            sim.as_ref(),
            y,
            eps,
            init,
            *replicates,
            &cfg.sampler,
            cfg.steps,
            cfg.thinning,
            cfg.master_seed,
            chain,
        )?,
        BuiltProblem::Logreg {
            target,
            theta_map,
            batch_size,
        } => run_logreg_chain(
            target,
            theta_map,
            *batch_size,
            &cfg.sampler,
            cfg.steps,
            cfg.thinning,
            cfg.master_seed,
            chain,
        )?,
    };
    let trace = ChainTrace::new(
        run.samples.clone(),
        run.sim_calls,
        cfg.sampler.kind.name().to_string(),
        cfg.name.clone(),
    )
    .map_err(|e| anyhow::anyhow!("chain {chain} produced an inconsistent trace: {e}"))?;
    Ok(ChainOutput { run, trace })
}

/// Run every chain of the experiment and write the output bundle into
/// `out_dir` (created if missing). On a chain panic, completed chains'
/// traces are still written next to a `FAILED` marker.
pub fn run_experiment(cfg: &ExperimentConfig, out_dir: &Path) -> Result<RunOutcome> {
    cfg.validate()?;
    let problem = build_problem(cfg)?;
    fs::create_dir_all(out_dir)
        .with_context(|| format!("creating {}", out_dir.display()))?;

    let chain_indices: Vec<u32> = (0..cfg.chains).collect();
    let results: Vec<std::thread::Result<Result<ChainOutput>>> =
        std::thread::scope(|scope| {
            let handles: Vec<_> = chain_indices
                .iter()
                .map(|&c| {
                    let problem = &problem;
                    scope.spawn(move || run_one_chain(problem, cfg, c))
                })
                .collect();
            handles.into_iter().map(|h| h.join()).collect()
        });

    let mut outputs = Vec::with_capacity(results.len());
    let mut panic_message = None;
    for (c, joined) in results.into_iter().enumerate() {
        match joined {
            Ok(Ok(out)) => outputs.push((c as u32, out)),
            Ok(Err(e)) => return Err(e.context(format!("chain {c}"))),
            Err(payload) => {
                let msg = payload
                    .downcast_ref::<&str>()
                    .map(|s| s.to_string())
                    .or_else(|| payload.downcast_ref::<String>().cloned())
                    .unwrap_or_else(|| "opaque panic payload".to_string());
                panic_message = Some(format!("chain {c} panicked: {msg}"));
            }
        }
    }
    for (c, out) in &outputs {
        write_trace(out_dir, *c, cfg.thinning, problem.dim(), &out.run.samples)?;
    }
    if let Some(msg) = panic_message {
        fs::write(out_dir.join("FAILED"), format!("{msg}\n"))
            .with_context(|| format!("writing {}", out_dir.join("FAILED").display()))?;
        bail!("{msg}; partial traces preserved in {}", out_dir.display());
    }

    // Projections for high-dimensional problems.
    if problem.dim() > 2 {
        let mut proj_stream = derive_stream(cfg.master_seed, PROJECTION_SUBSTREAM);
        let projection = ProjectionMatrix::draw(problem.dim(), &mut proj_stream)
            .map_err(|e| anyhow::anyhow!("drawing projection matrix: {e}"))?;
        for (c, out) in &outputs {
            if out.trace.is_empty() {
                continue;
            }
            let points = project_2d(&out.trace, &projection, 1000)
                .map_err(|e| anyhow::anyhow!("projecting chain {c}: {e}"))?;
            write_projection(out_dir, *c, &points)?;
        }
    }

    let diagnostics = summarize(cfg, &problem, &outputs)?;
    let json = serde_json::to_string_pretty(&diagnostics).context("diagnostics json")?;
    fs::write(out_dir.join("diagnostics.json"), json + "\n")
        .context("writing diagnostics.json")?;

    let resolved = cfg.to_toml_string()?;
    fs::write(out_dir.join("config.resolved"), resolved)
        .context("writing config.resolved")?;

    Ok(RunOutcome {
        out_dir: out_dir.to_path_buf(),
        diagnostics,
    })
}

fn summarize(
    cfg: &ExperimentConfig,
    problem: &BuiltProblem,
    outputs: &[(u32, ChainOutput)],
) -> Result<Diagnostics> {
    let posterior = match problem {
        BuiltProblem::Sim { posterior, .. } => posterior.as_ref(),
        BuiltProblem::Logreg { .. } => None,
    };
    let mut chains = Vec::with_capacity(outputs.len());
    let mut sim_calls_total = 0u64;
    let mut invalid_total = 0u64;
    let mut tvds = Vec::new();
    for (c, out) in outputs {
        let tvd = match posterior {
            Some(p) if !out.trace.is_empty() => {
                let v = tvd_vs_analytic(&out.trace, p, 100, cfg.burn_in_frac)
                    .map_err(|e| anyhow::anyhow!("tvd for chain {c}: {e}"))?;
                tvds.push(v);
                Some(v)
            }
            _ => None,
        };
        let autocorr = burned_increment_autocorr(&out.trace, cfg.burn_in_frac);
        sim_calls_total += out.run.sim_calls;
        invalid_total += out.run.invalid_steps;
        chains.push(ChainDiagnostics {
            chain: *c,
            retained_samples: out.run.samples.len(),
            sim_calls: out.run.sim_calls,
            flip_sims: out.run.flip_sims,
            invalid_steps: out.run.invalid_steps,
            acceptance_rate: out.run.acceptance_rate(),
            avg_momentum_sq: out.run.avg_momentum_sq,
            final_thermostat: out.run.final_state.thermostat(),
            tvd,
            increment_autocorr_lag1: autocorr,
        });
    }
    let total_steps = cfg.steps * outputs.len() as u64;
    Ok(Diagnostics {
        schema: cfg.schema,
        name: cfg.name.clone(),
        problem: cfg.problem.kind_name().to_string(),
        sampler: cfg.sampler.kind.name().to_string(),
        master_seed: cfg.master_seed,
        steps: cfg.steps,
        thinning: cfg.thinning,
        burn_in_frac: cfg.burn_in_frac,
        chains,
        aggregate: AggregateDiagnostics {
            sim_calls_total,
            invalid_steps_total: invalid_total,
            sims_per_step: if total_steps == 0 {
                0.0
            } else {
                sim_calls_total as f64 / total_steps as f64
            },
            invalid_fraction: if total_steps == 0 {
                0.0
            } else {
                invalid_total as f64 / total_steps as f64
            },
            tvd_mean: if tvds.is_empty() {
                None
            } else {
                Some(tvds.iter().sum::<f64>() / tvds.len() as f64)
            },
        },
    })
}

/// Increment autocorrelation at lag 1 on the post-burn-in trace; None when
/// the trace is too short to support it.
fn burned_increment_autocorr(trace: &ChainTrace, burn_in_frac: f64) -> Option<f64> {
    let kept = trace.after_burn_in(burn_in_frac);
    if kept.len() < 3 {
        return None;
    }
    let burned = ChainTrace::new(
        kept.to_vec(),
        trace.sim_calls(),
        trace.kernel().to_string(),
        trace.config().to_string(),
    )
    .ok()?;
    increment_autocorr(&burned, 1).ok()
}

fn write_trace(
    out_dir: &Path,
    chain: u32,
    thinning: u64,
    dim: usize,
    samples: &[Vec<f64>],
) -> Result<()> {
    let thinning = thinning.max(1);
    let mut text = String::from("step");
    for d in 0..dim {
        text.push_str(&format!(",theta_{d}"));
    }
    text.push('\n');
    for (k, row) in samples.iter().enumerate() {
        text.push_str(&format!("{}", (k as u64 + 1) * thinning));
        for v in row {
            text.push_str(&format!(",{v}"));
        }
        text.push('\n');
    }
    let path = out_dir.join(format!("trace_{chain}.csv"));
    fs::write(&path, text).with_context(|| format!("writing {}", path.display()))
}

fn write_projection(out_dir: &Path, chain: u32, points: &[[f64; 2]]) -> Result<()> {
    let mut text = String::from("p0,p1\n");
    for [a, b] in points {
        text.push_str(&format!("{a},{b}\n"));
    }
    let path = out_dir.join(format!("projection_{chain}.csv"));
    fs::write(&path, text).with_context(|| format!("writing {}", path.display()))
}
