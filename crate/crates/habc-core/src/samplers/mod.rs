//! Markov chain kernels over simulator-backed posteriors.
//!
//! Two families share one state type:
//!
//! * **Metropolis chains** ([`abc_mcmc_step`]) carry a cache of simulator
//!   replicates in the state (the pseudo-marginal construction) and accept
//!   or reject proposals by likelihood ratio.
//! * **Stochastic-gradient chains** ([`sgld_step`], [`SghmcKernel`],
//!   [`sgnht_step`]) follow noisy Hamiltonian/Langevin dynamics driven by a
//!   gradient estimate and never apply an accept test.
//!
//! Both can hold their per-replicate random seeds fixed across steps
//! ("persistent seeds"), turning the simulator into a deterministic
//! function the chain can walk smoothly; the companion seed-flip kernels
//! ([`seed_flip_step`], [`seed_flip_per_replicate`]) then resample seeds so
//! the chain does not stay conditioned on one noise realization forever.
//!
//! The exact-gradient leapfrog sampler ([`hmc_reference_step`]) provides a
//! ground-truth baseline on analytic targets.

mod abc_mcmc;
mod chain;
mod hmc;
mod seed_flip;
mod sg;

pub use abc_mcmc::abc_mcmc_step;
pub use chain::{run_chain, ChainRun};
pub use hmc::{hmc_reference_step, leapfrog, AnalyticTarget, StandardGaussian};
pub use seed_flip::{seed_flip_per_replicate, seed_flip_step};
pub use sg::{sgld_step, sgnht_step, SghmcKernel};

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::gradients::{GradientConfig, GradientEstimate};
use crate::likelihoods::ReplicateSet;
use crate::simulators::Simulator;
use crate::stream::Stream;
use crate::types::{ParameterVector, SeedVector};

/// Everything a kernel may read or advance in one transition.
///
/// `replicates` is populated for Metropolis chains (which need cached
/// simulator outputs for their acceptance ratio) and absent for gradient
/// chains (which reconstruct what they need from `seeds` on demand).
#[derive(Debug, Clone)]
pub struct SamplerState {
    pub(crate) theta: ParameterVector,
    pub(crate) momentum: Option<Vec<f64>>,
    pub(crate) thermostat: Option<f64>,
    pub(crate) seeds: SeedVector,
    pub(crate) replicates: Option<ReplicateSet>,
    pub(crate) step: u64,
}

impl SamplerState {
    /// State for a gradient-driven chain (no replicate cache).
    pub fn gradient_chain(theta: ParameterVector, seeds: SeedVector) -> Self {
        SamplerState {
            theta,
            momentum: None,
            thermostat: None,
            seeds,
            replicates: None,
            step: 0,
        }
    }

    /// State for a Metropolis chain: simulates the initial replicate cache
    /// so the provenance invariant holds from step 0.
    pub fn metropolis_chain(
        sim: &dyn Simulator,
        theta: ParameterVector,
        seeds: SeedVector,
    ) -> Result<Self> {
        let replicates = ReplicateSet::simulate_all(sim, &theta, &seeds)?;
        Ok(SamplerState {
            theta,
            momentum: None,
            thermostat: None,
            seeds,
            replicates: Some(replicates),
            step: 0,
        })
    }

    /// Attach a momentum drawn ρ ~ N(0, I) (required by SGHMC/SGNHT).
    pub fn with_fresh_momentum(mut self, stream: &mut Stream) -> Self {
        let rho = (0..self.theta.dim())
            .map(|_| stream.standard_normal())
            .collect();
        self.momentum = Some(rho);
        self
    }

    /// Attach a thermostat variable initialized to `xi0` (SGNHT).
    pub fn with_thermostat(mut self, xi0: f64) -> Self {
        self.thermostat = Some(xi0);
        self
    }

    pub fn theta(&self) -> &ParameterVector {
        &self.theta
    }

    pub fn momentum(&self) -> Option<&[f64]> {
        self.momentum.as_deref()
    }

    pub fn thermostat(&self) -> Option<f64> {
        self.thermostat
    }

    pub fn seeds(&self) -> &SeedVector {
        &self.seeds
    }

    pub fn replicates(&self) -> Option<&ReplicateSet> {
        self.replicates.as_ref()
    }

    pub fn step(&self) -> u64 {
        self.step
    }
}

/// Hyperparameters shared by the stochastic-gradient kernels.
#[derive(Debug, Clone)]
pub struct SamplerConfig {
    /// Step size η.
    pub eta: f64,
    /// Friction scalar c (C = c·I).
    pub friction_c: f64,
    /// Per-seed flip probability γ used by the seed-flip kernels.
    pub gamma: f64,
    /// Diagonal mass matrix for the leapfrog reference; None means identity.
    pub mass: Option<Vec<f64>>,
    /// Keep replicate seeds fixed across steps (flips aside)?
    pub persistent_seeds: bool,
    pub grad_cfg: GradientConfig,
    /// EMA decay for SGHMC's online gradient-variance estimate V̂.
    pub vhat_decay: f64,
}

impl SamplerConfig {
    pub fn validate(&self, dim: usize) -> Result<()> {
        if !(self.eta.is_finite() && self.eta > 0.0) {
            return Err(Error::InvalidArgument("eta must be positive"));
        }
        if !(self.friction_c.is_finite() && self.friction_c >= 0.0) {
            return Err(Error::InvalidArgument("friction_c must be non-negative"));
        }
        if !(0.0..=1.0).contains(&self.gamma) {
            return Err(Error::InvalidArgument("gamma must lie in [0, 1]"));
        }
        if !(0.0..1.0).contains(&self.vhat_decay) {
            return Err(Error::InvalidArgument("vhat_decay must lie in [0, 1)"));
        }
        if let Some(mass) = &self.mass {
            if mass.len() != dim {
                return Err(Error::ShapeMismatch {
                    expected: dim,
                    got: mass.len(),
                });
            }
            if mass.iter().any(|m| !(m.is_finite() && *m > 0.0)) {
                return Err(Error::InvalidArgument("mass entries must be positive"));
            }
        }
        self.grad_cfg.validate(dim)
    }
}

impl Default for SamplerConfig {
    fn default() -> Self {
        SamplerConfig {
            eta: 1e-2,
            friction_c: 1.0,
            gamma: 0.1,
            mass: None,
            persistent_seeds: true,
            grad_cfg: GradientConfig::default(),
            vhat_decay: 0.99,
        }
    }
}

/// What one kernel transition did, for accounting and diagnostics.
#[derive(Debug, Clone, Copy, Default)]
pub struct StepInfo {
    /// Simulator calls consumed by this transition.
    pub sims: u64,
    /// Metropolis outcome, when the kernel has one.
    pub accepted: Option<bool>,
    /// A gradient was substituted (or an update discarded) because of
    /// degenerate simulations or a non-finite update.
    pub invalid: bool,
}

/// Gradient supplier for the stochastic-gradient kernels: given the current
/// position and the chain's replicate seeds, produce a ∇U estimate. The
/// seeds argument lets persistent-seed chains hand their state seeds to a
/// simulation-driven estimator; exact-gradient targets ignore it.
pub type GradUFn<'a> = dyn FnMut(&ParameterVector, &SeedVector) -> GradientEstimate + 'a;
