//! Benchmark simulators behind a single black-box interface.
//!
//! Every model is a deterministic function x = f(θ, ω): the parameter and a
//! 64-bit seed fully determine the output statistics. Randomness lives
//! entirely in the seed — rerunning with the same (θ, ω) is bit-identical,
//! which is what lets Markov kernels carry seeds in their state and lets
//! finite-difference gradients reuse seeds on both sides of a perturbation
//! (common random numbers).
//!
//! Implementations must map runtime trouble (overflow, parameters that blow
//! the dynamics up) to a degenerate [`SummaryVector`] rather than panicking;
//! likelihoods translate degeneracy into −∞ and samplers reject.

mod exp_demo;
pub mod blowfly;
mod logreg;
mod toy;

pub use blowfly::{BlowflyConfig, BlowflyParams, BlowflySimulator};
pub use exp_demo::{exp_demo_true_posterior, sl_gradient_reference, ExpDemoSimulator};
pub use logreg::LogisticRegressionTarget;
pub use toy::ToySimulator;

use crate::types::{ParameterVector, SimulatorSpec, SummaryVector};

/// A deterministic seeded simulator producing summary statistics.
pub trait Simulator: Sync {
    fn spec(&self) -> &SimulatorSpec;

    /// Pure function of (θ, seed). Must return `spec().stat_dim` statistics;
    /// non-finite entries mark the output degenerate.
    fn simulate(&self, theta: &ParameterVector, seed: u64) -> SummaryVector;
}
