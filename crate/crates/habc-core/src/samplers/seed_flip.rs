//! Seed-resampling transitions for persistent-seed chains.
//!
//! A chain that never changes its replicate seeds samples the posterior
//! *conditioned on one noise realization*. These kernels propose replacing
//! individual seeds — each with probability γ per step — and accept by a
//! likelihood ratio, so the pair (position kernel, flip kernel) explores
//! the full joint distribution over parameters and seeds.
//!
//! Because seed proposals are uniform and independent of the current seed,
//! the proposal is symmetric and the prior over θ cancels: the acceptance
//! ratio involves only the likelihood with the one replicate swapped.
//!
//! Two variants:
//!
//! * [`seed_flip_step`] — for Metropolis chains with a replicate cache.
//!   Scores the *full* replicate set with seed s swapped (one simulation
//!   per flip) under the chain's configured likelihood, and keeps the cache
//!   consistent. Exactly invariant for the extended pseudo-marginal target.
//! * [`seed_flip_per_replicate`] — for gradient chains that carry no cache.
//!   Simulates the current and proposed replicate (two simulations per
//!   flip) and accepts by the single-replicate ε-kernel factor. The factor
//!   is the stationary conditional the gradient dynamics' seeds should
//!   follow; the surrounding chain is itself uncorrected, so this variant
//!   trades exactness for cache-freedom.

use crate::float::FloatExt;
use crate::likelihoods::{abc_loglik, LikelihoodKind};
use crate::simulators::Simulator;
use crate::stream::Stream;
use crate::types::{EpsilonVector, SummaryVector};

use super::{SamplerState, StepInfo};

/// Σ_j log N(y_j | x_j, ε_j²); −∞ on degenerate x.
fn single_replicate_log_kernel(y: &SummaryVector, x: &SummaryVector, eps: &EpsilonVector) -> f64 {
    let mut total = 0.0;
    for ((&yj, &xj), &ej) in y.stats().iter().zip(x.stats()).zip(eps.values()) {
        if !xj.is_finite() {
            return f64::NEG_INFINITY;
        }
        let z = (yj - xj) / ej;
        total += -ej.ln() - 0.5 * crate::float::LN_2PI - 0.5 * z * z;
    }
    total
}

/// MH accept for a log ratio that may involve −∞ on either side.
fn accept_log_ratio(l_new: f64, l_cur: f64, stream: &mut Stream) -> bool {
    if l_new == f64::NEG_INFINITY {
        false
    } else if l_cur == f64::NEG_INFINITY {
        true
    } else {
        let log_alpha = l_new - l_cur;
        log_alpha >= 0.0 || stream.uniform() < log_alpha.exp()
    }
}

/// Full-set seed flips for Metropolis chains (replicate cache required).
///
/// For each replicate index independently with probability γ: draw a fresh
/// seed, simulate its output at the current θ, and accept the swap with
/// probability min(1, L(swapped set)/L(current set)). Accepted flips update
/// seed and cached output together, preserving provenance.
pub fn seed_flip_step(
    state: &mut SamplerState,
    sim: &dyn Simulator,
    y: &SummaryVector,
    eps: &EpsilonVector,
    likelihood: LikelihoodKind,
    gamma: f64,
    stream: &mut Stream,
) -> StepInfo {
    let mut sims = 0u64;
    if gamma == 0.0 {
        return StepInfo {
            sims,
            accepted: None,
            invalid: false,
        };
    }
    let count = state.seeds.count();
    for s in 0..count {
        if !stream.bernoulli(gamma) {
            continue;
        }
        let proposed_seed = stream.next_u64();
        let proposed_output = sim.simulate(&state.theta, proposed_seed);
        sims += 1;

        let reps = state
            .replicates
            .as_mut()
            .expect("full-set seed flips require a replicate cache");
        let l_cur = abc_loglik(likelihood, reps, y, eps).expect("cached dims consistent");
        let prev_seed = reps.seeds().seeds()[s];
        let prev_output = reps.outputs()[s].clone();
        reps.replace(s, proposed_seed, proposed_output);
        let l_new = abc_loglik(likelihood, reps, y, eps).expect("dims consistent");

        if accept_log_ratio(l_new, l_cur, stream) {
            state.seeds.set(s, proposed_seed);
        } else {
            reps.replace(s, prev_seed, prev_output);
        }
    }
    StepInfo {
        sims,
        accepted: None,
        invalid: false,
    }
}

/// Per-replicate seed flips for gradient chains (no cache).
///
/// Each selected replicate is re-simulated at its current seed and at the
/// proposed seed (two simulations), and the swap is accepted by the ratio
/// of single-replicate ε-kernel factors. Expected cost per call: 2·S·γ
/// simulations.
pub fn seed_flip_per_replicate(
    state: &mut SamplerState,
    sim: &dyn Simulator,
    y: &SummaryVector,
    eps: &EpsilonVector,
    gamma: f64,
    stream: &mut Stream,
) -> StepInfo {
    let mut sims = 0u64;
    if gamma == 0.0 {
        return StepInfo {
            sims,
            accepted: None,
            invalid: false,
        };
    }
    let count = state.seeds.count();
    for s in 0..count {
        if !stream.bernoulli(gamma) {
            continue;
        }
        let proposed_seed = stream.next_u64();
        let current = sim.simulate(&state.theta, state.seeds.seeds()[s]);
        let proposed = sim.simulate(&state.theta, proposed_seed);
        sims += 2;
        let l_cur = single_replicate_log_kernel(y, &current, eps);
        let l_new = single_replicate_log_kernel(y, &proposed, eps);
        if accept_log_ratio(l_new, l_cur, stream) {
            state.seeds.set(s, proposed_seed);
        }
    }
    StepInfo {
        sims,
        accepted: None,
        invalid: false,
    }
}
