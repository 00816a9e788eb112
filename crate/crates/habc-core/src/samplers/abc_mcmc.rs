//! Pseudo-marginal Metropolis–Hastings over (θ, replicates).
//!
//! The intractable likelihood is replaced by its Monte Carlo estimate over
//! S replicates, and the *estimate itself* rides along in the chain state:
//! on rejection the cached replicates are kept, never re-scored with fresh
//! noise. That strictness is what makes the chain exactly invariant for the
//! extended target π(θ)·q(ω)·L̂(θ, ω) whose θ-marginal is the ABC
//! posterior.

use crate::float::FloatExt;
use crate::likelihoods::{abc_loglik, LikelihoodKind, ReplicateSet};
use crate::prior::Prior;
use crate::simulators::Simulator;
use crate::stream::{draw_seed_vector, Stream};
use crate::types::{EpsilonVector, ParameterVector, SummaryVector};

use super::{SamplerState, StepInfo};

/// One random-walk Metropolis transition.
///
/// Proposes θ′ = θ + proposal_std ⊙ N(0, I), simulates a full replicate set
/// at θ′ — reusing the state's seeds when `persistent_seeds`, fresh seeds
/// otherwise — and accepts by the usual ratio of prior × likelihood. A zero
/// prior at θ′ rejects without burning simulations.
#[allow(clippy::too_many_arguments)]
pub fn abc_mcmc_step(
    state: &mut SamplerState,
    sim: &dyn Simulator,
    y: &SummaryVector,
    eps: &EpsilonVector,
    prior: &Prior,
    proposal_std: &[f64],
    likelihood: LikelihoodKind,
    persistent_seeds: bool,
    stream: &mut Stream,
) -> StepInfo {
    state.step += 1;
    let dim = state.theta.dim();
    debug_assert_eq!(proposal_std.len(), dim);

    let proposed: alloc::vec::Vec<f64> = state
        .theta
        .values()
        .iter()
        .zip(proposal_std)
        .map(|(t, s)| t + s * stream.standard_normal())
        .collect();
    let theta_new = match ParameterVector::try_from_update(proposed) {
        Some(t) => t,
        None => {
            return StepInfo {
                sims: 0,
                accepted: Some(false),
                invalid: true,
            }
        }
    };

    let lp_new = prior.log_pdf(&theta_new).expect("dim checked");
    if lp_new == f64::NEG_INFINITY {
        return StepInfo {
            sims: 0,
            accepted: Some(false),
            invalid: false,
        };
    }

    let seeds_new = if persistent_seeds {
        state.seeds.clone()
    } else {
        draw_seed_vector(state.seeds.count(), stream)
    };
    let reps_new = ReplicateSet::simulate_all(sim, &theta_new, &seeds_new)
        .expect("state dimensions are consistent");
    let sims = seeds_new.count() as u64;

    let reps_cur = state
        .replicates
        .as_ref()
        .expect("metropolis chains carry a replicate cache");
    let l_cur = abc_loglik(likelihood, reps_cur, y, eps).expect("cached dims consistent");
    let l_new = abc_loglik(likelihood, &reps_new, y, eps).expect("dims consistent");
    let lp_cur = prior.log_pdf(&state.theta).expect("dim checked");

    // Symmetric proposal: log α = [log π(θ′) + L′] − [log π(θ) + L].
    // A −∞ current likelihood (all-degenerate cache) is escaped whenever
    // the proposal scores anything finite.
    let accept = if l_new == f64::NEG_INFINITY {
        false
    } else if l_cur == f64::NEG_INFINITY {
        true
    } else {
        let log_alpha = (lp_new + l_new) - (lp_cur + l_cur);
        log_alpha >= 0.0 || stream.uniform() < log_alpha.exp()
    };

    if accept {
        state.theta = theta_new;
        state.seeds = seeds_new;
        state.replicates = Some(reps_new);
    }
    StepInfo {
        sims,
        accepted: Some(accept),
        invalid: false,
    }
}
