//! Chain driver: advances one sampler state through a step schedule,
//! optionally interleaving seed flips, and records a thinned trace plus
//! cost and health counters.
//!
//! A chain is strictly single-threaded; determinism comes from the step
//! closures owning their own random streams. Running the same closures
//! with the same streams twice yields bit-identical traces.

use alloc::vec::Vec;

use super::{SamplerState, StepInfo};

/// Everything a finished chain reports.
pub struct ChainRun {
    /// Thinned positions, recorded after every `thinning`-th step.
    pub samples: Vec<Vec<f64>>,
    /// Total simulator calls, including those spent on seed flips.
    pub sim_calls: u64,
    /// Simulator calls spent on seed flips only.
    pub flip_sims: u64,
    /// Steps whose gradient or proposal was unusable.
    pub invalid_steps: u64,
    /// Accepted moves among steps that made an accept/reject decision.
    pub accept_count: u64,
    /// Steps that made an accept/reject decision at all.
    pub accept_decisions: u64,
    /// Running mean of ρᵀρ/D over all steps, when the kernel carries momentum.
    pub avg_momentum_sq: Option<f64>,
    /// Number of main steps taken.
    pub steps: u64,
    /// State after the last step (holds final seeds, momentum, thermostat).
    pub final_state: SamplerState,
}

impl ChainRun {
    /// Fraction of accept/reject decisions that accepted, if any were made.
    pub fn acceptance_rate(&self) -> Option<f64> {
        if self.accept_decisions == 0 {
            None
        } else {
            Some(self.accept_count as f64 / self.accept_decisions as f64)
        }
    }
}

/// Advance `state` for `num_steps` main steps, running `flip_step` after
/// each main step when provided, and record θ every `thinning` steps.
///
/// `thinning` of 0 is treated as 1 (record every step). Step closures own
/// their randomness; this function adds none.
pub fn run_chain(
    mut state: SamplerState,
    main_step: &mut dyn FnMut(&mut SamplerState) -> StepInfo,
    mut flip_step: Option<&mut dyn FnMut(&mut SamplerState) -> StepInfo>,
    num_steps: u64,
    thinning: u64,
) -> ChainRun {
    let thinning = thinning.max(1);
    let mut samples = Vec::new();
    let mut sim_calls = 0u64;
    let mut flip_sims = 0u64;
    let mut invalid_steps = 0u64;
    let mut accept_count = 0u64;
    let mut accept_decisions = 0u64;
    let mut momentum_sq_sum = 0.0;
    let mut momentum_sq_n = 0u64;

    for i in 0..num_steps {
        let info = main_step(&mut state);
        sim_calls += info.sims;
        if info.invalid {
            invalid_steps += 1;
        }
        if let Some(acc) = info.accepted {
            accept_decisions += 1;
            if acc {
                accept_count += 1;
            }
        }
        if let Some(flip) = flip_step.as_deref_mut() {
            let finfo = flip(&mut state);
            sim_calls += finfo.sims;
            flip_sims += finfo.sims;
        }
        if let Some(rho) = state.momentum() {
            let d = rho.len().max(1) as f64;
            momentum_sq_sum += rho.iter().map(|r| r * r).sum::<f64>() / d;
            momentum_sq_n += 1;
        }
        if (i + 1) % thinning == 0 {
            samples.push(state.theta().values().to_vec());
        }
    }

    ChainRun {
        samples,
        sim_calls,
        flip_sims,
        invalid_steps,
        accept_count,
        accept_decisions,
        avg_momentum_sq: if momentum_sq_n > 0 {
            Some(momentum_sq_sum / momentum_sq_n as f64)
        } else {
            None
        },
        steps: num_steps,
        final_state: state,
    }
}
