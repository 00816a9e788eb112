//! Exact-gradient Hamiltonian Monte Carlo, used only as a baseline.
//!
//! The stochastic-gradient kernels in this crate skip the accept/reject
//! correction; this module provides the classical corrected sampler for
//! targets whose density and gradient are available in closed form, so
//! bias of the uncorrected kernels can be measured against it.

use alloc::vec;
use alloc::vec::Vec;

use crate::float::FloatExt;
use crate::stream::Stream;
use crate::types::ParameterVector;

use super::{SamplerConfig, SamplerState, StepInfo};

/// A target distribution with analytic log-density and gradient.
pub trait AnalyticTarget {
    fn dim(&self) -> usize;
    /// Log-density up to an additive constant.
    fn log_pdf(&self, theta: &[f64]) -> f64;
    fn grad_log_pdf(&self, theta: &[f64]) -> Vec<f64>;
}

/// Independent standard normal coordinates; the canonical known target.
pub struct StandardGaussian {
    dim: usize,
}

impl StandardGaussian {
    pub fn new(dim: usize) -> Self {
        Self { dim }
    }
}

impl AnalyticTarget for StandardGaussian {
    fn dim(&self) -> usize {
        self.dim
    }
    fn log_pdf(&self, theta: &[f64]) -> f64 {
        -0.5 * theta.iter().map(|t| t * t).sum::<f64>()
    }
    fn grad_log_pdf(&self, theta: &[f64]) -> Vec<f64> {
        theta.iter().map(|t| -t).collect()
    }
}

/// Integrate Hamiltonian dynamics for `steps` leapfrog steps in place.
///
/// Potential is U = −log_pdf; the kinetic term uses the diagonal mass
/// matrix `mass` (θ̇ = ρ/m). The integrator is time-reversible: negating
/// `rho` and integrating the same number of steps retraces the path.
pub fn leapfrog(
    theta: &mut [f64],
    rho: &mut [f64],
    target: &dyn AnalyticTarget,
    eta: f64,
    mass: &[f64],
    steps: usize,
) {
    for _ in 0..steps {
        let grad = target.grad_log_pdf(theta);
        for (r, g) in rho.iter_mut().zip(&grad) {
            *r += 0.5 * eta * g;
        }
        for ((t, r), m) in theta.iter_mut().zip(rho.iter()).zip(mass) {
            *t += eta * r / m;
        }
        let grad = target.grad_log_pdf(theta);
        for (r, g) in rho.iter_mut().zip(&grad) {
            *r += 0.5 * eta * g;
        }
    }
}

fn hamiltonian(target: &dyn AnalyticTarget, theta: &[f64], rho: &[f64], mass: &[f64]) -> f64 {
    let kinetic: f64 = rho.iter().zip(mass).map(|(r, m)| 0.5 * r * r / m).sum();
    -target.log_pdf(theta) + kinetic
}

/// One HMC transition: full momentum refresh ρ ~ N(0, M), `leapfrog_steps`
/// integrator steps of size `cfg.eta`, then a Metropolis accept/reject on
/// the Hamiltonian H = U + ½ρᵀM⁻¹ρ.
///
/// With `leapfrog_steps = 0` the move is a pure momentum refresh and θ is
/// unchanged.
pub fn hmc_reference_step(
    state: &mut SamplerState,
    target: &dyn AnalyticTarget,
    cfg: &SamplerConfig,
    leapfrog_steps: usize,
    stream: &mut Stream,
) -> StepInfo {
    let dim = state.theta.dim();
    let unit_mass = vec![1.0; dim];
    let mass: &[f64] = cfg.mass.as_deref().unwrap_or(&unit_mass);

    let mut rho: Vec<f64> = mass
        .iter()
        .map(|m| m.sqrt() * stream.standard_normal())
        .collect();
    state.momentum = Some(rho.clone());

    if leapfrog_steps == 0 {
        state.step += 1;
        return StepInfo {
            sims: 0,
            accepted: Some(true),
            invalid: false,
        };
    }

    let mut proposal: Vec<f64> = state.theta.values().to_vec();
    let h_start = hamiltonian(target, &proposal, &rho, mass);
    leapfrog(&mut proposal, &mut rho, target, cfg.eta, mass, leapfrog_steps);
    let h_end = hamiltonian(target, &proposal, &rho, mass);

    let accepted = if !h_end.is_finite() {
        false
    } else {
        let log_alpha = h_start - h_end;
        log_alpha >= 0.0 || stream.uniform() < log_alpha.exp()
    };
    if accepted {
        if let Some(new_theta) = ParameterVector::try_from_update(proposal) {
            state.theta = new_theta;
            state.momentum = Some(rho);
        }
    }
    state.step += 1;
    StepInfo {
        sims: 0,
        accepted: Some(accepted),
        invalid: false,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stream::derive_stream;
    use crate::types::{ParameterVector, SeedVector};

    #[test]
    fn zero_leapfrog_steps_only_refreshes_momentum() {
        let target = StandardGaussian::new(3);
        let mut state = SamplerState::gradient_chain(
            ParameterVector::new(vec![0.3, -0.7, 1.1]).unwrap(),
            SeedVector::new(vec![1]).unwrap(),
        );
        let cfg = SamplerConfig::default();
        let mut stream = derive_stream(10, 1);
        let info = hmc_reference_step(&mut state, &target, &cfg, 0, &mut stream);
        assert_eq!(state.theta().values(), &[0.3, -0.7, 1.1]);
        assert!(state.momentum().is_some());
        assert_eq!(info.accepted, Some(true));
        assert_eq!(info.sims, 0);
    }

    #[test]
    fn leapfrog_is_reversible_to_1e_10() {
        let target = StandardGaussian::new(2);
        let mass = [1.0, 2.5];
        let start = [0.4, -1.3];
        let mut theta = start;
        let mut rho = [0.9, 0.2];
        leapfrog(&mut theta, &mut rho, &target, 0.1, &mass, 25);
        for r in rho.iter_mut() {
            *r = -*r;
        }
        leapfrog(&mut theta, &mut rho, &target, 0.1, &mass, 25);
        for (t, s) in theta.iter().zip(&start) {
            assert!(
                (t - s).abs() < 1e-10,
                "forward-backward integration drifted: {theta:?} vs {start:?}"
            );
        }
    }

    #[test]
    fn gaussian_target_high_acceptance_and_correct_variance() {
        let target = StandardGaussian::new(1);
        let mut state = SamplerState::gradient_chain(
            ParameterVector::new(vec![1.5]).unwrap(),
            SeedVector::new(vec![1]).unwrap(),
        );
        let cfg = SamplerConfig {
            eta: 0.1,
            ..SamplerConfig::default()
        };
        let mut stream = derive_stream(11, 1);
        let total = 100_000usize;
        let mut accepted = 0usize;
        let mut sum = 0.0;
        let mut sum_sq = 0.0;
        for _ in 0..total {
            let info = hmc_reference_step(&mut state, &target, &cfg, 10, &mut stream);
            if info.accepted == Some(true) {
                accepted += 1;
            }
            let t = state.theta().values()[0];
            sum += t;
            sum_sq += t * t;
        }
        let acc_rate = accepted as f64 / total as f64;
        let mean = sum / total as f64;
        let var = sum_sq / total as f64 - mean * mean;
        assert!(acc_rate > 0.95, "acceptance rate {acc_rate}");
        assert!(
            (0.95..=1.05).contains(&var),
            "sample variance {var} outside [0.95, 1.05]"
        );
    }
}
