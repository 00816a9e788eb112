//! Stochastic-gradient samplers: Langevin and Hamiltonian variants with no
//! Metropolis correction.
//!
//! All three kernels consume a noisy estimate ∇Û of the potential gradient
//! and inject calibrated Gaussian noise so that, for small step sizes, the
//! chain's stationary distribution approximates the target:
//!
//! * **SGLD** — one combined position update
//!   θ ← θ + η·N(0, I) − η²·∇Û/2 (a single full leapfrog step with
//!   momentum refreshed every step, written in position form).
//! * **SGHMC** — underdamped dynamics with friction C = c·I + V̂ where V̂
//!   is an online (EMA) estimate of the gradient noise variance, and
//!   injected noise N(0, 2η(C − B̂)) with B̂ = ½ηV̂, so the *extra*
//!   gradient noise is compensated rather than compounded.
//! * **SGNHT** — a thermostat variable ξ replaces the fixed friction,
//!   self-adjusting until the kinetic temperature ρᵀρ/D sits at 1.
//!
//! Non-finite position/momentum updates (a blown-up gradient, say) discard
//! the move and flag the step rather than poisoning the chain.

use alloc::vec::Vec;

use crate::float::FloatExt;
use crate::stream::Stream;
use crate::types::ParameterVector;

use super::{GradUFn, SamplerConfig, SamplerState, StepInfo};

/// One Langevin transition: θ ← θ + η·z − η²·∇Û/2, z ~ N(0, I).
pub fn sgld_step(
    state: &mut SamplerState,
    grad_fn: &mut GradUFn,
    cfg: &SamplerConfig,
    stream: &mut Stream,
) -> StepInfo {
    state.step += 1;
    let est = grad_fn(&state.theta, &state.seeds);
    let eta = cfg.eta;
    let proposed: Vec<f64> = state
        .theta
        .values()
        .iter()
        .zip(&est.grad)
        .map(|(t, g)| t + eta * stream.standard_normal() - eta * eta * g / 2.0)
        .collect();
    let mut invalid = !est.valid;
    match ParameterVector::try_from_update(proposed) {
        Some(t) => state.theta = t,
        None => invalid = true,
    }
    StepInfo {
        sims: est.sims_used,
        accepted: None,
        invalid,
    }
}

/// Friction-based kernel with online gradient-noise compensation. The V̂
/// estimate persists across steps, so the kernel is a struct.
#[derive(Debug, Clone)]
pub struct SghmcKernel {
    ema_mean: Vec<f64>,
    vhat: Vec<f64>,
    /// When false, V̂ is pinned at zero: C = c·I and no noise is
    /// subtracted. Used by dynamics tests that need the frictionless limit
    /// to be exact.
    estimate_noise: bool,
    initialized: bool,
    /// Steps on which some coordinate's injected-noise variance was clamped
    /// at zero to keep C − B̂ positive semidefinite.
    pub clamp_events: u64,
}

impl SghmcKernel {
    pub fn new(dim: usize, estimate_noise: bool) -> Self {
        SghmcKernel {
            ema_mean: alloc::vec![0.0; dim],
            vhat: alloc::vec![0.0; dim],
            estimate_noise,
            initialized: false,
            clamp_events: 0,
        }
    }

    /// Current per-coordinate gradient-variance estimate.
    pub fn vhat(&self) -> &[f64] {
        &self.vhat
    }

    /// One transition: update V̂ from the fresh gradient, then
    /// Δρ = −ηCρ − η∇Û + N(0, 2η(C − B̂)),  θ ← θ + η·ρ_new.
    pub fn step(
        &mut self,
        state: &mut SamplerState,
        grad_fn: &mut GradUFn,
        cfg: &SamplerConfig,
        stream: &mut Stream,
    ) -> StepInfo {
        state.step += 1;
        let est = grad_fn(&state.theta, &state.seeds);
        let mut invalid = !est.valid;

        if self.estimate_noise {
            if !self.initialized {
                // Seed the EMA at the first observation to avoid a long
                // transient from zero.
                self.ema_mean.copy_from_slice(&est.grad);
                self.initialized = true;
            }
            let d = cfg.vhat_decay;
            for (m, &g) in self.ema_mean.iter_mut().zip(&est.grad) {
                *m = d * *m + (1.0 - d) * g;
            }
            for ((v, &m), &g) in self.vhat.iter_mut().zip(&self.ema_mean).zip(&est.grad) {
                let dev = g - m;
                *v = d * *v + (1.0 - d) * dev * dev;
            }
        }

        let eta = cfg.eta;
        let rho = state
            .momentum
            .as_mut()
            .expect("SGHMC requires an initialized momentum");
        let mut clamped = false;
        let mut theta_new = Vec::with_capacity(rho.len());
        for (i, (r, t)) in rho.iter_mut().zip(state.theta.values()).enumerate() {
            let c_i = cfg.friction_c + self.vhat[i];
            let bhat_i = 0.5 * eta * self.vhat[i];
            let mut noise_var = 2.0 * eta * (c_i - bhat_i);
            if noise_var < 0.0 {
                noise_var = 0.0;
                clamped = true;
            }
            let z = stream.standard_normal();
            let delta_rho = -eta * c_i * *r - eta * est.grad[i] + noise_var.sqrt() * z;
            *r += delta_rho;
            theta_new.push(t + eta * *r);
        }
        if clamped {
            self.clamp_events += 1;
        }
        match ParameterVector::try_from_update(theta_new) {
            Some(t) if rho.iter().all(|r| r.is_finite()) => state.theta = t,
            _ => {
                // Discard the move and reset momentum to zero — a blown-up
                // ρ would otherwise keep propelling the chain.
                for r in rho.iter_mut() {
                    *r = 0.0;
                }
                invalid = true;
            }
        }
        StepInfo {
            sims: est.sims_used,
            accepted: None,
            invalid,
        }
    }
}

/// One thermostat transition:
/// ρ ← ρ − η·ξ·ρ − η·∇Û + N(0, 2η·c);  θ ← θ + η·ρ;  ξ ← ξ + η·(ρᵀρ/D − 1).
pub fn sgnht_step(
    state: &mut SamplerState,
    grad_fn: &mut GradUFn,
    cfg: &SamplerConfig,
    stream: &mut Stream,
) -> StepInfo {
    state.step += 1;
    let est = grad_fn(&state.theta, &state.seeds);
    let mut invalid = !est.valid;
    let eta = cfg.eta;
    let noise_sd = (2.0 * eta * cfg.friction_c).sqrt();
    let xi = state
        .thermostat
        .expect("SGNHT requires an initialized thermostat");
    let rho = state
        .momentum
        .as_mut()
        .expect("SGNHT requires an initialized momentum");
    let dim = rho.len() as f64;

    let mut theta_new = Vec::with_capacity(rho.len());
    let mut rho_sq = 0.0;
    for ((r, t), &g) in rho.iter_mut().zip(state.theta.values()).zip(&est.grad) {
        *r = *r - eta * xi * *r - eta * g + noise_sd * stream.standard_normal();
        rho_sq += *r * *r;
        theta_new.push(t + eta * *r);
    }
    match ParameterVector::try_from_update(theta_new) {
        Some(t) if rho_sq.is_finite() => {
            state.theta = t;
            state.thermostat = Some(xi + eta * (rho_sq / dim - 1.0));
        }
        _ => {
            for r in rho.iter_mut() {
                *r = 0.0;
            }
            invalid = true;
        }
    }
    StepInfo {
        sims: est.sims_used,
        accepted: None,
        invalid,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gradients::{GradMethod, GradientEstimate};
    use crate::stream::derive_stream;
    use crate::types::SeedVector;
    use alloc::vec;

    fn exact_gaussian_grad() -> impl FnMut(&ParameterVector, &SeedVector) -> GradientEstimate
    {
        |theta: &ParameterVector, _: &SeedVector| GradientEstimate {
            grad: theta.values().to_vec(),
            sims_used: 0,
            method: GradMethod::Exact,
            valid: true,
        }
    }

    fn fresh_state(dim: usize) -> SamplerState {
        SamplerState::gradient_chain(
            ParameterVector::new(vec![0.5; dim]).unwrap(),
            SeedVector::new(vec![0]).unwrap(),
        )
    }

    #[test]
    fn sgld_with_zero_gradient_is_a_pure_gaussian_walk() {
        let mut zero_grad = |theta: &ParameterVector, _: &SeedVector| GradientEstimate {
            grad: vec![0.0; theta.dim()],
            sims_used: 0,
            method: GradMethod::Exact,
            valid: true,
        };
        let cfg = SamplerConfig {
            eta: 0.1,
            ..SamplerConfig::default()
        };
        let mut state = fresh_state(1);
        let mut stream = derive_stream(21, 1);
        let mut increments = Vec::new();
        let mut prev = state.theta().values()[0];
        for _ in 0..50_000 {
            sgld_step(&mut state, &mut zero_grad, &cfg, &mut stream);
            let cur = state.theta().values()[0];
            increments.push(cur - prev);
            prev = cur;
        }
        let n = increments.len() as f64;
        let mean: f64 = increments.iter().sum::<f64>() / n;
        let var: f64 =
            increments.iter().map(|d| (d - mean) * (d - mean)).sum::<f64>() / (n - 1.0);
        assert!(mean.abs() < 3.0 * 0.1 / n.sqrt(), "drift {mean}");
        assert!((var.sqrt() - 0.1).abs() < 0.002, "increment sd {}", var.sqrt());
    }

    #[test]
    fn sgld_update_matches_the_combined_leapfrog_formula() {
        // Replaying the kernel's noise stream isolates the deterministic
        // part of the update: with ∇Û = θ it must be exactly
        // θ + η·z − η²·θ/2 (the contraction θ(1 − η²/2) plus refresh).
        let cfg = SamplerConfig {
            eta: 0.2,
            ..SamplerConfig::default()
        };
        let mut grad = exact_gaussian_grad();
        let mut state = fresh_state(1);
        let mut stream = derive_stream(33, 1);
        // Replay the same stream to know the noise the kernel will draw.
        let mut replay = derive_stream(33, 1);
        let theta0 = state.theta().values()[0];
        sgld_step(&mut state, &mut grad, &cfg, &mut stream);
        let z = replay.standard_normal();
        let expected = theta0 + cfg.eta * z - cfg.eta * cfg.eta * theta0 / 2.0;
        assert!((state.theta().values()[0] - expected).abs() < 1e-15);
    }

    #[test]
    fn sghmc_without_noise_estimation_reduces_to_fixed_friction() {
        // c = 0 and estimate_noise = false: noiseless symplectic-Euler
        // dynamics on the Gaussian potential; the modified Hamiltonian
        // H̃ = (ρ² + θ² − ηρθ)/2 is conserved exactly.
        let cfg = SamplerConfig {
            eta: 0.05,
            friction_c: 0.0,
            ..SamplerConfig::default()
        };
        let mut grad = exact_gaussian_grad();
        let mut state = fresh_state(1).with_fresh_momentum(&mut derive_stream(1, 2));
        let mut kernel = SghmcKernel::new(1, false);
        let mut stream = derive_stream(2, 2);
        let h = |theta: f64, rho: f64, eta: f64| {
            0.5 * (rho * rho + theta * theta - eta * rho * theta)
        };
        let h0 = h(
            state.theta().values()[0],
            state.momentum().unwrap()[0],
            cfg.eta,
        );
        for _ in 0..5_000 {
            kernel.step(&mut state, &mut grad, &cfg, &mut stream);
            let ht = h(
                state.theta().values()[0],
                state.momentum().unwrap()[0],
                cfg.eta,
            );
            assert!(
                (ht - h0).abs() < 1e-12,
                "modified Hamiltonian drifted: {ht} vs {h0}"
            );
        }
    }

    #[test]
    fn sghmc_momentum_reaches_thermal_variance_under_pure_friction() {
        // ∇Û ≡ 0, c > 0: ρ is an AR(1) with factor (1 − ηc) and injected
        // variance 2ηc, whose stationary variance is 2ηc/(1 − (1−ηc)²) ≈ 1.
        let cfg = SamplerConfig {
            eta: 0.05,
            friction_c: 1.0,
            ..SamplerConfig::default()
        };
        let mut zero_grad = |theta: &ParameterVector, _: &SeedVector| GradientEstimate {
            grad: vec![0.0; theta.dim()],
            sims_used: 0,
            method: GradMethod::Exact,
            valid: true,
        };
        let mut state = fresh_state(1).with_fresh_momentum(&mut derive_stream(3, 2));
        let mut kernel = SghmcKernel::new(1, false);
        let mut stream = derive_stream(4, 2);
        let mut sq = 0.0;
        let n = 200_000;
        for _ in 0..n {
            kernel.step(&mut state, &mut zero_grad, &cfg, &mut stream);
            sq += state.momentum().unwrap()[0].powi(2);
        }
        let var = sq / n as f64;
        let expected = 2.0 * cfg.eta * cfg.friction_c
            / (1.0 - (1.0 - cfg.eta * cfg.friction_c).powi(2));
        assert!(
            (var - expected).abs() < 0.08,
            "momentum variance {var} vs {expected}"
        );
    }

    #[test]
    fn sgnht_thermostat_decreases_linearly_with_still_momentum() {
        // ρ = 0, ∇Û = 0, c = 0 (no injected noise): ξ ← ξ − η each step.
        let cfg = SamplerConfig {
            eta: 0.01,
            friction_c: 0.0,
            ..SamplerConfig::default()
        };
        let mut zero_grad = |theta: &ParameterVector, _: &SeedVector| GradientEstimate {
            grad: vec![0.0; theta.dim()],
            sims_used: 0,
            method: GradMethod::Exact,
            valid: true,
        };
        let mut state = fresh_state(2).with_thermostat(3.0);
        state.momentum = Some(vec![0.0, 0.0]);
        let mut stream = derive_stream(5, 2);
        for k in 1..=100 {
            sgnht_step(&mut state, &mut zero_grad, &cfg, &mut stream);
            let expected = 3.0 - cfg.eta * k as f64;
            assert!((state.thermostat().unwrap() - expected).abs() < 1e-12);
        }
    }

    #[test]
    fn non_finite_gradient_updates_are_discarded_and_flagged() {
        let mut bad_grad = |theta: &ParameterVector, _: &SeedVector| GradientEstimate {
            grad: vec![f64::INFINITY; theta.dim()],
            sims_used: 7,
            method: GradMethod::Exact,
            valid: true,
        };
        let cfg = SamplerConfig::default();
        let mut state = fresh_state(1);
        let before = state.theta().clone();
        let mut stream = derive_stream(6, 2);
        let info = sgld_step(&mut state, &mut bad_grad, &cfg, &mut stream);
        assert!(info.invalid);
        assert_eq!(info.sims, 7);
        assert_eq!(state.theta(), &before);

        let mut state2 = fresh_state(1)
            .with_fresh_momentum(&mut derive_stream(7, 2))
            .with_thermostat(1.0);
        let info2 = sgnht_step(&mut state2, &mut bad_grad, &cfg, &mut stream);
        assert!(info2.invalid);
        assert_eq!(state2.theta(), &before);
        assert_eq!(state2.momentum().unwrap(), &[0.0]);
    }
}
