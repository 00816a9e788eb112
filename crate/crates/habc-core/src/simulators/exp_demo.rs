//! Exponential-mean demo: the one-dimensional conjugate benchmark.
//!
//! The observation y is the average of N draws from an exponential
//! distribution with rate θ (mean 1/θ). With a Gamma(α, β) prior on the
//! rate, the posterior after observing the average y of N draws is exactly
//! Gamma(α + N, β + N·y) — which is what makes this model a ground-truth
//! benchmark: sampler output can be scored against an analytic posterior.
//!
//! The simulator realizes x = f(θ, ω) = (1/θ)·(mean of N unit exponentials
//! drawn from seed ω), so that for a fixed seed the output is a smooth
//! (here: exactly scale-family) function of θ, the property common-random-
//! number gradient estimators rely on. Across seeds, x ~ Gamma(N, N·θ).

use crate::float::{FloatExt, LN_2PI};
use crate::prior::{Marginal, Prior};
use crate::special::GammaDist;
use crate::stream::derive_stream;
use crate::types::{ParameterVector, SimulatorSpec, SummaryVector};

/// Average-of-N-exponentials simulator with a Gamma prior on the rate.
#[derive(Debug, Clone)]
pub struct ExpDemoSimulator {
    spec: SimulatorSpec,
    n: usize,
}

impl ExpDemoSimulator {
    /// `n` is the number of exponential draws averaged per simulation;
    /// (α, β) are the Gamma prior hyperparameters on the rate θ.
    pub fn new(n: usize, alpha: f64, beta: f64) -> crate::error::Result<Self> {
        if n == 0 {
            return Err(crate::error::Error::InvalidArgument(
                "exp demo needs at least one draw per simulation",
            ));
        }
        let prior = Prior::new(alloc::vec![Marginal::Gamma {
            shape: alpha,
            rate: beta,
        }])?;
        Ok(ExpDemoSimulator {
            spec: SimulatorSpec {
                name: alloc::string::String::from("exp-demo"),
                param_dim: 1,
                stat_dim: 1,
                prior,
            },
            n,
        })
    }

    /// The benchmark defaults: N = 20 draws.
    pub fn standard(alpha: f64, beta: f64) -> Self {
        ExpDemoSimulator::new(20, alpha, beta).expect("valid defaults")
    }

    pub fn n(&self) -> usize {
        self.n
    }
}

impl super::Simulator for ExpDemoSimulator {
    fn spec(&self) -> &SimulatorSpec {
        &self.spec
    }

    fn simulate(&self, theta: &ParameterVector, seed: u64) -> SummaryVector {
        let rate = theta.values()[0];
        if !(rate.is_finite() && rate > 0.0) {
            return SummaryVector::degenerate(1);
        }
        let mut stream = derive_stream(seed, 0);
        let mut sum = 0.0;
        for _ in 0..self.n {
            sum += stream.unit_exponential();
        }
        SummaryVector::new(alloc::vec![sum / (self.n as f64 * rate)])
    }
}

/// Exact posterior over the rate after observing the average `y` of `n`
/// exponential draws, under a Gamma(α, β) prior: Gamma(α + n, β + n·y).
/// With n = 0 this is the prior unchanged.
pub fn exp_demo_true_posterior(
    alpha: f64,
    beta: f64,
    y: f64,
    n: usize,
) -> crate::error::Result<GammaDist> {
    if !(y > 0.0) && n > 0 {
        return Err(crate::error::Error::InvalidArgument(
            "observed exponential average must be positive",
        ));
    }
    GammaDist::new(alpha + n as f64, beta + n as f64 * y)
}

/// Infinite-replicate synthetic-likelihood gradient reference at θ.
///
/// As the replicate count grows, the synthetic likelihood converges to
/// N(y | μ(θ), σ²(θ) + ε²) where μ, σ² are the mean and variance of the
/// replicate law x ~ Gamma(n, n·θ). This routine computes ∇U(θ) against
/// that limit *without trusting any closed form*: the moments come from
/// Simpson quadrature over the replicate density, and the θ-derivative of
/// the resulting log-likelihood from a central finite difference. It serves
/// as the independent reference value gradient estimators are compared to.
pub fn sl_gradient_reference(
    theta: f64,
    y: f64,
    eps: f64,
    n: usize,
    alpha: f64,
    beta: f64,
) -> f64 {
    let loglik = |t: f64| -> f64 {
        let dist = GammaDist::new(n as f64, n as f64 * t).expect("valid replicate law");
        // Quadrature moments of the replicate law on [0, mean + 14 sd].
        let hi = dist.mean() + 14.0 * dist.var().sqrt();
        let steps = 4000usize;
        let h = hi / steps as f64;
        let mut m0 = 0.0;
        let mut m1 = 0.0;
        let mut m2 = 0.0;
        for i in 0..=steps {
            let x = i as f64 * h;
            let w = if i == 0 || i == steps {
                1.0
            } else if i % 2 == 1 {
                4.0
            } else {
                2.0
            };
            let p = if x > 0.0 { dist.log_pdf(x).exp() } else { 0.0 };
            m0 += w * p;
            m1 += w * p * x;
            m2 += w * p * x * x;
        }
        let (m0, m1, m2) = (m0 * h / 3.0, m1 * h / 3.0, m2 * h / 3.0);
        let mu = m1 / m0;
        let sigma2 = m2 / m0 - mu * mu;
        let var = sigma2 + eps * eps;
        let d = y - mu;
        -0.5 * (LN_2PI + var.ln()) - d * d / (2.0 * var)
    };
    let h = 1e-5 * theta;
    let dl = (loglik(theta + h) - loglik(theta - h)) / (2.0 * h);
    let dprior = (alpha - 1.0) / theta - beta;
    -(dl + dprior)
}
