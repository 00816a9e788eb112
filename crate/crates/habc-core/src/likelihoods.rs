//! ABC log-likelihood models over simulation replicates.
//!
//! Two estimators of the intractable likelihood are provided, both consuming
//! a [`ReplicateSet`] of S simulator outputs at a fixed parameter:
//!
//! * **ε-kernel**: a Monte Carlo mixture, log[(1/S) Σ_s Π_j N(y_j | x_j⁽ˢ⁾, ε_j²)],
//!   evaluated with log-sum-exp. Degenerate replicates contribute −∞ mixture
//!   terms, i.e. they drop out of the sum while the 1/S normalization keeps
//!   the full replicate count.
//! * **Synthetic likelihood**: fit a diagonal Gaussian to the replicates
//!   (per-statistic mean and unbiased variance) and convolve it with the
//!   ε-kernel, giving Σ_j log N(y_j | μ_j, σ_j² + ε_j²). Any degenerate
//!   replicate poisons the moments, so the likelihood is −∞ and a Metropolis
//!   step rejects.
//!
//! −∞ is a signal, not an error: it means "this parameter/seed combination
//! explains the data infinitely badly", which samplers handle by rejecting.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::float::{FloatExt, LN_2PI};
use crate::simulators::Simulator;
use crate::types::{EpsilonVector, ParameterVector, SeedVector, SummaryVector};

/// S simulator outputs at one parameter, tagged with their seeds.
///
/// The provenance invariant — `outputs[s] == simulate(theta, seeds[s])` —
/// holds by construction when built through [`ReplicateSet::simulate_all`],
/// and is what makes persistent-seed Metropolis kernels exact: the cached
/// outputs can stand in for fresh simulations at the same (θ, ω).
#[derive(Debug, Clone)]
pub struct ReplicateSet {
    outputs: Vec<SummaryVector>,
    theta: ParameterVector,
    seeds: SeedVector,
}

impl ReplicateSet {
    /// Run the simulator once per seed and collect the outputs.
    pub fn simulate_all(
        sim: &dyn Simulator,
        theta: &ParameterVector,
        seeds: &SeedVector,
    ) -> Result<Self> {
        if theta.dim() != sim.spec().param_dim {
            return Err(Error::ShapeMismatch {
                expected: sim.spec().param_dim,
                got: theta.dim(),
            });
        }
        let outputs = seeds
            .seeds()
            .iter()
            .map(|&seed| sim.simulate(theta, seed))
            .collect();
        Ok(ReplicateSet {
            outputs,
            theta: theta.clone(),
            seeds: seeds.clone(),
        })
    }

    /// Rebuild a set from parts; used by kernels that re-simulate a single
    /// replicate (seed flips) and splice it into an existing cache.
    pub fn from_parts(
        outputs: Vec<SummaryVector>,
        theta: ParameterVector,
        seeds: SeedVector,
    ) -> Result<Self> {
        if outputs.len() != seeds.count() {
            return Err(Error::ShapeMismatch {
                expected: seeds.count(),
                got: outputs.len(),
            });
        }
        if outputs.is_empty() {
            return Err(Error::TooFewReplicates { needed: 1, got: 0 });
        }
        Ok(ReplicateSet { outputs, theta, seeds })
    }

    pub fn len(&self) -> usize {
        self.outputs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.outputs.is_empty()
    }

    pub fn outputs(&self) -> &[SummaryVector] {
        &self.outputs
    }

    pub fn theta(&self) -> &ParameterVector {
        &self.theta
    }

    pub fn seeds(&self) -> &SeedVector {
        &self.seeds
    }

    /// Number of replicates whose statistics contain non-finite entries.
    pub fn degenerate_count(&self) -> usize {
        self.outputs.iter().filter(|o| o.is_degenerate()).count()
    }

    /// Replace replicate `index` (output and seed together, preserving
    /// provenance). Panics on out-of-range index, which is a programming
    /// error in kernel code rather than a runtime condition.
    pub(crate) fn replace(&mut self, index: usize, seed: u64, output: SummaryVector) {
        self.seeds.set(index, seed);
        self.outputs[index] = output;
    }
}

/// Which likelihood estimator a sampler should use.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LikelihoodKind {
    KernelEps,
    Synthetic,
}

/// Log of a product of univariate normal densities, Σ_j log N(y_j | x_j, ε_j²).
/// −∞ if any statistic is non-finite.
fn log_kernel_term(y: &[f64], x: &[f64], eps: &[f64]) -> f64 {
    let mut total = 0.0;
    for ((&yj, &xj), &ej) in y.iter().zip(x).zip(eps) {
        if !xj.is_finite() {
            return f64::NEG_INFINITY;
        }
        let z = (yj - xj) / ej;
        total += -ej.ln() - 0.5 * LN_2PI - 0.5 * z * z;
    }
    total
}

/// Monte Carlo mixture likelihood: log[(1/S) Σ_s Π_j N(y_j | x_j⁽ˢ⁾, ε_j²)].
///
/// Computed via log-sum-exp. Degenerate replicates contribute −∞ terms; if
/// every replicate is degenerate the result is −∞ (a rejection signal, not
/// an error).
pub fn kernel_eps_loglik(
    reps: &ReplicateSet,
    y: &SummaryVector,
    eps: &EpsilonVector,
) -> Result<f64> {
    check_dims(reps, y, eps)?;
    let mut terms = Vec::with_capacity(reps.len());
    let mut max = f64::NEG_INFINITY;
    for out in reps.outputs() {
        let t = log_kernel_term(y.stats(), out.stats(), eps.values());
        if t > max {
            max = t;
        }
        terms.push(t);
    }
    if max == f64::NEG_INFINITY {
        return Ok(f64::NEG_INFINITY);
    }
    let sum: f64 = terms
        .iter()
        .map(|&t| if t == f64::NEG_INFINITY { 0.0 } else { (t - max).exp() })
        .sum();
    Ok(max + sum.ln() - (reps.len() as f64).ln())
}

/// Per-statistic sample mean and unbiased (1/(S−1)) sample variance of the
/// replicate statistics.
#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticMoments {
    mu: Vec<f64>,
    sigma2: Vec<f64>,
}

impl SyntheticMoments {
    pub fn mu(&self) -> &[f64] {
        &self.mu
    }

    pub fn sigma2(&self) -> &[f64] {
        &self.sigma2
    }
}

/// Fit the diagonal Gaussian moments used by the synthetic likelihood.
///
/// Requires S ≥ 2 (the variance estimator needs it) and rejects degenerate
/// replicates: a non-finite statistic would silently poison both moments.
pub fn synthetic_moments(reps: &ReplicateSet) -> Result<SyntheticMoments> {
    if reps.len() < 2 {
        return Err(Error::TooFewReplicates {
            needed: 2,
            got: reps.len(),
        });
    }
    if reps.degenerate_count() > 0 {
        return Err(Error::DegenerateReplicates);
    }
    let s = reps.len() as f64;
    let dim = reps.outputs()[0].dim();
    // Two-pass estimator: mean first, then squared deviations, for accuracy.
    let mut mu = alloc::vec![0.0; dim];
    for out in reps.outputs() {
        for (m, &x) in mu.iter_mut().zip(out.stats()) {
            *m += x;
        }
    }
    for m in mu.iter_mut() {
        *m /= s;
    }
    let mut sigma2 = alloc::vec![0.0; dim];
    for out in reps.outputs() {
        for ((v, &m), &x) in sigma2.iter_mut().zip(&mu).zip(out.stats()) {
            let d = x - m;
            *v += d * d;
        }
    }
    for v in sigma2.iter_mut() {
        *v /= s - 1.0;
    }
    Ok(SyntheticMoments { mu, sigma2 })
}

/// Synthetic log-likelihood: the replicate Gaussian convolved with the
/// ε-kernel, Σ_j [−½ log(2π(σ_j² + ε_j²)) − (y_j − μ_j)²/(2(σ_j² + ε_j²))].
pub fn synthetic_loglik(
    moments: &SyntheticMoments,
    y: &SummaryVector,
    eps: &EpsilonVector,
) -> Result<f64> {
    if moments.mu.len() != y.dim() || eps.dim() != y.dim() {
        return Err(Error::ShapeMismatch {
            expected: y.dim(),
            got: if moments.mu.len() != y.dim() {
                moments.mu.len()
            } else {
                eps.dim()
            },
        });
    }
    let mut total = 0.0;
    for ((&yj, (&mj, &s2j)), &ej) in y
        .stats()
        .iter()
        .zip(moments.mu.iter().zip(&moments.sigma2))
        .zip(eps.values())
    {
        let var = s2j + ej * ej;
        let d = yj - mj;
        total += -0.5 * (LN_2PI + var.ln()) - d * d / (2.0 * var);
    }
    Ok(total)
}

/// Evaluate the chosen likelihood on a replicate set. For the synthetic
/// variant, degenerate replicates yield −∞ rather than an error, matching
/// the ε-kernel's rejection-signal convention so samplers can treat both
/// uniformly.
pub fn abc_loglik(
    kind: LikelihoodKind,
    reps: &ReplicateSet,
    y: &SummaryVector,
    eps: &EpsilonVector,
) -> Result<f64> {
    match kind {
        LikelihoodKind::KernelEps => kernel_eps_loglik(reps, y, eps),
        LikelihoodKind::Synthetic => {
            if reps.degenerate_count() > 0 {
                return Ok(f64::NEG_INFINITY);
            }
            let moments = synthetic_moments(reps)?;
            synthetic_loglik(&moments, y, eps)
        }
    }
}

fn check_dims(reps: &ReplicateSet, y: &SummaryVector, eps: &EpsilonVector) -> Result<()> {
    if reps.is_empty() {
        return Err(Error::TooFewReplicates { needed: 1, got: 0 });
    }
    let dim = y.dim();
    if eps.dim() != dim {
        return Err(Error::ShapeMismatch {
            expected: dim,
            got: eps.dim(),
        });
    }
    for out in reps.outputs() {
        if out.dim() != dim {
            return Err(Error::ShapeMismatch {
                expected: dim,
                got: out.dim(),
            });
        }
    }
    Ok(())
}
