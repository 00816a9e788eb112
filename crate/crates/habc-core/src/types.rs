//! Core domain types shared by simulators, likelihoods, gradients, and
//! samplers.

use alloc::string::String;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::prior::Prior;

/// A point in parameter space. Entries are always finite.
#[derive(Debug, Clone, PartialEq)]
pub struct ParameterVector {
    values: Vec<f64>,
}

impl ParameterVector {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidArgument("parameter vector must be non-empty"));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument("parameter entries must be finite"));
        }
        Ok(ParameterVector { values })
    }

    pub fn dim(&self) -> usize {
        self.values.len()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Returns a copy shifted by `delta[i] * scale` in every coordinate.
    /// The result may land outside a simulator's domain; simulators signal
    /// that through degenerate outputs rather than errors.
    pub(crate) fn shifted(&self, delta: &[f64], scale: f64) -> ParameterVector {
        let values = self
            .values
            .iter()
            .zip(delta)
            .map(|(v, d)| v + d * scale)
            .collect();
        ParameterVector { values }
    }

    /// Like `new`, but for internal callers that may produce non-finite
    /// coordinates (e.g. an unstable sampler update). Non-finite entries are
    /// rejected by `new`; this constructor clamps them back to the last
    /// finite state instead, returning `None` to let the kernel flag it.
    pub fn try_from_update(values: Vec<f64>) -> Option<ParameterVector> {
        if values.iter().all(|v| v.is_finite()) {
            Some(ParameterVector { values })
        } else {
            None
        }
    }
}

/// The per-replicate random seeds carried in a Markov chain's state.
#[derive(Debug, Clone, PartialEq)]
pub struct SeedVector {
    seeds: Vec<u64>,
}

impl SeedVector {
    pub fn new(seeds: Vec<u64>) -> Result<Self> {
        if seeds.is_empty() {
            return Err(Error::InvalidArgument("seed vector must hold at least one seed"));
        }
        Ok(SeedVector { seeds })
    }

    pub fn count(&self) -> usize {
        self.seeds.len()
    }

    pub fn seeds(&self) -> &[u64] {
        &self.seeds
    }

    pub(crate) fn set(&mut self, index: usize, seed: u64) {
        self.seeds[index] = seed;
    }
}

/// A simulator output: the vector of summary statistics for one replicate.
///
/// Out-of-domain parameters and numerical blow-ups inside a simulator are
/// reported by producing a *degenerate* vector (any non-finite entry) rather
/// than an error, so that likelihoods can map them to log-density −∞ and
/// samplers stay total.
#[derive(Debug, Clone, PartialEq)]
pub struct SummaryVector {
    stats: Vec<f64>,
}

impl SummaryVector {
    pub fn new(stats: Vec<f64>) -> Self {
        SummaryVector { stats }
    }

    /// An all-NaN vector of dimension `dim`, the canonical degenerate output.
    pub fn degenerate(dim: usize) -> Self {
        SummaryVector {
            stats: alloc::vec![f64::NAN; dim],
        }
    }

    pub fn dim(&self) -> usize {
        self.stats.len()
    }

    pub fn stats(&self) -> &[f64] {
        &self.stats
    }

    pub fn is_degenerate(&self) -> bool {
        self.stats.iter().any(|v| !v.is_finite())
    }
}

/// Kernel bandwidths ε_j, one per summary statistic. Strictly positive.
#[derive(Debug, Clone, PartialEq)]
pub struct EpsilonVector {
    eps: Vec<f64>,
}

impl EpsilonVector {
    pub fn new(eps: Vec<f64>) -> Result<Self> {
        if eps.is_empty() {
            return Err(Error::InvalidArgument("epsilon vector must be non-empty"));
        }
        if eps.iter().any(|e| !(e.is_finite() && *e > 0.0)) {
            return Err(Error::InvalidArgument("epsilon entries must be positive and finite"));
        }
        Ok(EpsilonVector { eps })
    }

    pub fn dim(&self) -> usize {
        self.eps.len()
    }

    pub fn values(&self) -> &[f64] {
        &self.eps
    }
}

/// Static description of a simulator-defined inference problem.
#[derive(Debug, Clone)]
pub struct SimulatorSpec {
    pub name: String,
    /// Dimension of θ.
    pub param_dim: usize,
    /// Dimension of the summary-statistic vector.
    pub stat_dim: usize,
    /// The problem's prior over θ.
    pub prior: Prior,
}
