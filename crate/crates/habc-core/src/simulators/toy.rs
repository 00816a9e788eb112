//! A tiny lookup-table simulator whose posterior is exactly enumerable.
//!
//! The parameter is one continuous coordinate mapped onto 6 buckets of
//! width 0.5 starting at 0 (clamped at both ends), and the seed is mapped
//! onto 8 equivalence classes by `seed % 8` — exactly uniform, since 2⁶⁴ is
//! divisible by 8. The output is a fixed table entry indexed by (bucket,
//! seed class). With so small a joint space, the stationary distribution of
//! any Markov kernel over (θ, ω) can be computed by brute-force summation,
//! which is what makes this simulator the ground truth for the kernel
//! invariance tests: chain occupancy must match enumeration.

use crate::float::FloatExt;
use crate::prior::{Marginal, Prior};
use crate::types::{ParameterVector, SimulatorSpec, SummaryVector};

/// Bucket count along θ.
pub const TOY_BUCKETS: usize = 6;
/// Seed equivalence classes.
pub const TOY_SEED_CLASSES: usize = 8;
/// Bucket width in θ units; buckets start at 0.
pub const TOY_BUCKET_WIDTH: f64 = 0.5;

/// Fixed output value per (bucket, seed class). Chosen to straddle the
/// observation used in tests (y = 1.0) with real within-bucket spread so
/// that both θ moves and seed flips change the likelihood.
pub const TOY_TABLE: [[f64; TOY_SEED_CLASSES]; TOY_BUCKETS] = [
    [0.10, 0.35, -0.20, 0.55, 0.00, 0.75, -0.45, 0.20],
    [0.60, 0.95, 0.40, 1.20, 0.80, 0.15, 1.05, 0.70],
    [1.00, 1.30, 0.85, 0.65, 1.15, 1.45, 0.95, 1.10],
    [1.50, 1.80, 1.25, 2.05, 1.65, 1.35, 1.95, 1.55],
    [2.10, 2.45, 1.90, 2.60, 2.25, 1.75, 2.35, 2.15],
    [2.80, 3.10, 2.55, 3.30, 2.95, 2.40, 3.20, 2.85],
];

/// The lookup-table simulator with a Normal(1.5, 1) prior on θ.
#[derive(Debug, Clone)]
pub struct ToySimulator {
    spec: SimulatorSpec,
}

impl ToySimulator {
    pub fn new() -> Self {
        let prior = Prior::new(alloc::vec![Marginal::Normal { mean: 1.5, sd: 1.0 }])
            .expect("valid prior");
        ToySimulator {
            spec: SimulatorSpec {
                name: alloc::string::String::from("toy-enumerable"),
                param_dim: 1,
                stat_dim: 1,
                prior,
            },
        }
    }

    /// Which bucket a parameter value falls in (clamped to the table).
    pub fn bucket_of(theta: f64) -> usize {
        let idx = (theta / TOY_BUCKET_WIDTH).floor();
        if idx < 0.0 {
            0
        } else if idx >= TOY_BUCKETS as f64 {
            TOY_BUCKETS - 1
        } else {
            idx as usize
        }
    }

    /// Which seed class a raw 64-bit seed falls in (exactly uniform under
    /// uniform u64 seeds).
    pub fn seed_class(seed: u64) -> usize {
        (seed % TOY_SEED_CLASSES as u64) as usize
    }

    /// Prior probability mass of each bucket (the two edge buckets absorb
    /// the clamped tails).
    pub fn bucket_prior_masses() -> [f64; TOY_BUCKETS] {
        let cdf = |x: f64| crate::special::std_normal_cdf((x - 1.5) / 1.0);
        let mut masses = [0.0; TOY_BUCKETS];
        for (b, m) in masses.iter_mut().enumerate() {
            let lo = if b == 0 {
                0.0
            } else {
                cdf(b as f64 * TOY_BUCKET_WIDTH)
            };
            let hi = if b == TOY_BUCKETS - 1 {
                1.0
            } else {
                cdf((b + 1) as f64 * TOY_BUCKET_WIDTH)
            };
            *m = hi - lo;
        }
        masses
    }
}

impl Default for ToySimulator {
    fn default() -> Self {
        ToySimulator::new()
    }
}

impl super::Simulator for ToySimulator {
    fn spec(&self) -> &SimulatorSpec {
        &self.spec
    }

    fn simulate(&self, theta: &ParameterVector, seed: u64) -> SummaryVector {
        let b = ToySimulator::bucket_of(theta.values()[0]);
        let k = ToySimulator::seed_class(seed);
        SummaryVector::new(alloc::vec![TOY_TABLE[b][k]])
    }
}
