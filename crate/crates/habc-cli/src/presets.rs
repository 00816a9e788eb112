//! Canned experiment configurations for the benchmark studies.
//!
//! Each preset is a complete, self-contained config: loading one and
//! running it reproduces the corresponding study at desk scale. Step sizes
//! and proposal scales were chosen by grid search minimizing total
//! variational distance (where an analytic posterior exists) or by
//! stability on the reference parameter region (blowfly, logreg); they are
//! plain config values, so overriding them needs no code changes.

use anyhow::{bail, Result};

use crate::config::{
    ExperimentConfig, GradientMethodChoice, GradientSection, LikelihoodChoice,
    ProbeSection, ProblemConfig, SamplerKind, SamplerSection, SCHEMA_VERSION,
};

pub const PRESET_NAMES: [&str; 4] = ["demo-table1", "demo-gradfig", "blowfly", "logreg"];

/// Exponential-demo constants shared by both demo presets.
mod demo {
    pub const PRIOR_ALPHA: f64 = 0.1;
    pub const PRIOR_BETA: f64 = 0.1;
    pub const DRAWS_PER_SIM: usize = 20;
    pub const OBSERVED: f64 = 7.74;
    pub const EPSILON: f64 = 0.37;

    /// Posterior mode of Gamma(α+N, β+N·y) — the probe location and the
    /// chains' starting point.
    pub fn theta_map() -> f64 {
        (PRIOR_ALPHA + DRAWS_PER_SIM as f64 - 1.0)
            / (PRIOR_BETA + DRAWS_PER_SIM as f64 * OBSERVED)
    }
}

/// Reference blowfly parameters (log P, log δ, log N₀, log σ_d, log σ_p, τ):
/// the point the bundled observed series was generated from, and the
/// chains' starting point.
pub const BLOWFLY_THETA_REF: [f64; 6] = [2.5, -1.8, 6.0, -0.75, -0.5, 14.0];

/// Per-statistic ε for the blowfly problem: ½ on the four population
/// quantiles, ¼ on the four difference quantiles, ¾ on the two peak counts.
pub const BLOWFLY_EPSILON: [f64; 10] =
    [0.5, 0.5, 0.5, 0.5, 0.25, 0.25, 0.25, 0.25, 0.75, 0.75];

/// Look up a preset by name; unknown names list the valid ones.
pub fn preset(name: &str) -> Result<ExperimentConfig> {
    let cfg = match name {
        "demo-table1" => demo_table1(),
        "demo-gradfig" => demo_gradfig(),
        "blowfly" => blowfly(),
        "logreg" => logreg(),
        other => bail!(
            "unknown preset '{other}'; available presets: {}",
            PRESET_NAMES.join(", ")
        ),
    };
    cfg.validate().expect("presets must validate");
    Ok(cfg)
}

/// Exponential-demo posterior sampling: SGLD with persistent seeds,
/// synthetic likelihood, S = 200 replicates — the flagship row of the
/// posterior-accuracy study. Persistent chains freeze their replicate
/// seeds (γ = 0) and buy accuracy through S instead; the per-replicate
/// seed-refresh move is cheap but tilts the fitted likelihood when it is
/// mixed in, so the frozen variant is the one that hits the accuracy
/// target. Other kernels reuse this config with the sampler section
/// swapped.
fn demo_table1() -> ExperimentConfig {
    ExperimentConfig {
        schema: SCHEMA_VERSION,
        name: "demo-table1".into(),
        master_seed: 123_456,
        chains: 5,
        steps: 10_000,
        thinning: 1,
        burn_in_frac: 0.1,
        out_dir: "out/demo-table1".into(),
        problem: ProblemConfig::ExpDemo {
            prior_alpha: demo::PRIOR_ALPHA,
            prior_beta: demo::PRIOR_BETA,
            draws_per_sim: demo::DRAWS_PER_SIM,
            observed: demo::OBSERVED,
            epsilon: vec![demo::EPSILON],
            replicates: 200,
            init_theta: vec![demo::theta_map()],
        },
        sampler: SamplerSection {
            kind: SamplerKind::Sgld,
            eta: Some(0.01),
            friction_c: None,
            xi0: None,
            proposal_std: None,
            persistent_seeds: true,
            gamma: Some(0.0),
            likelihood: LikelihoodChoice::Synthetic,
            gradient: Some(GradientSection {
                method: GradientMethodChoice::Fdsa,
                d_theta: vec![1e-3],
                repeats: None,
            }),
        },
        probe: None,
    }
}

/// Gradient bias/variance study at the demo posterior mode: both
/// likelihood models probed at S ∈ {5, 50} with 10⁴ fresh-seed trials
/// each, against the infinite-replicate synthetic-likelihood reference.
fn demo_gradfig() -> ExperimentConfig {
    let mut cfg = demo_table1();
    cfg.name = "demo-gradfig".into();
    cfg.master_seed = 1002;
    cfg.out_dir = "out/demo-gradfig".into();
    if let ProblemConfig::ExpDemo { replicates, .. } = &mut cfg.problem {
        // The probe sweeps its own replicate counts; the base value is unused.
        *replicates = 5;
    }
    cfg.probe = Some(ProbeSection {
        trials: 10_000,
        replicate_counts: vec![5, 50],
    });
    cfg
}

/// Blowfly population dynamics: SGNHT with persistent seeds, SPSA
/// gradients (R = 2) on the synthetic likelihood, S = 10 replicates.
fn blowfly() -> ExperimentConfig {
    ExperimentConfig {
        schema: SCHEMA_VERSION,
        name: "blowfly".into(),
        master_seed: 1003,
        chains: 1,
        steps: 5_000,
        thinning: 1,
        burn_in_frac: 0.1,
        out_dir: "out/blowfly".into(),
        problem: ProblemConfig::Blowfly {
            observed_path: None,
            epsilon: BLOWFLY_EPSILON.to_vec(),
            replicates: 10,
            init_theta: BLOWFLY_THETA_REF.to_vec(),
        },
        sampler: SamplerSection {
            kind: SamplerKind::Sgnht,
            eta: Some(1e-3),
            friction_c: Some(1.0),
            xi0: Some(1.0),
            proposal_std: None,
            persistent_seeds: true,
            gamma: Some(0.1),
            likelihood: LikelihoodChoice::Synthetic,
            gradient: Some(GradientSection {
                method: GradientMethodChoice::Spsa,
                d_theta: vec![0.1, 0.1, 0.1, 0.1, 0.1, 0.5],
                repeats: Some(2),
            }),
        },
        probe: None,
    }
}

/// High-dimensional logistic regression (D = 128): SGLD driven by SPSA on
/// the mini-batch log posterior (R = 10, n = 100), starting from the
/// gradient-descent MAP estimate.
fn logreg() -> ExperimentConfig {
    ExperimentConfig {
        schema: SCHEMA_VERSION,
        name: "logreg".into(),
        master_seed: 1004,
        chains: 1,
        steps: 10_000,
        thinning: 1,
        burn_in_frac: 0.1,
        out_dir: "out/logreg".into(),
        problem: ProblemConfig::Logreg {
            data_path: None,
            batch_size: 100,
            map_descent_steps: 2_000,
            map_descent_rate: 2e-4,
        },
        sampler: SamplerSection {
            kind: SamplerKind::Sgld,
            eta: Some(0.01),
            friction_c: None,
            xi0: None,
            proposal_std: None,
            persistent_seeds: false,
            gamma: None,
            likelihood: LikelihoodChoice::Synthetic,
            gradient: Some(GradientSection {
                method: GradientMethodChoice::Spsa,
                d_theta: vec![0.01],
                repeats: Some(10),
            }),
        },
        probe: None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_presets_validate_and_round_trip_through_toml() {
        for name in PRESET_NAMES {
            let cfg = preset(name).unwrap();
            let text = cfg.to_toml_string().unwrap();
            let back = ExperimentConfig::from_toml_str(&text).unwrap();
            assert_eq!(cfg, back, "round-trip mismatch for {name}");
        }
    }

    #[test]
    fn unknown_preset_error_lists_the_valid_names() {
        let err = preset("nope").unwrap_err().to_string();
        for name in PRESET_NAMES {
            assert!(err.contains(name), "{err}");
        }
    }

    #[test]
    fn documented_preset_constants_hold() {
        let t1 = preset("demo-table1").unwrap();
        match &t1.problem {
            ProblemConfig::ExpDemo {
                epsilon, replicates, ..
            } => {
                assert_eq!(epsilon, &vec![0.37]);
                assert_eq!(*replicates, 200);
            }
            _ => panic!("demo-table1 must be an exp-demo problem"),
        }
        let bf = preset("blowfly").unwrap();
        match &bf.problem {
            ProblemConfig::Blowfly { replicates, .. } => assert_eq!(*replicates, 10),
            _ => panic!("blowfly preset must be a blowfly problem"),
        }
        assert_eq!(
            bf.sampler.gradient.as_ref().unwrap().repeats,
            Some(2),
            "blowfly SPSA uses R = 2"
        );
        let lr = preset("logreg").unwrap();
        match &lr.problem {
            ProblemConfig::Logreg { batch_size, .. } => assert_eq!(*batch_size, 100),
            _ => panic!("logreg preset must be a logreg problem"),
        }
        assert_eq!(lr.sampler.gradient.as_ref().unwrap().repeats, Some(10));
    }
}
