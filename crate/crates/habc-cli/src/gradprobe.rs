//! Gradient bias/variance study runner.
//!
//! For each configured replicate count S and each likelihood model, the
//! probe draws `trials` fresh seed sets at the configured starting point
//! and tabulates the empirical mean and standard deviation of the
//! central-difference ∇U estimate, next to the analytic infinite-replicate
//! synthetic-likelihood reference computed by quadrature. The report is
//! written as `gradient_report.json`.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use serde::Serialize;

use habc_core::diagnostics::GradientReport;
use habc_core::gradients::{gradient_variance_probe, DTheta, GradMethod, GradientConfig};
use habc_core::likelihoods::LikelihoodKind;
use habc_core::simulators::{sl_gradient_reference, ExpDemoSimulator, Simulator};
use habc_core::stream::derive_stream;
use habc_core::types::{EpsilonVector, ParameterVector, SummaryVector};

use crate::config::{ExperimentConfig, ProblemConfig};

/// First probe substream; each (likelihood, S) cell gets its own.
const PROBE_SUBSTREAM_BASE: u64 = 8;

#[derive(Debug, Clone, Serialize)]
struct ReportRow {
    likelihood: String,
    replicates: usize,
    mean: f64,
    sd: f64,
}

#[derive(Debug, Clone, Serialize)]
struct ReportJson {
    schema: u32,
    name: String,
    master_seed: u64,
    theta: f64,
    trials: usize,
    d_theta: f64,
    rows: Vec<ReportRow>,
    /// ∇U at θ under the S → ∞ synthetic likelihood, from quadrature.
    sl_infinite_replicate_reference: f64,
}

/// Outcome of a probe run: the in-memory report plus where it was written.
pub struct ProbeOutcome {
    pub report: GradientReport,
    pub report_path: PathBuf,
}

/// Run the study described by `cfg.probe` and write `gradient_report.json`
/// into `out_dir`.
pub fn run_gradprobe(cfg: &ExperimentConfig, out_dir: &Path) -> Result<ProbeOutcome> {
    cfg.validate()?;
    let probe = match &cfg.probe {
        Some(p) => p,
        None => bail!("probe: config has no [probe] section"),
    };
    let (alpha, beta, n, observed, epsilon, init_theta) = match &cfg.problem {
        ProblemConfig::ExpDemo {
            prior_alpha,
            prior_beta,
            draws_per_sim,
            observed,
            epsilon,
            init_theta,
            ..
        } => (
            *prior_alpha,
            *prior_beta,
            *draws_per_sim,
            *observed,
            epsilon.clone(),
            init_theta.clone(),
        ),
        other => bail!(
            "probe: needs problem.kind = \"exp-demo\", got \"{}\"",
            other.kind_name()
        ),
    };
    let grad = cfg
        .sampler
        .gradient
        .as_ref()
        .context("probe: sampler.gradient.d_theta is required")?;
    if grad.d_theta.len() != 1 {
        bail!("probe: sampler.gradient.d_theta must be a single value here");
    }
    let d_theta = grad.d_theta[0];

    let sim = ExpDemoSimulator::new(n, alpha, beta)
        .map_err(|e| anyhow::anyhow!("problem: {e}"))?;
    let prior = sim.spec().prior.clone();
    let theta = ParameterVector::new(init_theta)
        .map_err(|e| anyhow::anyhow!("problem.init_theta: {e}"))?;
    let y = SummaryVector::new(vec![observed]);
    let eps = EpsilonVector::new(epsilon.clone())
        .map_err(|e| anyhow::anyhow!("problem.epsilon: {e}"))?;

    let reference =
        sl_gradient_reference(theta.values()[0], observed, epsilon[0], n, alpha, beta);
    let mut report = GradientReport::new(reference);

    let cells = [
        ("kernel-eps", LikelihoodKind::KernelEps),
        ("synthetic", LikelihoodKind::Synthetic),
    ];
    for (ci, (label, kind)) in cells.iter().enumerate() {
        for (si, &s) in probe.replicate_counts.iter().enumerate() {
            let grad_cfg = GradientConfig {
                d_theta: DTheta::Scalar(d_theta),
                repeats: 1,
                method: GradMethod::Fdsa,
                likelihood: *kind,
            };
            let substream =
                PROBE_SUBSTREAM_BASE + (ci * probe.replicate_counts.len() + si) as u64;
            let mut stream = derive_stream(cfg.master_seed, substream);
            let (mean, sd) = gradient_variance_probe(
                &sim,
                &theta,
                &y,
                &eps,
                &prior,
                &grad_cfg,
                s,
                probe.trials,
                &mut stream,
            )
            .map_err(|e| anyhow::anyhow!("probe at S = {s}: {e}"))?;
            report.push_row(label, s, mean[0], sd[0]);
        }
    }

    fs::create_dir_all(out_dir)
        .with_context(|| format!("creating {}", out_dir.display()))?;
    let json = ReportJson {
        schema: cfg.schema,
        name: cfg.name.clone(),
        master_seed: cfg.master_seed,
        theta: theta.values()[0],
        trials: probe.trials,
        d_theta,
        rows: report
            .rows
            .iter()
            .map(|r| ReportRow {
                likelihood: r.label.clone(),
                replicates: r.replicates,
                mean: r.mean,
                sd: r.sd,
            })
            .collect(),
        sl_infinite_replicate_reference: report.reference,
    };
    let report_path = out_dir.join("gradient_report.json");
    let text = serde_json::to_string_pretty(&json).context("report json")?;
    fs::write(&report_path, text + "\n")
        .with_context(|| format!("writing {}", report_path.display()))?;
    Ok(ProbeOutcome {
        report,
        report_path,
    })
}
