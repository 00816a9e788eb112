//! `habc` — experiment runner for simulator-based Bayesian inference.
//!
//! Subcommands:
//! * `run <config>` — execute a TOML experiment config, writing trace CSVs,
//!   `diagnostics.json`, and `config.resolved` into the output directory.
//! * `preset <name> [--out <path>]` — emit a canned config (stdout by
//!   default).
//! * `gradprobe <config>` — run the gradient bias/variance study from the
//!   config's `[probe]` section, writing `gradient_report.json`.
//!
//! The output directory resolves as `--out-dir` flag, then the
//! `HABC_OUT_DIR` environment variable, then the config's `out_dir` field.

use std::path::PathBuf;
use std::time::Instant;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};

use habc_cli::config::ExperimentConfig;
use habc_cli::gradprobe::run_gradprobe;
use habc_cli::presets::{preset, PRESET_NAMES};
use habc_cli::runner::run_experiment;

/// Environment variable overriding the output directory (and nothing else).
const OUT_DIR_ENV: &str = "HABC_OUT_DIR";

#[derive(Parser)]
#[command(
    name = "habc",
    about = "Likelihood-free Bayesian inference experiments",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Overrides {
    /// Override the number of chains.
    #[arg(long)]
    chains: Option<u32>,
    /// Override the number of main steps per chain.
    #[arg(long)]
    steps: Option<u64>,
    /// Override the master seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Override the output directory (beats HABC_OUT_DIR and the config).
    #[arg(long)]
    out_dir: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment config end to end.
    Run {
        /// Path to a TOML experiment config.
        config: PathBuf,
        #[command(flatten)]
        overrides: Overrides,
    },
    /// Write a canned experiment config.
    Preset {
        /// One of the preset names.
        #[arg(value_parser = PRESET_NAMES)]
        name: String,
        /// Write to this path instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the gradient bias/variance study from a config's [probe] section.
    Gradprobe {
        /// Path to a TOML experiment config with a [probe] section.
        config: PathBuf,
        #[command(flatten)]
        overrides: Overrides,
    },
}

/// Apply CLI/env overrides to a loaded config; returns the directory the
/// outputs should land in.
fn resolve(cfg: &mut ExperimentConfig, overrides: &Overrides) -> Result<PathBuf> {
    if let Some(chains) = overrides.chains {
        cfg.chains = chains;
    }
    if let Some(steps) = overrides.steps {
        cfg.steps = steps;
    }
    if let Some(seed) = overrides.seed {
        cfg.master_seed = seed;
    }
    if let Some(dir) = &overrides.out_dir {
        cfg.out_dir = dir.display().to_string();
    } else if let Ok(dir) = std::env::var(OUT_DIR_ENV) {
        cfg.out_dir = dir;
    }
    cfg.validate()?;
    Ok(PathBuf::from(&cfg.out_dir))
}

fn main() -> Result<()> {
    let cli = Cli::parse();
    match cli.command {
        Command::Run { config, overrides } => {
            let mut cfg = ExperimentConfig::load(&config)?;
            let out_dir = resolve(&mut cfg, &overrides)?;
            let start = Instant::now();
            let outcome = run_experiment(&cfg, &out_dir)?;
            let agg = &outcome.diagnostics.aggregate;
            eprintln!(
                "{}: {} chains x {} steps in {:.1?}; {} simulator calls ({:.2}/step){}",
                cfg.name,
                cfg.chains,
                cfg.steps,
                start.elapsed(),
                agg.sim_calls_total,
                agg.sims_per_step,
                match agg.tvd_mean {
                    Some(t) => format!("; mean tvd {t:.4}"),
                    None => String::new(),
                },
            );
            println!("{}", outcome.out_dir.display());
            Ok(())
        }
        Command::Preset { name, out } => {
            let cfg = preset(&name)?;
            let text = cfg.to_toml_string()?;
            match out {
                Some(path) => {
                    std::fs::write(&path, text)
                        .with_context(|| format!("writing {}", path.display()))?;
                    println!("{}", path.display());
                }
                None => print!("{text}"),
            }
            Ok(())
        }
        Command::Gradprobe { config, overrides } => {
            let mut cfg = ExperimentConfig::load(&config)?;
            let out_dir = resolve(&mut cfg, &overrides)?;
            let start = Instant::now();
            let outcome = run_gradprobe(&cfg, &out_dir)?;
            eprintln!(
                "{}: probe finished in {:.1?}; reference {:.3}",
                cfg.name,
                start.elapsed(),
                outcome.report.reference
            );
            for row in &outcome.report.rows {
                eprintln!(
                    "  {:>10} S={:<3} mean {:>8.3} sd {:>8.3}",
                    row.label, row.replicates, row.mean, row.sd
                );
            }
            println!("{}", outcome.report_path.display());
            Ok(())
        }
    }
}
