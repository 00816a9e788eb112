//! Config-driven experiment runner for the `habc-core` inference toolkit.
//!
//! This crate carries everything the `no_std` core leaves out: TOML
//! experiment configs, bundled benchmark datasets, multi-threaded chain
//! execution, and CSV/JSON artifact output. The `habc` binary is a thin
//! shell over these modules; tests drive them in-process.
//!
//! Reproducibility is the organizing rule — a config plus its master seed
//! determines every output byte, so no artifact contains wall-clock times
//! or machine-dependent values.

pub mod config;
pub mod data;
pub mod gradprobe;
pub mod presets;
pub mod runner;
