//! Bundled datasets and their loaders.
//!
//! Both benchmark datasets ship inside the binary so preset runs need no
//! external files: a daily blowfly population series (one count per line)
//! and a two-class set of 8×8 digit images (label plus 64 pixel columns
//! per row, pixel values 0–16, normalized to [0, 1] at load).

use anyhow::{bail, Context, Result};
use habc_core::simulators::LogisticRegressionTarget;

/// Observed blowfly population counts, one per day.
pub const BLOWFLY_OBSERVED_CSV: &str = include_str!("../data/blowfly_observed.csv");

/// Two-class digit images: `label,p0,...,p63` per row.
pub const DIGITS_CSV: &str = include_str!("../data/digits_8x8.csv");

/// Parse a one-value-per-line series.
pub fn parse_series(text: &str) -> Result<Vec<f64>> {
    let mut series = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let v: f64 = line
            .parse()
            .with_context(|| format!("series line {}: not a number", i + 1))?;
        if !v.is_finite() {
            bail!("series line {}: non-finite value", i + 1);
        }
        series.push(v);
    }
    if series.is_empty() {
        bail!("series is empty");
    }
    Ok(series)
}

/// Parse `label,pixels...` rows into a regression target; pixels are
/// rescaled from 0–16 to [0, 1].
pub fn parse_digits(text: &str) -> Result<LogisticRegressionTarget> {
    let mut features = Vec::new();
    let mut labels = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let mut fields = line.split(',');
        let label: u8 = fields
            .next()
            .context("empty row")?
            .trim()
            .parse()
            .with_context(|| format!("digits line {}: bad label", i + 1))?;
        let row: Vec<f64> = fields
            .map(|f| {
                f.trim()
                    .parse::<f64>()
                    .map(|v| v / 16.0)
                    .with_context(|| format!("digits line {}: bad pixel", i + 1))
            })
            .collect::<Result<_>>()?;
        labels.push(label);
        features.push(row);
    }
    LogisticRegressionTarget::new(features, labels)
        .map_err(|e| anyhow::anyhow!("digits dataset rejected: {e}"))
}
