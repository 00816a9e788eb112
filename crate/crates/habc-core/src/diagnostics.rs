//! Quantitative evaluation of chain output: histogram distance against an
//! analytic posterior, increment autocorrelation (random-walk detection),
//! random 2-D projections for high-dimensional traces, and tabulated
//! gradient bias/variance summaries.

use alloc::string::String;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::special::GammaDist;
use crate::stream::Stream;

/// Immutable record of one finished chain, as consumed by diagnostics.
pub struct ChainTrace {
    samples: Vec<Vec<f64>>,
    sim_calls: u64,
    kernel: String,
    config: String,
}

impl ChainTrace {
    /// Validates that all rows are finite and share one dimension.
    pub fn new(
        samples: Vec<Vec<f64>>,
        sim_calls: u64,
        kernel: String,
        config: String,
    ) -> Result<Self> {
        if let Some(first) = samples.first() {
            let d = first.len();
            if d == 0 {
                return Err(Error::InvalidArgument("trace rows must be non-empty"));
            }
            for row in &samples {
                if row.len() != d {
                    return Err(Error::ShapeMismatch {
                        expected: d,
                        got: row.len(),
                    });
                }
                if row.iter().any(|v| !v.is_finite()) {
                    return Err(Error::InvalidArgument(
                        "trace rows must be finite",
                    ));
                }
            }
        }
        Ok(Self {
            samples,
            sim_calls,
            kernel,
            config,
        })
    }

    pub fn samples(&self) -> &[Vec<f64>] {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.samples.first().map_or(0, Vec::len)
    }

    pub fn sim_calls(&self) -> u64 {
        self.sim_calls
    }

    pub fn kernel(&self) -> &str {
        &self.kernel
    }

    pub fn config(&self) -> &str {
        &self.config
    }

    /// The samples with the leading `burn_in_frac` fraction dropped.
    pub fn after_burn_in(&self, burn_in_frac: f64) -> &[Vec<f64>] {
        let skip = ((self.samples.len() as f64) * burn_in_frac) as usize;
        &self.samples[skip.min(self.samples.len())..]
    }
}

/// Histogram distance ½·Σ|p̂ − p| between a scalar trace and an analytic
/// Gamma posterior, over `num_bins` equal-probability bins built from the
/// posterior's quantile function. The first `burn_in_frac` of the trace is
/// discarded.
///
/// Equal-probability binning gives every bin exact mass 1/num_bins, so the
/// distance is stable in the tails and always lies in [0, 1].
pub fn tvd_vs_analytic(
    trace: &ChainTrace,
    posterior: &GammaDist,
    num_bins: usize,
    burn_in_frac: f64,
) -> Result<f64> {
    if num_bins < 2 {
        return Err(Error::InvalidArgument("need at least two bins"));
    }
    if !(0.0..1.0).contains(&burn_in_frac) {
        return Err(Error::InvalidArgument("burn-in fraction must be in [0, 1)"));
    }
    if trace.dim() > 1 {
        return Err(Error::ShapeMismatch {
            expected: 1,
            got: trace.dim(),
        });
    }
    let kept = trace.after_burn_in(burn_in_frac);
    if kept.is_empty() {
        return Err(Error::InvalidArgument("empty trace after burn-in"));
    }
    // Inner edges at quantiles k/num_bins, k = 1..num_bins−1; the outer
    // bins absorb the tails, so the grid covers all posterior mass.
    let edges: Vec<f64> = (1..num_bins)
        .map(|k| posterior.inverse_cdf(k as f64 / num_bins as f64))
        .collect();
    let mut counts = alloc::vec![0u64; num_bins];
    for row in kept {
        let x = row[0];
        // partition_point: number of edges ≤ x, i.e. the bin index.
        let bin = edges.partition_point(|e| *e <= x);
        counts[bin] += 1;
    }
    let n = kept.len() as f64;
    let p_bin = 1.0 / num_bins as f64;
    let tvd = 0.5
        * counts
            .iter()
            .map(|&c| (c as f64 / n - p_bin).abs())
            .sum::<f64>();
    Ok(tvd)
}

/// Per-chain [`tvd_vs_analytic`], averaged over chains.
pub fn average_tvd_vs_analytic(
    traces: &[ChainTrace],
    posterior: &GammaDist,
    num_bins: usize,
    burn_in_frac: f64,
) -> Result<f64> {
    if traces.is_empty() {
        return Err(Error::InvalidArgument("no traces"));
    }
    let mut total = 0.0;
    for trace in traces {
        total += tvd_vs_analytic(trace, posterior, num_bins, burn_in_frac)?;
    }
    Ok(total / traces.len() as f64)
}

/// Sample autocorrelation of the trace's first differences at `lag`,
/// computed per coordinate and averaged.
///
/// Positive values at small lags mean successive moves point the same way
/// (momentum-like motion); values near zero mean diffusive random-walk
/// exploration. A coordinate whose increments have zero variance is
/// perfectly predictable and contributes 1.
pub fn increment_autocorr(trace: &ChainTrace, lag: usize) -> Result<f64> {
    let t = trace.len();
    if t < lag + 2 {
        return Err(Error::InvalidArgument(
            "trace too short for requested lag",
        ));
    }
    let d = trace.dim();
    let samples = trace.samples();
    let n_inc = t - 1;
    let mut acc = 0.0;
    for j in 0..d {
        let inc: Vec<f64> = (0..n_inc)
            .map(|i| samples[i + 1][j] - samples[i][j])
            .collect();
        let mean = inc.iter().sum::<f64>() / n_inc as f64;
        let denom: f64 = inc.iter().map(|v| (v - mean) * (v - mean)).sum();
        // Constant-velocity coordinates are perfectly predictable; treat
        // variance below rounding residue (sd ≲ 1e-9·|mean|) as zero.
        let residue = n_inc as f64 * (1e-9 * mean) * (1e-9 * mean);
        if denom <= residue {
            acc += 1.0;
            continue;
        }
        let numer: f64 = (0..n_inc - lag)
            .map(|i| (inc[i] - mean) * (inc[i + lag] - mean))
            .sum();
        acc += numer / denom;
    }
    Ok(acc / d as f64)
}

/// A 2×D projection frozen at construction; used to view high-dimensional
/// traces in the plane.
pub struct ProjectionMatrix {
    rows: [Vec<f64>; 2],
}

impl ProjectionMatrix {
    /// Draw both rows i.i.d. standard normal from `stream` and freeze them.
    pub fn draw(dim: usize, stream: &mut Stream) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidArgument("projection needs dim ≥ 1"));
        }
        let row = |s: &mut Stream| (0..dim).map(|_| s.standard_normal()).collect();
        let r0: Vec<f64> = row(stream);
        let r1: Vec<f64> = row(stream);
        Ok(Self { rows: [r0, r1] })
    }

    /// Build from explicit rows (mainly for tests and replay from disk).
    pub fn from_rows(r0: Vec<f64>, r1: Vec<f64>) -> Result<Self> {
        if r0.is_empty() || r0.len() != r1.len() {
            return Err(Error::ShapeMismatch {
                expected: r0.len().max(1),
                got: r1.len(),
            });
        }
        if r0.iter().chain(&r1).any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument("projection rows must be finite"));
        }
        Ok(Self { rows: [r0, r1] })
    }

    pub fn dim(&self) -> usize {
        self.rows[0].len()
    }

    pub fn rows(&self) -> &[Vec<f64>; 2] {
        &self.rows
    }

    fn apply(&self, theta: &[f64]) -> [f64; 2] {
        let dot = |r: &[f64]| r.iter().zip(theta).map(|(a, b)| a * b).sum::<f64>();
        [dot(&self.rows[0]), dot(&self.rows[1])]
    }
}

/// Project every sample to 2-D, then evenly sub-sample to at most
/// `max_points` points (0 keeps everything).
pub fn project_2d(
    trace: &ChainTrace,
    projection: &ProjectionMatrix,
    max_points: usize,
) -> Result<Vec<[f64; 2]>> {
    if trace.dim() != projection.dim() {
        return Err(Error::ShapeMismatch {
            expected: projection.dim(),
            got: trace.dim(),
        });
    }
    let t = trace.len();
    let count = if max_points == 0 { t } else { max_points.min(t) };
    let mut out = Vec::with_capacity(count);
    for k in 0..count {
        let idx = k * t / count;
        out.push(projection.apply(&trace.samples()[idx]));
    }
    Ok(out)
}

/// One line of a gradient study: label (estimator/likelihood), replicate
/// count, and the sample mean ± sd of the estimates.
pub struct GradientReportRow {
    pub label: String,
    pub replicates: usize,
    pub mean: f64,
    pub sd: f64,
}

/// Tabulated gradient study next to the large-replicate analytic reference
/// value the estimates should approach.
pub struct GradientReport {
    pub rows: Vec<GradientReportRow>,
    pub reference: f64,
}

impl GradientReport {
    pub fn new(reference: f64) -> Self {
        Self {
            rows: Vec::new(),
            reference,
        }
    }

    pub fn push_row(&mut self, label: &str, replicates: usize, mean: f64, sd: f64) {
        self.rows.push(GradientReportRow {
            label: String::from(label),
            replicates,
            mean,
            sd,
        });
    }

    pub fn row(&self, label: &str, replicates: usize) -> Option<&GradientReportRow> {
        self.rows
            .iter()
            .find(|r| r.label == label && r.replicates == replicates)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stream::derive_stream;
    use alloc::string::ToString;
    use alloc::vec;

    fn trace_of(samples: Vec<Vec<f64>>) -> ChainTrace {
        ChainTrace::new(samples, 0, "test".to_string(), String::new()).unwrap()
    }

    fn scalar_trace(values: impl IntoIterator<Item = f64>) -> ChainTrace {
        trace_of(values.into_iter().map(|v| vec![v]).collect())
    }

    #[test]
    fn trace_validation_rejects_ragged_and_non_finite_rows() {
        let ragged = ChainTrace::new(
            vec![vec![1.0, 2.0], vec![3.0]],
            0,
            String::new(),
            String::new(),
        );
        assert!(ragged.is_err());
        let nan = ChainTrace::new(
            vec![vec![f64::NAN]],
            0,
            String::new(),
            String::new(),
        );
        assert!(nan.is_err());
        let empty = ChainTrace::new(vec![], 0, String::new(), String::new());
        assert!(empty.is_ok());
    }

    #[test]
    fn tvd_of_exact_posterior_draws_is_small() {
        let posterior = GammaDist::new(20.1, 154.9).unwrap();
        let mut stream = derive_stream(21, 0);
        let samples: Vec<Vec<f64>> = (0..1_000_000)
            .map(|_| vec![posterior.inverse_cdf(stream.uniform_open())])
            .collect();
        let trace = trace_of(samples);
        let tvd = tvd_vs_analytic(&trace, &posterior, 100, 0.0).unwrap();
        assert!(tvd < 0.01, "tvd = {tvd}");
    }

    #[test]
    fn tvd_of_point_mass_is_one_minus_bin_mass() {
        let posterior = GammaDist::new(20.1, 154.9).unwrap();
        let trace = scalar_trace((0..1000).map(|_| posterior.mean()));
        let tvd = tvd_vs_analytic(&trace, &posterior, 100, 0.0).unwrap();
        assert!(
            (tvd - 0.99).abs() < 1e-12,
            "point mass in one of 100 equal bins must give 0.99, got {tvd}"
        );
    }

    #[test]
    fn tvd_of_perfectly_stratified_sample_is_zero() {
        let posterior = GammaDist::new(5.0, 2.0).unwrap();
        // One sample in the middle of each equal-probability bin.
        let trace = scalar_trace(
            (0..100).map(|k| posterior.inverse_cdf((k as f64 + 0.5) / 100.0)),
        );
        let tvd = tvd_vs_analytic(&trace, &posterior, 100, 0.0).unwrap();
        assert!(tvd < 1e-12, "tvd = {tvd}");
    }

    #[test]
    fn tvd_is_order_invariant_and_bounded() {
        let posterior = GammaDist::new(20.1, 154.9).unwrap();
        let mut stream = derive_stream(22, 0);
        let mut values: Vec<f64> = (0..5_000)
            .map(|_| posterior.inverse_cdf(stream.uniform_open()) * 1.3)
            .collect();
        let forward = tvd_vs_analytic(&scalar_trace(values.clone()), &posterior, 100, 0.0)
            .unwrap();
        values.reverse();
        let reversed =
            tvd_vs_analytic(&scalar_trace(values), &posterior, 100, 0.0).unwrap();
        assert_eq!(forward, reversed);
        assert!((0.0..=1.0).contains(&forward));
    }

    #[test]
    fn tvd_burn_in_discards_initial_transient() {
        let posterior = GammaDist::new(20.1, 154.9).unwrap();
        let mut stream = derive_stream(23, 0);
        // First 10%: stuck far in the tail; rest: exact draws.
        let mut values = vec![2.0; 10_000];
        values.extend((0..90_000).map(|_| posterior.inverse_cdf(stream.uniform_open())));
        let trace = scalar_trace(values);
        let with_burn = tvd_vs_analytic(&trace, &posterior, 100, 0.1).unwrap();
        let without = tvd_vs_analytic(&trace, &posterior, 100, 0.0).unwrap();
        assert!(with_burn < 0.02, "burn-in failed to drop transient: {with_burn}");
        assert!(without > 0.08, "transient should hurt un-burned tvd: {without}");
    }

    #[test]
    fn tvd_rejects_empty_and_multivariate_traces() {
        let posterior = GammaDist::new(2.0, 1.0).unwrap();
        let empty = trace_of(vec![]);
        assert!(tvd_vs_analytic(&empty, &posterior, 100, 0.0).is_err());
        let wide = trace_of(vec![vec![1.0, 2.0]]);
        assert!(tvd_vs_analytic(&wide, &posterior, 100, 0.0).is_err());
    }

    #[test]
    fn average_tvd_averages_per_chain_values() {
        let posterior = GammaDist::new(5.0, 2.0).unwrap();
        let stratified = scalar_trace(
            (0..100).map(|k| posterior.inverse_cdf((k as f64 + 0.5) / 100.0)),
        );
        let point = scalar_trace((0..100).map(|_| posterior.mean()));
        let avg =
            average_tvd_vs_analytic(&[stratified, point], &posterior, 100, 0.0).unwrap();
        assert!((avg - 0.495).abs() < 1e-12, "avg = {avg}");
    }

    #[test]
    fn white_noise_increments_have_no_autocorrelation() {
        let mut stream = derive_stream(24, 0);
        let mut pos = 0.0;
        let n = 100_000;
        let trace = scalar_trace((0..n).map(|_| {
            pos += stream.standard_normal();
            pos
        }));
        let r = increment_autocorr(&trace, 1).unwrap();
        let bound = 3.0 / (n as f64).sqrt();
        assert!(r.abs() < bound, "r = {r}, bound = {bound}");
    }

    #[test]
    fn constant_velocity_trace_has_unit_increment_autocorrelation() {
        let trace = scalar_trace((0..500).map(|t| 0.3 * t as f64));
        let r = increment_autocorr(&trace, 1).unwrap();
        assert_eq!(r, 1.0);
    }

    #[test]
    fn ar1_increments_recover_their_coefficient() {
        let phi = 0.5;
        let mut stream = derive_stream(25, 0);
        let n = 200_000;
        let mut inc = 0.0;
        let mut pos = 0.0;
        let trace = scalar_trace((0..n).map(|_| {
            inc = phi * inc + stream.standard_normal();
            pos += inc;
            pos
        }));
        let r = increment_autocorr(&trace, 1).unwrap();
        let bound = 3.0 / (n as f64).sqrt();
        assert!(
            (r - phi).abs() < bound,
            "r = {r}, expected {phi} ± {bound}"
        );
    }

    #[test]
    fn increment_autocorr_needs_enough_samples() {
        let trace = scalar_trace([1.0, 2.0]);
        assert!(increment_autocorr(&trace, 1).is_err());
        assert!(increment_autocorr(&trace, 0).is_ok());
    }

    #[test]
    fn identity_projection_returns_the_trace() {
        let proj =
            ProjectionMatrix::from_rows(vec![1.0, 0.0], vec![0.0, 1.0]).unwrap();
        let trace = trace_of(vec![vec![0.5, -1.5], vec![2.0, 3.0]]);
        let pts = project_2d(&trace, &proj, 0).unwrap();
        assert_eq!(pts, vec![[0.5, -1.5], [2.0, 3.0]]);
    }

    #[test]
    fn zero_projection_collapses_to_origin() {
        let proj = ProjectionMatrix::from_rows(vec![0.0; 3], vec![0.0; 3]).unwrap();
        let trace = trace_of(vec![vec![1.0, 2.0, 3.0]]);
        let pts = project_2d(&trace, &proj, 0).unwrap();
        assert_eq!(pts, vec![[0.0, 0.0]]);
    }

    #[test]
    fn projection_is_linear_in_the_trace() {
        let mut stream = derive_stream(26, 0);
        let proj = ProjectionMatrix::draw(4, &mut stream).unwrap();
        let row = vec![0.3, -1.2, 0.7, 2.2];
        let scaled: Vec<f64> = row.iter().map(|v| 3.5 * v).collect();
        let p1 = project_2d(&trace_of(vec![row]), &proj, 0).unwrap();
        let p2 = project_2d(&trace_of(vec![scaled]), &proj, 0).unwrap();
        for k in 0..2 {
            assert!((p2[0][k] - 3.5 * p1[0][k]).abs() < 1e-12);
        }
    }

    #[test]
    fn random_projections_preserve_norm_in_expectation() {
        // For standard normal rows, E‖Pθ‖² = 2‖θ‖².
        let theta = vec![1.0, -2.0, 0.5];
        let norm_sq: f64 = theta.iter().map(|v| v * v).sum();
        let mut stream = derive_stream(27, 0);
        let n = 40_000;
        let mut total = 0.0;
        for _ in 0..n {
            let proj = ProjectionMatrix::draw(3, &mut stream).unwrap();
            let p = project_2d(&trace_of(vec![theta.clone()]), &proj, 0).unwrap();
            total += p[0][0] * p[0][0] + p[0][1] * p[0][1];
        }
        let ratio = total / n as f64 / (2.0 * norm_sq);
        assert!((ratio - 1.0).abs() < 0.02, "ratio = {ratio}");
    }

    #[test]
    fn even_subsampling_strides_through_the_trace() {
        let trace = scalar_trace((0..10_000).map(|t| t as f64));
        let proj = ProjectionMatrix::from_rows(vec![1.0], vec![2.0]).unwrap();
        let pts = project_2d(&trace, &proj, 1000).unwrap();
        assert_eq!(pts.len(), 1000);
        assert_eq!(pts[0], [0.0, 0.0]);
        assert_eq!(pts[1], [10.0, 20.0]);
        assert_eq!(pts[999], [9990.0, 19980.0]);
    }

    #[test]
    fn projection_shape_mismatch_is_an_error() {
        let proj = ProjectionMatrix::from_rows(vec![1.0, 0.0], vec![0.0, 1.0]).unwrap();
        let trace = trace_of(vec![vec![1.0, 2.0, 3.0]]);
        assert!(project_2d(&trace, &proj, 0).is_err());
        assert!(ProjectionMatrix::from_rows(vec![1.0], vec![1.0, 2.0]).is_err());
    }

    #[test]
    fn gradient_report_stores_and_finds_rows() {
        let mut report = GradientReport::new(-7.1);
        report.push_row("synthetic", 5, -7.4, 3.2);
        report.push_row("synthetic", 50, -7.2, 1.1);
        report.push_row("kernel", 5, -1.0, 40.0);
        let row = report.row("synthetic", 50).unwrap();
        assert_eq!(row.mean, -7.2);
        assert!(report.row("kernel", 50).is_none());
        assert_eq!(report.reference, -7.1);
    }
}
