//! Two-class logistic (softmax) regression as a high-dimensional target.
//!
//! This benchmark exercises samplers in dimensions far beyond the other
//! problems: θ packs one weight vector per class, D = 2·F parameters for F
//! features. The likelihood is tractable — the point is not approximation
//! but scale: gradient estimators that query only the (mini-batch) log
//! posterior as a black box (SPSA) can be compared directly against the
//! analytic gradient on the same batches.
//!
//! Mini-batch evaluations scale the data term by N/n so that the stochastic
//! potential is an unbiased estimate of the full-data potential, and batch
//! selection goes through a caller-provided index set so that both sides of
//! a finite-difference perturbation can share the exact same batch (the
//! common-random-numbers analog for a dataset).

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::float::FloatExt;
use crate::prior::{Marginal, Prior};
use crate::stream::Stream;
use crate::types::ParameterVector;

/// Immutable dataset plus prior for the softmax regression posterior.
#[derive(Debug, Clone)]
pub struct LogisticRegressionTarget {
    features: Vec<Vec<f64>>,
    labels: Vec<u8>,
    prior: Prior,
}

impl LogisticRegressionTarget {
    /// Feature rows must be finite and rectangular; labels binary. The
    /// prior is standard normal on every weight.
    pub fn new(features: Vec<Vec<f64>>, labels: Vec<u8>) -> Result<Self> {
        if features.is_empty() {
            return Err(Error::InvalidArgument("dataset must be non-empty"));
        }
        if features.len() != labels.len() {
            return Err(Error::ShapeMismatch {
                expected: features.len(),
                got: labels.len(),
            });
        }
        let f = features[0].len();
        if f == 0 {
            return Err(Error::InvalidArgument("feature rows must be non-empty"));
        }
        for row in &features {
            if row.len() != f {
                return Err(Error::ShapeMismatch {
                    expected: f,
                    got: row.len(),
                });
            }
            if row.iter().any(|x| !x.is_finite()) {
                return Err(Error::InvalidArgument("features must be finite"));
            }
        }
        if labels.iter().any(|&l| l > 1) {
            return Err(Error::InvalidArgument("labels must be 0 or 1"));
        }
        let prior = Prior::new(alloc::vec![
            Marginal::Normal { mean: 0.0, sd: 1.0 };
            2 * f
        ])?;
        Ok(LogisticRegressionTarget {
            features,
            labels,
            prior,
        })
    }

    pub fn num_examples(&self) -> usize {
        self.features.len()
    }

    pub fn num_features(&self) -> usize {
        self.features[0].len()
    }

    /// Parameter dimension: one weight vector per class.
    pub fn param_dim(&self) -> usize {
        2 * self.num_features()
    }

    pub fn prior(&self) -> &Prior {
        &self.prior
    }

    /// Draw `n` distinct example indices (partial Fisher–Yates).
    pub fn sample_batch(&self, n: usize, stream: &mut Stream) -> Result<Vec<usize>> {
        let total = self.num_examples();
        if n == 0 || n > total {
            return Err(Error::InvalidArgument(
                "batch size must be in 1..=num_examples",
            ));
        }
        let mut pool: Vec<usize> = (0..total).collect();
        for i in 0..n {
            let j = i + (stream.uniform() * (total - i) as f64) as usize;
            let j = j.min(total - 1);
            pool.swap(i, j);
        }
        pool.truncate(n);
        Ok(pool)
    }

    /// Mini-batch log posterior (N/n-scaled data term plus log prior) and
    /// its exact gradient. Returns a shape error on a θ/feature mismatch or
    /// an out-of-range batch index.
    pub fn minibatch_loglik_and_grad(
        &self,
        theta: &ParameterVector,
        batch: &[usize],
    ) -> Result<(f64, Vec<f64>)> {
        let f = self.num_features();
        let d = 2 * f;
        if theta.dim() != d {
            return Err(Error::ShapeMismatch {
                expected: d,
                got: theta.dim(),
            });
        }
        if batch.is_empty() {
            return Err(Error::InvalidArgument("batch must be non-empty"));
        }
        let w = theta.values();
        let (w0, w1) = w.split_at(f);
        let scale = self.num_examples() as f64 / batch.len() as f64;

        let mut loglik = 0.0;
        let mut grad = alloc::vec![0.0; d];
        for &i in batch {
            if i >= self.num_examples() {
                return Err(Error::InvalidArgument("batch index out of range"));
            }
            let x = &self.features[i];
            let mut l0 = 0.0;
            let mut l1 = 0.0;
            for (j, &xj) in x.iter().enumerate() {
                l0 += w0[j] * xj;
                l1 += w1[j] * xj;
            }
            // Stable two-class log-sum-exp and softmax.
            let m = l0.fmax(l1);
            let lse = m + ((l0 - m).exp() + (l1 - m).exp()).ln();
            let (p0, p1) = ((l0 - lse).exp(), (l1 - lse).exp());
            let label = self.labels[i];
            loglik += if label == 0 { l0 } else { l1 } - lse;
            // d loglik / d l_c = 1{label = c} − p_c, chain rule through x.
            let (r0, r1) = (
                (if label == 0 { 1.0 } else { 0.0 }) - p0,
                (if label == 1 { 1.0 } else { 0.0 }) - p1,
            );
            for (j, &xj) in x.iter().enumerate() {
                grad[j] += r0 * xj;
                grad[f + j] += r1 * xj;
            }
        }
        loglik *= scale;
        for g in grad.iter_mut() {
            *g *= scale;
        }

        let prior_lp = self.prior.log_pdf(theta)?;
        let prior_grad = self.prior.grad_log_pdf(theta)?;
        for (g, pg) in grad.iter_mut().zip(prior_grad) {
            *g += pg;
        }
        Ok((loglik + prior_lp, grad))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stream::derive_stream;
    use alloc::vec;

    fn small_target() -> LogisticRegressionTarget {
        let features = vec![
            vec![0.5, -1.0],
            vec![1.5, 0.25],
            vec![-0.75, 2.0],
            vec![0.0, -0.5],
        ];
        let labels = vec![0, 1, 1, 0];
        LogisticRegressionTarget::new(features, labels).unwrap()
    }

    #[test]
    fn zero_weights_give_log_half_per_example() {
        let t = small_target();
        let theta = ParameterVector::new(vec![0.0; 4]).unwrap();
        let (lp, _) = t.minibatch_loglik_and_grad(&theta, &[0, 1, 2, 3]).unwrap();
        let prior_lp = t.prior().log_pdf(&theta).unwrap();
        let expected = -(4.0) * core::f64::consts::LN_2 + prior_lp;
        assert!((lp - expected).abs() < 1e-12, "{lp} vs {expected}");
    }

    #[test]
    fn gradient_matches_central_finite_differences() {
        let t = small_target();
        let mut stream = derive_stream(55, 0);
        for _ in 0..5 {
            let theta = ParameterVector::new(
                (0..4).map(|_| stream.standard_normal()).collect(),
            )
            .unwrap();
            let batch = [0usize, 2, 3];
            let (_, grad) = t.minibatch_loglik_and_grad(&theta, &batch).unwrap();
            for j in 0..4 {
                let h = 1e-6;
                let mut e = vec![0.0; 4];
                e[j] = 1.0;
                let up = theta.shifted(&e, h);
                let dn = theta.shifted(&e, -h);
                let (lu, _) = t.minibatch_loglik_and_grad(&up, &batch).unwrap();
                let (ld, _) = t.minibatch_loglik_and_grad(&dn, &batch).unwrap();
                let fd = (lu - ld) / (2.0 * h);
                assert!(
                    (grad[j] - fd).abs() < 1e-5 * fd.abs().max(1.0),
                    "coord {j}: {g} vs {fd}",
                    g = grad[j]
                );
            }
        }
    }

    #[test]
    fn sigmoid_saturation_is_monotone_toward_zero_loss() {
        // Single example, single feature, label 1: pushing the class-1
        // weight up drives the log-likelihood monotonically to 0.
        let t = LogisticRegressionTarget::new(vec![vec![1.0]], vec![1]).unwrap();
        let mut last = f64::NEG_INFINITY;
        for w in [0.0, 1.0, 4.0, 16.0, 64.0] {
            let theta = ParameterVector::new(vec![0.0, w]).unwrap();
            let (lp, _) = t.minibatch_loglik_and_grad(&theta, &[0]).unwrap();
            let data_term = lp - t.prior().log_pdf(&theta).unwrap();
            assert!(data_term > last);
            assert!(data_term <= 0.0);
            last = data_term;
        }
        assert!(last > -1e-20, "log-likelihood should saturate at 0: {last}");
    }

    #[test]
    fn minibatch_scaling_is_unbiased_over_batches() {
        // Averaging the scaled data term over all size-2 batches recovers
        // the full-data term exactly.
        let t = small_target();
        let theta =
            ParameterVector::new(vec![0.3, -0.2, 0.15, 0.4]).unwrap();
        let full = {
            let (lp, _) = t.minibatch_loglik_and_grad(&theta, &[0, 1, 2, 3]).unwrap();
            lp - t.prior().log_pdf(&theta).unwrap()
        };
        let mut sum = 0.0;
        let mut count = 0.0;
        for a in 0..4 {
            for b in (a + 1)..4 {
                let (lp, _) = t.minibatch_loglik_and_grad(&theta, &[a, b]).unwrap();
                sum += lp - t.prior().log_pdf(&theta).unwrap();
                count += 1.0;
            }
        }
        assert!((sum / count - full).abs() < 1e-10);
    }

    #[test]
    fn batches_are_distinct_in_range_and_deterministic() {
        let t = small_target();
        let mut s1 = derive_stream(10, 4);
        let mut s2 = derive_stream(10, 4);
        let b1 = t.sample_batch(3, &mut s1).unwrap();
        let b2 = t.sample_batch(3, &mut s2).unwrap();
        assert_eq!(b1, b2);
        let mut seen = b1.clone();
        seen.sort_unstable();
        seen.dedup();
        assert_eq!(seen.len(), 3);
        assert!(seen.iter().all(|&i| i < 4));
        assert!(t.sample_batch(0, &mut s1).is_err());
        assert!(t.sample_batch(5, &mut s1).is_err());
    }

    #[test]
    fn validation_rejects_bad_datasets() {
        assert!(LogisticRegressionTarget::new(vec![], vec![]).is_err());
        assert!(
            LogisticRegressionTarget::new(vec![vec![1.0], vec![2.0, 3.0]], vec![0, 1])
                .is_err()
        );
        assert!(LogisticRegressionTarget::new(vec![vec![1.0]], vec![2]).is_err());
        assert!(LogisticRegressionTarget::new(vec![vec![f64::NAN]], vec![0]).is_err());
    }
}
