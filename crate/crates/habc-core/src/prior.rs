//! Priors as products of independent univariate marginals.
//!
//! Log-densities return −∞ outside the support (that is data, not an error:
//! Metropolis kernels reject such proposals naturally). Gradients, by
//! contrast, are only defined on the interior, so `grad_log_pdf` reports a
//! support-boundary error when evaluated at or outside the boundary.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::float::{FloatExt, LN_2PI};
use crate::special::{digamma, ln_gamma};
use crate::types::ParameterVector;

/// One univariate prior marginal.
#[derive(Debug, Clone, PartialEq)]
pub enum Marginal {
    /// Gamma(shape α, rate β) on (0, ∞).
    Gamma { shape: f64, rate: f64 },
    /// log X ~ Normal(mu, sigma²), support (0, ∞).
    LogNormal { mu: f64, sigma: f64 },
    /// Normal(mean, sd²) on ℝ.
    Normal { mean: f64, sd: f64 },
    /// Poisson(rate λ) relaxed to the half-line τ > −1/2: the log-density is
    /// the pmf evaluated at round(τ), a proper piecewise-constant density
    /// (each unit cell integrates to its pmf value). The gradient uses the
    /// smooth surrogate ln λ − ψ(τ + 1), the derivative of the continuous
    /// interpolation of the log-pmf.
    Poisson { rate: f64 },
}

impl Marginal {
    fn validate(&self) -> Result<()> {
        let ok = match self {
            Marginal::Gamma { shape, rate } => {
                shape.is_finite() && *shape > 0.0 && rate.is_finite() && *rate > 0.0
            }
            Marginal::LogNormal { mu, sigma } => mu.is_finite() && sigma.is_finite() && *sigma > 0.0,
            Marginal::Normal { mean, sd } => mean.is_finite() && sd.is_finite() && *sd > 0.0,
            Marginal::Poisson { rate } => rate.is_finite() && *rate > 0.0,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidArgument("prior hyperparameters out of range"))
        }
    }

    /// Log-density at `x`; −∞ outside the support.
    pub fn log_pdf(&self, x: f64) -> f64 {
        match self {
            Marginal::Gamma { shape, rate } => {
                if x <= 0.0 {
                    f64::NEG_INFINITY
                } else {
                    shape * rate.ln() - ln_gamma(*shape) + (shape - 1.0) * x.ln() - rate * x
                }
            }
            Marginal::LogNormal { mu, sigma } => {
                if x <= 0.0 {
                    f64::NEG_INFINITY
                } else {
                    let z = (x.ln() - mu) / sigma;
                    -x.ln() - sigma.ln() - 0.5 * LN_2PI - 0.5 * z * z
                }
            }
            Marginal::Normal { mean, sd } => {
                let z = (x - mean) / sd;
                -sd.ln() - 0.5 * LN_2PI - 0.5 * z * z
            }
            Marginal::Poisson { rate } => {
                if x <= -0.5 {
                    f64::NEG_INFINITY
                } else {
                    let k = x.round().fmax(0.0);
                    k * rate.ln() - rate - ln_gamma(k + 1.0)
                }
            }
        }
    }

    /// d/dx log-density on the interior of the support.
    pub fn grad_log_pdf(&self, x: f64) -> Result<f64> {
        match self {
            Marginal::Gamma { shape, rate } => {
                if x <= 0.0 {
                    Err(Error::SupportBoundary("gamma support is x > 0"))
                } else {
                    Ok((shape - 1.0) / x - rate)
                }
            }
            Marginal::LogNormal { mu, sigma } => {
                if x <= 0.0 {
                    Err(Error::SupportBoundary("log-normal support is x > 0"))
                } else {
                    Ok((-1.0 - (x.ln() - mu) / (sigma * sigma)) / x)
                }
            }
            Marginal::Normal { mean, sd } => Ok(-(x - mean) / (sd * sd)),
            Marginal::Poisson { rate } => {
                if x <= -0.5 {
                    Err(Error::SupportBoundary("relaxed Poisson support is x > -1/2"))
                } else {
                    // Smooth surrogate; defined for x + 1 > 0, which the
                    // support bound guarantees.
                    Ok(rate.ln() - digamma(x + 1.0))
                }
            }
        }
    }
}

/// A product prior: independent marginals, one per coordinate of θ.
#[derive(Debug, Clone, PartialEq)]
pub struct Prior {
    marginals: Vec<Marginal>,
}

impl Prior {
    pub fn new(marginals: Vec<Marginal>) -> Result<Self> {
        if marginals.is_empty() {
            return Err(Error::InvalidArgument("prior must have at least one marginal"));
        }
        for m in &marginals {
            m.validate()?;
        }
        Ok(Prior { marginals })
    }

    pub fn dim(&self) -> usize {
        self.marginals.len()
    }

    pub fn marginals(&self) -> &[Marginal] {
        &self.marginals
    }

    /// Joint log-density; −∞ if any coordinate is outside its support.
    pub fn log_pdf(&self, theta: &ParameterVector) -> Result<f64> {
        if theta.dim() != self.dim() {
            return Err(Error::ShapeMismatch {
                expected: self.dim(),
                got: theta.dim(),
            });
        }
        let mut total = 0.0;
        for (m, &x) in self.marginals.iter().zip(theta.values()) {
            let lp = m.log_pdf(x);
            if lp == f64::NEG_INFINITY {
                return Ok(f64::NEG_INFINITY);
            }
            total += lp;
        }
        Ok(total)
    }

    /// Gradient of the joint log-density on the interior of the support.
    pub fn grad_log_pdf(&self, theta: &ParameterVector) -> Result<Vec<f64>> {
        if theta.dim() != self.dim() {
            return Err(Error::ShapeMismatch {
                expected: self.dim(),
                got: theta.dim(),
            });
        }
        self.marginals
            .iter()
            .zip(theta.values())
            .map(|(m, &x)| m.grad_log_pdf(x))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stream::derive_stream;
    use alloc::vec;

    fn families() -> Vec<(Marginal, f64, f64)> {
        // (marginal, interior sampling lo, hi)
        vec![
            (Marginal::Gamma { shape: 0.1, rate: 0.1 }, 0.02, 5.0),
            (Marginal::Gamma { shape: 3.0, rate: 2.0 }, 0.05, 6.0),
            (Marginal::LogNormal { mu: 0.0, sigma: 2.0 }, 0.05, 8.0),
            (Marginal::Normal { mean: -1.0, sd: 2.5 }, -8.0, 6.0),
            (Marginal::Poisson { rate: 14.0 }, 0.5, 30.0),
        ]
    }

    #[test]
    fn gradient_matches_finite_differences_at_random_interior_points() {
        let mut stream = derive_stream(314, 0);
        for (marginal, lo, hi) in families() {
            for _ in 0..100 {
                let x = lo + (hi - lo) * stream.uniform();
                let grad = marginal.grad_log_pdf(x).expect("interior point");
                if let Marginal::Poisson { .. } = marginal {
                    // The Poisson density is piecewise constant; its gradient
                    // surrogate is checked against the smooth interpolation
                    // below instead.
                    continue;
                }
                let h = 1e-6 * x.abs().max(1.0);
                let fd = (marginal.log_pdf(x + h) - marginal.log_pdf(x - h)) / (2.0 * h);
                let denom = grad.abs().max(1.0);
                assert!(
                    ((grad - fd) / denom).abs() < 1e-6,
                    "{marginal:?} at x = {x}: grad {grad} vs fd {fd}"
                );
            }
        }
    }

    #[test]
    fn poisson_surrogate_gradient_matches_interpolated_log_pmf() {
        let rate = 14.0;
        let m = Marginal::Poisson { rate };
        // Continuous interpolation: t ln λ − λ − lnΓ(t+1).
        let smooth = |t: f64| t * rate.ln() - rate - ln_gamma(t + 1.0);
        for i in 0..50 {
            let t = 0.3 + i as f64;
            let h = 1e-6 * t.max(1.0);
            let fd = (smooth(t + h) - smooth(t - h)) / (2.0 * h);
            let grad = m.grad_log_pdf(t).unwrap();
            assert!(
                (grad - fd).abs() < 1e-6 * grad.abs().max(1.0),
                "t = {t}: {grad} vs {fd}"
            );
        }
    }

    #[test]
    fn out_of_support_is_neg_infinity_not_error() {
        let gamma = Marginal::Gamma { shape: 2.0, rate: 1.0 };
        assert_eq!(gamma.log_pdf(-0.5), f64::NEG_INFINITY);
        assert_eq!(gamma.log_pdf(0.0), f64::NEG_INFINITY);
        let prior = Prior::new(vec![
            Marginal::Gamma { shape: 2.0, rate: 1.0 },
            Marginal::Normal { mean: 0.0, sd: 1.0 },
        ])
        .unwrap();
        let theta = ParameterVector::new(vec![-1.0, 0.0]).unwrap();
        assert_eq!(prior.log_pdf(&theta).unwrap(), f64::NEG_INFINITY);
    }

    #[test]
    fn gradient_errors_on_support_boundary() {
        let gamma = Marginal::Gamma { shape: 2.0, rate: 1.0 };
        assert!(gamma.grad_log_pdf(0.0).is_err());
        assert!(gamma.grad_log_pdf(-1.0).is_err());
        let lognormal = Marginal::LogNormal { mu: 0.0, sigma: 1.0 };
        assert!(lognormal.grad_log_pdf(0.0).is_err());
    }

    #[test]
    fn log_pdf_integrates_to_one() {
        // Quadrature oracle for normalization, one family at a time.
        let cases: Vec<(Marginal, f64, f64)> = vec![
            (Marginal::Gamma { shape: 3.0, rate: 2.0 }, 1e-9, 40.0),
            (Marginal::LogNormal { mu: 0.3, sigma: 0.8 }, 1e-9, 200.0),
            (Marginal::Normal { mean: 1.0, sd: 2.0 }, -30.0, 30.0),
        ];
        for (m, lo, hi) in cases {
            let n = 400_000usize;
            let h = (hi - lo) / n as f64;
            let mut s = 0.0;
            for i in 0..=n {
                let x = lo + i as f64 * h;
                let w = if i == 0 || i == n {
                    1.0
                } else if i % 2 == 1 {
                    4.0
                } else {
                    2.0
                };
                let lp = m.log_pdf(x);
                if lp > f64::NEG_INFINITY {
                    s += w * lp.exp();
                }
            }
            let integral = s * h / 3.0;
            assert!(
                (integral - 1.0).abs() < 1e-4,
                "{m:?} integrates to {integral}"
            );
        }
    }

    #[test]
    fn poisson_density_mass_matches_pmf_per_unit_cell() {
        let m = Marginal::Poisson { rate: 3.0 };
        // Each cell [k-1/2, k+1/2) carries pmf(k); total over many cells ≈ 1.
        let mut total = 0.0;
        for k in 0..60 {
            total += m.log_pdf(k as f64).exp();
        }
        assert!((total - 1.0).abs() < 1e-10, "total pmf mass {total}");
    }

    #[test]
    fn dimension_mismatch_is_reported() {
        let prior = Prior::new(vec![Marginal::Normal { mean: 0.0, sd: 1.0 }]).unwrap();
        let theta = ParameterVector::new(vec![0.0, 1.0]).unwrap();
        assert!(matches!(
            prior.log_pdf(&theta),
            Err(Error::ShapeMismatch { expected: 1, got: 2 })
        ));
    }
}
