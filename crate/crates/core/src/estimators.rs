//! Raw-data estimators `θ̂ = T(X)` applied inside each trial.

use serde::{Deserialize, Serialize};

use crate::distributions::{DistributionFamily, ParamVector};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EstimatorMethod {
    /// Maximum likelihood, which coincides with the method of moments for
    /// both families in scope (up to the normal variance divisor).
    #[default]
    MleMoments,
}

/// Divisor used for the normal variance estimate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VarianceDivisor {
    /// `N - 1`.
    #[default]
    Unbiased,
    /// `N`, the maximum-likelihood estimate.
    Mle,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct EstimatorSpec {
    pub family: DistributionFamily,
    #[serde(default)]
    pub method: EstimatorMethod,
    #[serde(default)]
    pub variance_divisor: VarianceDivisor,
}

impl EstimatorSpec {
    pub fn new(family: DistributionFamily) -> Self {
        Self { family, method: EstimatorMethod::MleMoments, variance_divisor: VarianceDivisor::Unbiased }
    }

    pub fn with_variance_divisor(mut self, divisor: VarianceDivisor) -> Self {
        self.variance_divisor = divisor;
        self
    }
}

/// Fits the family's parameters to `sample`.
///
/// Exponential: `θ̂ = 1 / mean`. Normal: `μ̂ = mean` and `σ̂² = Σ(x - μ̂)² / (N - 1)`
/// (or `/ N` with [`VarianceDivisor::Mle`]).
pub fn estimate(spec: &EstimatorSpec, sample: &[f64]) -> Result<ParamVector> {
    let n = sample.len();
    if n < 2 {
        return Err(Error::DegenerateSample(format!("need at least 2 observations, got {n}")));
    }
    let mean = sample.iter().sum::<f64>() / n as f64;
    match (spec.family, spec.method) {
        (DistributionFamily::Exponential, EstimatorMethod::MleMoments) => {
            if !(mean > 0.0) || !mean.is_finite() {
                return Err(Error::DegenerateSample(format!("exponential sample mean {mean}")));
            }
            Ok(ParamVector::exponential(1.0 / mean))
        }
        (DistributionFamily::Normal, EstimatorMethod::MleMoments) => {
            let ss: f64 = sample.iter().map(|&x| (x - mean) * (x - mean)).sum();
            let divisor = match spec.variance_divisor {
                VarianceDivisor::Unbiased => (n - 1) as f64,
                VarianceDivisor::Mle => n as f64,
            };
            let var = ss / divisor;
            if !(var > 0.0) || !var.is_finite() {
                return Err(Error::DegenerateSample(format!("normal sample variance {var}")));
            }
            Ok(ParamVector::normal(mean, var.sqrt()))
        }
    }
}
