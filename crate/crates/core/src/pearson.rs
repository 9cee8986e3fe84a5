//! The Pearson statistic with parameters fitted from the raw sample, and a
//! complete simulated trial.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::distributions::{DistributionFamily, ParamVector};
use crate::estimators::{estimate, EstimatorSpec};
use crate::partition::{cell_probabilities_into, CellCounts, Partition};
use crate::{Error, Result};

pub const DEFAULT_EXPECTED_COUNT_FLOOR: f64 = 1e-8;

fn default_floor() -> f64 {
    DEFAULT_EXPECTED_COUNT_FLOOR
}

/// Everything needed to simulate one value of the statistic, apart from the
/// true parameter.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialConfig {
    pub family: DistributionFamily,
    pub sample_size: usize,
    pub partition: Partition,
    pub estimator: EstimatorSpec,
    #[serde(default = "default_floor")]
    pub expected_count_floor: f64,
    /// Compute expected counts at this fixed parameter instead of the
    /// per-trial estimate. Used to check the simulation against exact
    /// multinomial enumeration.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fitted_override: Option<ParamVector>,
}

impl TrialConfig {
    pub fn new(family: DistributionFamily, sample_size: usize, partition: Partition) -> Result<Self> {
        let cfg = Self {
            family,
            sample_size,
            partition,
            estimator: EstimatorSpec::new(family),
            expected_count_floor: DEFAULT_EXPECTED_COUNT_FLOOR,
            fitted_override: None,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.sample_size < 2 {
            return Err(Error::Config(format!("sample size must be at least 2, got {}", self.sample_size)));
        }
        let d = self.family.dimension();
        if self.partition.cells() < d + 2 {
            return Err(Error::Config(format!(
                "{} cells leave no degrees of freedom for a {d}-parameter family",
                self.partition.cells()
            )));
        }
        if self.estimator.family != self.family {
            return Err(Error::Config(format!(
                "estimator is for the {} family but the trial samples {}",
                self.estimator.family.name(),
                self.family.name()
            )));
        }
        if !(self.expected_count_floor > 0.0) {
            return Err(Error::Config("expected_count_floor must be positive".into()));
        }
        if let Some(p) = &self.fitted_override {
            self.family.validate(p)?;
        }
        Ok(())
    }

    /// Degrees of freedom `n - 1 - d` of the limiting chi-square reference.
    pub fn chi_square_dof(&self) -> u32 {
        (self.partition.cells() - 1 - self.family.dimension()) as u32
    }

    /// One trial: draw `X ~ F(· | true_params)^N`, estimate `θ̂`, count cells
    /// and evaluate the statistic with `Q_i = N p_i(θ̂)`.
    pub fn run<R: Rng + ?Sized>(&self, true_params: &ParamVector, rng: &mut R, scratch: &mut TrialScratch) -> Result<f64> {
        let n = self.sample_size;
        self.family.sample_into(true_params, n, rng, &mut scratch.sample)?;

        let fitted = match &self.fitted_override {
            Some(p) => p.clone(),
            None => estimate(&self.estimator, &scratch.sample)?,
        };

        scratch.counts.clear();
        scratch.counts.resize(self.partition.cells(), 0);
        for &x in &scratch.sample {
            scratch.counts[self.partition.cell_of(x)] += 1;
        }

        cell_probabilities_into(self.family, fitted.values(), &self.partition, &mut scratch.expected);
        for q in &mut scratch.expected {
            *q *= n as f64;
        }
        statistic(&scratch.counts, &scratch.expected, self.expected_count_floor)
    }
}

/// Reusable buffers for [`TrialConfig::run`].
#[derive(Debug, Default, Clone)]
pub struct TrialScratch {
    sample: Vec<f64>,
    counts: Vec<u64>,
    expected: Vec<f64>,
}

/// See [`TrialConfig::run`]. Allocates fresh buffers on every call.
pub fn run_trial<R: Rng + ?Sized>(cfg: &TrialConfig, true_params: &ParamVector, rng: &mut R) -> Result<f64> {
    cfg.run(true_params, rng, &mut TrialScratch::default())
}

/// `Σ (C_i - Q_i)² / Q_i` with the default expected-count floor.
pub fn pearson_statistic(counts: &CellCounts, expected: &[f64]) -> Result<f64> {
    pearson_statistic_with_floor(counts, expected, DEFAULT_EXPECTED_COUNT_FLOOR)
}

pub fn pearson_statistic_with_floor(counts: &CellCounts, expected: &[f64], floor: f64) -> Result<f64> {
    if counts.counts().len() != expected.len() {
        return Err(Error::Domain(format!(
            "{} counts but {} expected values",
            counts.counts().len(),
            expected.len()
        )));
    }
    let total = counts.total() as f64;
    let sum: f64 = expected.iter().sum();
    if (sum - total).abs() > 1e-6 * total {
        return Err(Error::Domain(format!("expected counts sum to {sum}, observed total is {total}")));
    }
    statistic(counts.counts(), expected, floor)
}

fn statistic(counts: &[u64], expected: &[f64], floor: f64) -> Result<f64> {
    let mut x2 = 0.0;
    for (cell, (&c, &q)) in counts.iter().zip(expected).enumerate() {
        if !(q > floor) {
            return Err(Error::DegenerateCell { cell, expected: q, floor });
        }
        let d = c as f64 - q;
        x2 += d * d / q;
    }
    Ok(x2)
}
