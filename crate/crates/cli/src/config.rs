//! On-disk run configuration and manifest.

use std::path::Path;

use gofcal::calibration::{DEFAULT_MAX_REJECTION_RATE, DEFAULT_QUANTILE_PROBS, DEFAULT_RESERVOIR_SIZE};
use gofcal::pearson::DEFAULT_EXPECTED_COUNT_FLOOR;
use gofcal::{
    equiprobable_partition, CalibrationConfig, DistributionFamily, EstimatorSpec, ParamVector, Partition, PriorSpec,
    TrialConfig, VarianceDivisor,
};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::CliError;

/// JSON schema of `--config` files.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub family: DistributionFamily,
    pub sample_size: usize,
    pub partition: PartitionSpec,
    pub prior: PriorSpec,
    pub trials: u64,
    pub seed: u64,
    #[serde(default = "yes")]
    pub retain_samples: bool,
    #[serde(default = "default_probs")]
    pub quantile_probs: Vec<f64>,
    #[serde(default)]
    pub variance_divisor: VarianceDivisor,
    #[serde(default = "default_floor")]
    pub expected_count_floor: f64,
    #[serde(default = "default_rejection")]
    pub max_rejection_rate: f64,
    #[serde(default = "default_reservoir")]
    pub reservoir_size: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum PartitionSpec {
    Breakpoints(Vec<f64>),
    /// Cells of equal probability under the family at `params`.
    Equiprobable { cells: usize, params: Vec<f64> },
}

fn yes() -> bool {
    true
}
fn default_probs() -> Vec<f64> {
    DEFAULT_QUANTILE_PROBS.to_vec()
}
fn default_floor() -> f64 {
    DEFAULT_EXPECTED_COUNT_FLOOR
}
fn default_rejection() -> f64 {
    DEFAULT_MAX_REJECTION_RATE
}
fn default_reservoir() -> usize {
    DEFAULT_RESERVOIR_SIZE
}

impl ConfigFile {
    pub fn resolve(&self) -> Result<CalibrationConfig, CliError> {
        let partition = match &self.partition {
            PartitionSpec::Breakpoints(b) => Partition::new(b.clone())?,
            PartitionSpec::Equiprobable { cells, params } => {
                equiprobable_partition(self.family, &ParamVector::new(params.clone()), *cells)?
            }
        };
        let mut trial = TrialConfig::new(self.family, self.sample_size, partition)?;
        trial.estimator = EstimatorSpec::new(self.family).with_variance_divisor(self.variance_divisor);
        trial.expected_count_floor = self.expected_count_floor;
        let cfg = CalibrationConfig {
            trial,
            prior: self.prior.clone(),
            trials: self.trials,
            seed: self.seed,
            retain_samples: self.retain_samples,
            quantile_probs: self.quantile_probs.clone(),
            max_rejection_rate: self.max_rejection_rate,
            reservoir_size: self.reservoir_size,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    /// Fully resolved form with explicit breakpoints.
    pub fn from_calibration(cfg: &CalibrationConfig) -> Self {
        Self {
            family: cfg.trial.family,
            sample_size: cfg.trial.sample_size,
            partition: PartitionSpec::Breakpoints(cfg.trial.partition.breakpoints().to_vec()),
            prior: cfg.prior.clone(),
            trials: cfg.trials,
            seed: cfg.seed,
            retain_samples: cfg.retain_samples,
            quantile_probs: cfg.quantile_probs.clone(),
            variance_divisor: cfg.trial.estimator.variance_divisor,
            expected_count_floor: cfg.trial.expected_count_floor,
            max_rejection_rate: cfg.max_rejection_rate,
            reservoir_size: cfg.reservoir_size,
        }
    }
}

/// Written next to every set of outputs; can be passed back to `--config`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    pub created: String,
    pub config: ConfigFile,
    pub outputs: Vec<String>,
}

/// Reads either a config file or a manifest, whose `config` member is used.
pub fn load(path: &Path) -> Result<ConfigFile, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::usage(format!("cannot read {}: {e}", path.display())))?;
    let value: Value = serde_json::from_str(&text)
        .map_err(|e| CliError::usage(format!("{} is not valid JSON: {e}", path.display())))?;
    let body = match value {
        Value::Object(mut map) if map.get("config").is_some_and(Value::is_object) => map.remove("config").unwrap_or_default(),
        other => other,
    };
    serde_json::from_value(body).map_err(|e| CliError::usage(format!("invalid config {}: {e}", path.display())))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_config_uses_defaults() {
        let cfg: ConfigFile = serde_json::from_str(
            r#"{"family":"exponential","sample_size":20,"partition":{"breakpoints":[0.5,1.5]},
                "prior":{"uniform_box":{"lower":[0.2],"upper":[2.0]}},"trials":100,"seed":1}"#,
        )
        .unwrap();
        assert!(cfg.retain_samples);
        assert_eq!(cfg.quantile_probs, vec![0.75, 0.9, 0.95, 0.99]);
        let resolved = cfg.resolve().unwrap();
        assert_eq!(ConfigFile::from_calibration(&resolved), cfg);
    }

    #[test]
    fn equiprobable_partition_resolves() {
        let cfg: ConfigFile = serde_json::from_str(
            r#"{"family":"exponential","sample_size":10,"partition":{"equiprobable":{"cells":3,"params":[1.0]}},
                "prior":{"fixed":[1.0]},"trials":100,"seed":1}"#,
        )
        .unwrap();
        let resolved = cfg.resolve().unwrap();
        let b = resolved.trial.partition.breakpoints();
        assert!((b[0] - 1.5f64.ln()).abs() < 1e-15 && (b[1] - 3f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn unknown_fields_are_rejected() {
        let r: Result<ConfigFile, _> = serde_json::from_str(
            r#"{"family":"exponential","sample_size":20,"partition":{"breakpoints":[0.5]},
                "prior":{"fixed":[1.0]},"trials":100,"seed":1,"bogus":3}"#,
        );
        assert!(r.is_err());
    }
}
