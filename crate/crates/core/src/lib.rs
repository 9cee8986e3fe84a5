//! Finite-sample critical values for the Pearson goodness-of-fit statistic.
//!
//! When the parameters of the hypothesised family are fitted from the raw
//! (ungrouped) sample, the Pearson statistic no longer follows the limiting
//! chi-square law with `n - 1 - d` degrees of freedom, and at small or
//! medium sample sizes its quantiles can be noticeably off. This crate
//! simulates the statistic under a prior over the unknown parameter, matches
//! a Gamma distribution to the first two simulated moments, and reports the
//! Gamma quantiles as critical values.
//!
//! The building blocks are layered bottom-up:
//!
//! - [`distributions`]: exponential and normal families, the Gamma and
//!   chi-square reference laws, and the special functions behind them.
//! - [`estimators`]: raw-data estimators used inside every trial.
//! - [`partition`]: interval systems, cell probabilities and cell counts.
//! - [`pearson`]: the statistic and a complete simulated trial.
//! - [`calibration`]: the Monte-Carlo driver, moment accumulation, Gamma
//!   fit, quantiles and density export.
//! - [`presets`]: the published reference configurations.

// `!(x > 0.0)` is used on purpose: it rejects NaN along with the out-of-range values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod calibration;
pub mod distributions;
mod error;
pub mod estimators;
pub mod partition;
pub mod pearson;
pub mod presets;
pub mod rng;
pub mod sample_file;

pub use calibration::{
    density_export, draw_theta, fit_gamma, run_calibration, run_calibration_with_threads,
    sample_quantiles, CalibrationConfig, CalibrationResult, DensityEstimate, MomentAccumulator,
    PriorSpec, QuantileSource,
};
pub use distributions::{
    chi_square_quantile, log_gamma, regularized_gamma_p, regularized_gamma_q, DistributionFamily,
    GammaParams, ParamVector,
};
pub use error::{Error, Result};
pub use estimators::{estimate, EstimatorMethod, EstimatorSpec, VarianceDivisor};
pub use partition::{cell_probabilities, count_cells, equiprobable_partition, CellCounts, Partition};
pub use pearson::{pearson_statistic, run_trial, TrialConfig};
