//! Monte-Carlo calibration: randomize the true parameter over a prior,
//! simulate the statistic, match a Gamma law to its first two moments and
//! report quantiles.

mod density;
mod moments;
mod quantiles;

pub use density::{density_export, DensityEstimate};
pub use moments::MomentAccumulator;
pub use quantiles::sample_quantiles;

use std::collections::BinaryHeap;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::distributions::{DistributionFamily, GammaParams, ParamVector};
use crate::pearson::{TrialConfig, TrialScratch};
use crate::rng::{reservoir_key, trial_stream};
use crate::{Error, Result};

pub const DEFAULT_QUANTILE_PROBS: [f64; 4] = [0.75, 0.9, 0.95, 0.99];
pub const DEFAULT_MAX_REJECTION_RATE: f64 = 1e-3;
pub const DEFAULT_RESERVOIR_SIZE: usize = 100_000;

/// Trials per work unit. Fixed so that the reduction tree, and therefore
/// every floating-point result, is the same for any number of workers.
const BLOCK_TRIALS: u64 = 4096;

/// Distribution of the true parameter across trials.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PriorSpec {
    Fixed(ParamVector),
    /// Independent uniforms on `[lower_k, upper_k)`.
    UniformBox { lower: Vec<f64>, upper: Vec<f64> },
}

impl PriorSpec {
    pub fn validate(&self, family: DistributionFamily) -> Result<()> {
        match self {
            Self::Fixed(p) => family.validate(p),
            Self::UniformBox { lower, upper } => {
                if lower.len() != family.dimension() || upper.len() != family.dimension() {
                    return Err(Error::Config(format!(
                        "prior box has {}/{} bounds, the {} family has {} parameter(s)",
                        lower.len(),
                        upper.len(),
                        family.name(),
                        family.dimension()
                    )));
                }
                if lower.iter().zip(upper).any(|(l, u)| !(l < u)) {
                    return Err(Error::Config(format!("prior box needs lower < upper, got {lower:?} / {upper:?}")));
                }
                family.validate(&ParamVector::new(lower.clone()))?;
                family.validate(&ParamVector::new(upper.clone()))
            }
        }
    }
}

pub fn draw_theta<R: Rng + ?Sized>(prior: &PriorSpec, rng: &mut R) -> ParamVector {
    match prior {
        PriorSpec::Fixed(p) => p.clone(),
        PriorSpec::UniformBox { lower, upper } => ParamVector::new(
            lower
                .iter()
                .zip(upper)
                .map(|(&l, &u)| {
                    let v = l + (u - l) * rng.random::<f64>();
                    v.min(u)
                })
                .collect(),
        ),
    }
}

/// Moment matching: `α = mean² / variance`, `λ = mean / variance`.
pub fn fit_gamma(mean: f64, variance: f64) -> Result<GammaParams> {
    if !(mean > 0.0 && variance > 0.0) || !mean.is_finite() || !variance.is_finite() {
        return Err(Error::DegenerateMoments { mean, variance });
    }
    GammaParams::new(mean * mean / variance, mean / variance)
}

fn default_true() -> bool {
    true
}

fn default_probs() -> Vec<f64> {
    DEFAULT_QUANTILE_PROBS.to_vec()
}

fn default_max_rejection_rate() -> f64 {
    DEFAULT_MAX_REJECTION_RATE
}

fn default_reservoir_size() -> usize {
    DEFAULT_RESERVOIR_SIZE
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CalibrationConfig {
    pub trial: TrialConfig,
    pub prior: PriorSpec,
    /// Number of Monte-Carlo trials `M`.
    pub trials: u64,
    pub seed: u64,
    /// Keep every simulated statistic for exact sample quantiles and density
    /// export. When off, quantiles come from a bottom-k reservoir.
    #[serde(default = "default_true")]
    pub retain_samples: bool,
    #[serde(default = "default_probs")]
    pub quantile_probs: Vec<f64>,
    #[serde(default = "default_max_rejection_rate")]
    pub max_rejection_rate: f64,
    #[serde(default = "default_reservoir_size")]
    pub reservoir_size: usize,
}

impl CalibrationConfig {
    pub fn new(trial: TrialConfig, prior: PriorSpec, trials: u64, seed: u64) -> Self {
        Self {
            trial,
            prior,
            trials,
            seed,
            retain_samples: true,
            quantile_probs: default_probs(),
            max_rejection_rate: DEFAULT_MAX_REJECTION_RATE,
            reservoir_size: DEFAULT_RESERVOIR_SIZE,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.trial.validate()?;
        self.prior.validate(self.trial.family)?;
        if self.trials < 2 {
            return Err(Error::Config(format!("at least 2 trials are needed, got {}", self.trials)));
        }
        if self.quantile_probs.iter().any(|&p| !(p > 0.0 && p < 1.0)) {
            return Err(Error::Config(format!("quantile probabilities must lie in (0, 1): {:?}", self.quantile_probs)));
        }
        if self.quantile_probs.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Config(format!("quantile probabilities must be increasing: {:?}", self.quantile_probs)));
        }
        if !(0.0..=1.0).contains(&self.max_rejection_rate) {
            return Err(Error::Config(format!("max_rejection_rate {} outside [0, 1]", self.max_rejection_rate)));
        }
        if !self.retain_samples && self.reservoir_size < 2 {
            return Err(Error::Config("reservoir_size must be at least 2".into()));
        }
        Ok(())
    }
}

/// Where the reported sample quantiles came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum QuantileSource {
    /// Every completed trial.
    Exact,
    /// A uniform subsample of the given size.
    Reservoir { size: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CalibrationResult {
    pub trials_requested: u64,
    pub trials_completed: u64,
    pub trials_rejected: u64,
    pub mean_x2: f64,
    pub var_x2: f64,
    pub gamma: GammaParams,
    pub quantile_probs: Vec<f64>,
    pub sample_quantiles: Vec<f64>,
    pub sample_quantile_source: QuantileSource,
    pub gamma_quantiles: Vec<f64>,
    pub chisq_dof: u32,
    pub chisq_quantiles: Vec<f64>,
    /// Completed statistics in trial order, when retained.
    #[serde(skip)]
    pub samples: Option<Vec<f64>>,
}

/// Runs the calibration on the current rayon pool.
pub fn run_calibration(cfg: &CalibrationConfig) -> Result<CalibrationResult> {
    cfg.validate()?;
    let blocks = cfg.trials.div_ceil(BLOCK_TRIALS);
    let partials: Vec<Result<Block>> = (0..blocks).into_par_iter().map(|b| run_block(cfg, b)).collect();

    let mut acc = MomentAccumulator::new();
    let mut rejected = 0;
    let mut samples = cfg.retain_samples.then(|| Vec::with_capacity(cfg.trials as usize));
    let mut reservoir = Reservoir::new(if cfg.retain_samples { 0 } else { cfg.reservoir_size });
    for block in partials {
        let block = block?;
        acc = acc.merge(&block.acc);
        rejected += block.rejected;
        if let Some(all) = samples.as_mut() {
            all.extend_from_slice(&block.samples);
        }
        reservoir.absorb(block.reservoir);
    }
    finish(cfg, acc, rejected, samples, reservoir)
}

/// Runs the calibration on a dedicated pool of `threads` workers. The
/// result does not depend on `threads`.
pub fn run_calibration_with_threads(cfg: &CalibrationConfig, threads: usize) -> Result<CalibrationResult> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads.max(1))
        .build()
        .map_err(|e| Error::Config(format!("cannot start worker pool: {e}")))?;
    pool.install(|| run_calibration(cfg))
}

struct Block {
    acc: MomentAccumulator,
    rejected: u64,
    samples: Vec<f64>,
    reservoir: Reservoir,
}

fn run_block(cfg: &CalibrationConfig, block: u64) -> Result<Block> {
    let start = block * BLOCK_TRIALS;
    let end = (start + BLOCK_TRIALS).min(cfg.trials);
    let mut scratch = TrialScratch::default();
    let mut out = Block {
        acc: MomentAccumulator::new(),
        rejected: 0,
        samples: Vec::with_capacity(if cfg.retain_samples { (end - start) as usize } else { 0 }),
        reservoir: Reservoir::new(if cfg.retain_samples { 0 } else { cfg.reservoir_size }),
    };
    for k in start..end {
        let mut rng = trial_stream(cfg.seed, k);
        let theta = draw_theta(&cfg.prior, &mut rng);
        match cfg.trial.run(&theta, &mut rng, &mut scratch) {
            Ok(x2) => {
                out.acc.push(x2);
                if cfg.retain_samples {
                    out.samples.push(x2);
                } else {
                    out.reservoir.offer(reservoir_key(cfg.seed, k), x2);
                }
            }
            Err(Error::DegenerateSample(_) | Error::DegenerateCell { .. }) => out.rejected += 1,
            Err(e) => return Err(e),
        }
    }
    Ok(out)
}

fn finish(
    cfg: &CalibrationConfig,
    acc: MomentAccumulator,
    rejected: u64,
    samples: Option<Vec<f64>>,
    reservoir: Reservoir,
) -> Result<CalibrationResult> {
    if rejected as f64 > cfg.max_rejection_rate * cfg.trials as f64 {
        return Err(Error::Integrity { rejected, trials: cfg.trials, max_rate: cfg.max_rejection_rate });
    }
    let mean = acc.mean();
    let variance = acc.variance().ok_or(Error::DegenerateMoments { mean, variance: f64::NAN })?;
    let gamma = fit_gamma(mean, variance)?;
    debug_assert!((gamma.mean() - mean).abs() <= 1e-10 * mean);
    debug_assert!((gamma.variance() - variance).abs() <= 1e-10 * variance);

    let probs = &cfg.quantile_probs;
    let (sample_quantiles, source) = match &samples {
        Some(all) => (sample_quantiles(all, probs)?, QuantileSource::Exact),
        None => {
            let sub = reservoir.into_values();
            let size = sub.len();
            (sample_quantiles(&sub, probs)?, QuantileSource::Reservoir { size })
        }
    };
    let gamma_quantiles = probs.iter().map(|&p| gamma.quantile(p)).collect::<Result<Vec<_>>>()?;
    let chisq_dof = cfg.trial.chi_square_dof();
    let chisq = GammaParams::chi_square(chisq_dof)?;
    let chisq_quantiles = probs.iter().map(|&p| chisq.quantile(p)).collect::<Result<Vec<_>>>()?;

    Ok(CalibrationResult {
        trials_requested: cfg.trials,
        trials_completed: acc.count(),
        trials_rejected: rejected,
        mean_x2: mean,
        var_x2: variance,
        gamma,
        quantile_probs: probs.clone(),
        sample_quantiles,
        sample_quantile_source: source,
        gamma_quantiles,
        chisq_dof,
        chisq_quantiles,
        samples,
    })
}

/// Bottom-k sample: keeps the values whose keys are the `capacity` smallest.
/// Mergeable, so the kept set does not depend on how trials were split.
struct Reservoir {
    capacity: usize,
    heap: BinaryHeap<(u64, OrderedValue)>,
}

#[derive(Debug, Clone, Copy)]
struct OrderedValue(f64);

impl PartialEq for OrderedValue {
    fn eq(&self, other: &Self) -> bool {
        self.0.total_cmp(&other.0).is_eq()
    }
}
impl Eq for OrderedValue {}
impl PartialOrd for OrderedValue {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for OrderedValue {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.0.total_cmp(&other.0)
    }
}

impl Reservoir {
    fn new(capacity: usize) -> Self {
        Self { capacity, heap: BinaryHeap::new() }
    }

    fn offer(&mut self, key: u64, value: f64) {
        if self.capacity == 0 {
            return;
        }
        if self.heap.len() < self.capacity {
            self.heap.push((key, OrderedValue(value)));
        } else if let Some(mut top) = self.heap.peek_mut() {
            if key < top.0 {
                *top = (key, OrderedValue(value));
            }
        }
    }

    fn absorb(&mut self, other: Reservoir) {
        for (k, v) in other.heap {
            self.offer(k, v.0);
        }
    }

    fn into_values(self) -> Vec<f64> {
        self.heap.into_sorted_vec().into_iter().map(|(_, v)| v.0).collect()
    }
}
