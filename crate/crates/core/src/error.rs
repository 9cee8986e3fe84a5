use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A distribution parameter lies outside the family's parameter space.
    #[error("parameter outside its domain: {0}")]
    ParameterDomain(String),

    /// A function argument lies outside the function's domain.
    #[error("argument outside its domain: {0}")]
    Domain(String),

    /// The simulated sample cannot be used to estimate parameters.
    #[error("degenerate sample: {0}")]
    DegenerateSample(String),

    /// An expected count fell to or below the configured floor.
    #[error("degenerate cell {cell}: expected count {expected:e} is not above the floor {floor:e}")]
    DegenerateCell { cell: usize, expected: f64, floor: f64 },

    #[error("degenerate moments: mean {mean}, variance {variance}")]
    DegenerateMoments { mean: f64, variance: f64 },

    #[error("iteration did not converge: {0}")]
    NoConvergence(String),

    /// Too many trials were rejected for the moments to be trusted.
    #[error("calibration integrity: {rejected} of {trials} trials rejected (allowed rate {max_rate})")]
    Integrity { rejected: u64, trials: u64, max_rate: f64 },

    #[error("invalid configuration: {0}")]
    Config(String),
}
