//! Interval systems covering the real line, cell probabilities and counts.
//!
//! Breakpoints `a_1 < ... < a_{n-1}` define the right-closed cells
//! `(-∞, a_1], (a_1, a_2], ..., (a_{n-1}, ∞)`. An observation equal to a
//! breakpoint belongs to the lower-indexed cell.

use serde::{Deserialize, Serialize};

use crate::distributions::{DistributionFamily, ParamVector};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Partition {
    breakpoints: Vec<f64>,
}

impl Partition {
    pub fn new(breakpoints: Vec<f64>) -> Result<Self> {
        if breakpoints.is_empty() {
            return Err(Error::Config("a partition needs at least one breakpoint (two cells)".into()));
        }
        if breakpoints.iter().any(|b| !b.is_finite()) {
            return Err(Error::Config(format!("breakpoints must be finite, got {breakpoints:?}")));
        }
        if breakpoints.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Config(format!("breakpoints must be strictly increasing, got {breakpoints:?}")));
        }
        Ok(Self { breakpoints })
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    /// Number of cells `n`.
    pub fn cells(&self) -> usize {
        self.breakpoints.len() + 1
    }

    /// Index of the cell containing `x`.
    pub fn cell_of(&self, x: f64) -> usize {
        self.breakpoints.partition_point(|&b| b < x)
    }
}

impl<'de> Deserialize<'de> for Partition {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Raw {
            breakpoints: Vec<f64>,
        }
        let raw = Raw::deserialize(d)?;
        Partition::new(raw.breakpoints).map_err(serde::de::Error::custom)
    }
}

/// Observed cell counts `C_i`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CellCounts {
    counts: Vec<u64>,
    total: u64,
}

impl CellCounts {
    pub fn new(counts: Vec<u64>) -> Self {
        let total = counts.iter().sum();
        Self { counts, total }
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn total(&self) -> u64 {
        self.total
    }
}

/// Cell probabilities `p_i = F(a_i) - F(a_{i-1})` under `F(· | params)`.
pub fn cell_probabilities(family: DistributionFamily, params: &ParamVector, part: &Partition) -> Result<Vec<f64>> {
    family.validate(params)?;
    let mut out = Vec::with_capacity(part.cells());
    cell_probabilities_into(family, params.values(), part, &mut out);
    Ok(out)
}

/// Unvalidated variant writing into `out`. Interior cells are differences of
/// CDF values; the upper tail is taken from the complement of the last
/// breakpoint so every entry is nonnegative.
pub(crate) fn cell_probabilities_into(family: DistributionFamily, params: &[f64], part: &Partition, out: &mut Vec<f64>) {
    out.clear();
    let mut prev = 0.0;
    for &b in &part.breakpoints {
        let c = family.cdf_unchecked(params, b);
        out.push((c - prev).max(0.0));
        prev = c;
    }
    out.push((1.0 - prev).max(0.0));
}

/// Breakpoints at the family quantiles `k/n`, `k = 1..n-1`.
pub fn equiprobable_partition(family: DistributionFamily, params: &ParamVector, n: usize) -> Result<Partition> {
    if n < 2 {
        return Err(Error::Domain(format!("an equiprobable partition needs n >= 2 cells, got {n}")));
    }
    let bps = (1..n)
        .map(|k| family.quantile(params, k as f64 / n as f64))
        .collect::<Result<Vec<_>>>()?;
    Partition::new(bps)
}

pub fn count_cells(sample: &[f64], part: &Partition) -> CellCounts {
    let mut counts = vec![0u64; part.cells()];
    for &x in sample {
        counts[part.cell_of(x)] += 1;
    }
    CellCounts::new(counts)
}
