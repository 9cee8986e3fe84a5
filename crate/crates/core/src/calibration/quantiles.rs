use crate::{Error, Result};

/// Empirical quantiles by linear interpolation between order statistics at
/// rank `h = (M - 1) p + 1` (the "type 7" convention).
pub fn sample_quantiles(values: &[f64], probs: &[f64]) -> Result<Vec<f64>> {
    if values.is_empty() {
        return Err(Error::Domain("sample quantiles of an empty sample".into()));
    }
    check_probs(probs)?;
    if values.iter().any(|v| v.is_nan()) {
        return Err(Error::Domain("sample contains NaN".into()));
    }
    let mut sorted = values.to_vec();
    sorted.sort_unstable_by(f64::total_cmp);
    Ok(probs.iter().map(|&p| sorted_quantile(&sorted, p)).collect())
}

pub(crate) fn check_probs(probs: &[f64]) -> Result<()> {
    match probs.iter().find(|&&p| !(p > 0.0 && p < 1.0)) {
        Some(p) => Err(Error::Domain(format!("probability must lie in (0, 1), got {p}"))),
        None => Ok(()),
    }
}

/// `sorted` must be ascending and nonempty.
pub(crate) fn sorted_quantile(sorted: &[f64], p: f64) -> f64 {
    let h = (sorted.len() - 1) as f64 * p;
    let lo = h.floor() as usize;
    let hi = (lo + 1).min(sorted.len() - 1);
    let frac = h - lo as f64;
    sorted[lo] + frac * (sorted[hi] - sorted[lo])
}
