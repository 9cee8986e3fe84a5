//! The Gamma reference law `Γ(α, λ)` in rate parameterization, with density
//! `λ^α / Γ(α) · x^(α-1) · e^(-λx)` on `x > 0`.

use serde::{Deserialize, Serialize};

use super::special::{incomplete_gamma_pair, log_gamma_unchecked};
use crate::{Error, Result};

const QUANTILE_MAX_ITER: usize = 200;
const QUANTILE_STEP_TOL: f64 = 1e-12;

/// Shape `alpha` and rate `lambda` of a Gamma distribution.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GammaParams {
    pub alpha: f64,
    pub lambda: f64,
}

impl GammaParams {
    pub fn new(alpha: f64, lambda: f64) -> Result<Self> {
        let ok = |v: f64| v > 0.0 && v.is_finite();
        if !ok(alpha) || !ok(lambda) {
            return Err(Error::ParameterDomain(format!(
                "gamma shape and rate must be positive and finite, got alpha={alpha}, lambda={lambda}"
            )));
        }
        Ok(Self { alpha, lambda })
    }

    /// The chi-square law with `dof` degrees of freedom, `Γ(dof/2, 1/2)`.
    pub fn chi_square(dof: u32) -> Result<Self> {
        if dof == 0 {
            return Err(Error::Domain("chi-square needs at least one degree of freedom".into()));
        }
        Self::new(f64::from(dof) / 2.0, 0.5)
    }

    pub fn mean(&self) -> f64 {
        self.alpha / self.lambda
    }

    pub fn variance(&self) -> f64 {
        self.alpha / (self.lambda * self.lambda)
    }

    pub fn pdf(&self, x: f64) -> f64 {
        if x < 0.0 {
            return 0.0;
        }
        if x == 0.0 {
            return match self.alpha {
                a if a < 1.0 => f64::INFINITY,
                1.0 => self.lambda,
                _ => 0.0,
            };
        }
        let ln = self.alpha * self.lambda.ln() + (self.alpha - 1.0) * x.ln()
            - self.lambda * x
            - log_gamma_unchecked(self.alpha);
        ln.exp()
    }

    pub fn cdf(&self, x: f64) -> f64 {
        if !(x > 0.0) {
            return 0.0;
        }
        // alpha > 0 and lambda * x > 0 always satisfy the incomplete-gamma domain.
        incomplete_gamma_pair(self.alpha, self.lambda * x).map_or(f64::NAN, |(p, _)| p)
    }

    fn sf(&self, x: f64) -> f64 {
        if !(x > 0.0) {
            return 1.0;
        }
        incomplete_gamma_pair(self.alpha, self.lambda * x).map_or(f64::NAN, |(_, q)| q)
    }

    /// Inverse CDF by safeguarded Newton iteration inside a bisection bracket
    /// that starts as `[0, mean + 40 sd]`.
    pub fn quantile(&self, p: f64) -> Result<f64> {
        if !(p > 0.0 && p < 1.0) {
            return Err(Error::Domain(format!("probability must lie in (0, 1), got {p}")));
        }
        let mut lo = 0.0;
        let mut hi = self.mean() + 40.0 * self.variance().sqrt();
        while self.cdf(hi) < p {
            lo = hi;
            hi *= 2.0;
            if !hi.is_finite() {
                return Err(Error::NoConvergence(format!("gamma quantile bracket for p={p}")));
            }
        }

        // Residual measured on whichever tail is smaller keeps precision
        // for p close to 1.
        let upper = p > 0.5;
        let residual = |x: f64| if upper { (1.0 - p) - self.sf(x) } else { self.cdf(x) - p };

        let mut x = self.initial_guess(p).clamp(lo, hi);
        if !(x > lo && x < hi) {
            x = 0.5 * (lo + hi);
        }
        for _ in 0..QUANTILE_MAX_ITER {
            let r = residual(x);
            if r == 0.0 {
                return Ok(x);
            }
            if r > 0.0 {
                hi = x;
            } else {
                lo = x;
            }
            let density = self.pdf(x);
            let newton = if density > 0.0 && density.is_finite() { x - r / density } else { f64::NAN };
            let next = if newton > lo && newton < hi { newton } else { 0.5 * (lo + hi) };
            if (next - x).abs() <= QUANTILE_STEP_TOL * x.max(f64::MIN_POSITIVE) || hi - lo <= f64::EPSILON * hi {
                return Ok(next);
            }
            x = next;
        }
        Err(Error::NoConvergence(format!(
            "gamma quantile alpha={}, lambda={}, p={p}",
            self.alpha, self.lambda
        )))
    }

    /// Small-x power law for the lower tail, Wilson-Hilferty elsewhere.
    fn initial_guess(&self, p: f64) -> f64 {
        let a = self.alpha;
        let small = ((p.ln() + log_gamma_unchecked(a + 1.0)) / a).exp();
        let z = super::special::std_normal_quantile(p).unwrap_or(0.0);
        let c = 1.0 / (9.0 * a);
        let wh = a * (1.0 - c + z * c.sqrt()).powi(3);
        let guess = if small < 0.5 * a || !(wh > 0.0) { small } else { wh };
        guess / self.lambda
    }
}

/// Upper-tail critical values of the chi-square law.
pub fn chi_square_quantile(dof: u32, p: f64) -> Result<f64> {
    GammaParams::chi_square(dof)?.quantile(p)
}
