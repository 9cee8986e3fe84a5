//! Parametric families, the Gamma and chi-square reference laws, and the
//! special functions behind their CDFs and quantiles.

mod gamma;
mod special;

pub use gamma::{chi_square_quantile, GammaParams};
pub use special::{log_gamma, regularized_gamma_p, regularized_gamma_q};

use rand::Rng;
use rand_distr::{Distribution, Exp1, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Hypothesised parametric family `F(· | θ)`.
///
/// The exponential family uses the rate parameterization, density
/// `θ e^(-θx)` on `x > 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DistributionFamily {
    /// One parameter: rate `θ > 0`.
    Exponential,
    /// Two parameters: location `μ` and standard deviation `σ > 0`.
    Normal,
}

impl DistributionFamily {
    /// Parameter dimension `d`.
    pub fn dimension(self) -> usize {
        match self {
            Self::Exponential => 1,
            Self::Normal => 2,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::Exponential => "exponential",
            Self::Normal => "normal",
        }
    }

    pub fn validate(self, params: &ParamVector) -> Result<()> {
        let v = params.values();
        if v.len() != self.dimension() {
            return Err(Error::ParameterDomain(format!(
                "{} family takes {} parameter(s), got {}",
                self.name(),
                self.dimension(),
                v.len()
            )));
        }
        let ok = match self {
            Self::Exponential => v[0] > 0.0 && v[0].is_finite(),
            Self::Normal => v[0].is_finite() && v[1] > 0.0 && v[1].is_finite(),
        };
        if ok {
            Ok(())
        } else {
            Err(Error::ParameterDomain(format!("{} parameters {:?}", self.name(), v)))
        }
    }

    /// `count` i.i.d. draws from `F(· | params)`.
    pub fn sample<R: Rng + ?Sized>(self, params: &ParamVector, count: usize, rng: &mut R) -> Result<Vec<f64>> {
        let mut out = Vec::with_capacity(count);
        self.sample_into(params, count, rng, &mut out)?;
        Ok(out)
    }

    /// Like [`sample`](Self::sample) but reuses `out`'s allocation.
    pub fn sample_into<R: Rng + ?Sized>(
        self,
        params: &ParamVector,
        count: usize,
        rng: &mut R,
        out: &mut Vec<f64>,
    ) -> Result<()> {
        self.validate(params)?;
        if count == 0 {
            return Err(Error::Domain("sample count must be at least 1".into()));
        }
        out.clear();
        let v = params.values();
        match self {
            Self::Exponential => {
                let scale = 1.0 / v[0];
                out.extend((0..count).map(|_| {
                    let e: f64 = Exp1.sample(rng);
                    e * scale
                }));
            }
            Self::Normal => {
                let (mu, sigma) = (v[0], v[1]);
                out.extend((0..count).map(|_| {
                    let z: f64 = StandardNormal.sample(rng);
                    mu + sigma * z
                }));
            }
        }
        Ok(())
    }

    /// `P(X <= x | params)`.
    pub fn cdf(self, params: &ParamVector, x: f64) -> Result<f64> {
        self.validate(params)?;
        Ok(self.cdf_unchecked(params.values(), x))
    }

    pub(crate) fn cdf_unchecked(self, v: &[f64], x: f64) -> f64 {
        match self {
            Self::Exponential => {
                if x <= 0.0 {
                    0.0
                } else {
                    -(-v[0] * x).exp_m1()
                }
            }
            Self::Normal => special::std_normal_cdf((x - v[0]) / v[1]),
        }
    }

    pub fn quantile(self, params: &ParamVector, p: f64) -> Result<f64> {
        self.validate(params)?;
        if !(p > 0.0 && p < 1.0) {
            return Err(Error::Domain(format!("probability must lie in (0, 1), got {p}")));
        }
        let v = params.values();
        Ok(match self {
            Self::Exponential => -(-p).ln_1p() / v[0],
            Self::Normal => v[0] + v[1] * special::std_normal_quantile(p)?,
        })
    }
}

/// A point `θ` of the parameter space.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ParamVector(Vec<f64>);

impl ParamVector {
    pub fn new(values: Vec<f64>) -> Self {
        Self(values)
    }

    pub fn exponential(rate: f64) -> Self {
        Self(vec![rate])
    }

    pub fn normal(mu: f64, sigma: f64) -> Self {
        Self(vec![mu, sigma])
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl From<Vec<f64>> for ParamVector {
    fn from(v: Vec<f64>) -> Self {
        Self(v)
    }
}

impl AsRef<[f64]> for ParamVector {
    fn as_ref(&self) -> &[f64] {
        &self.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::trial_stream;
    use DistributionFamily::{Exponential, Normal};

    fn std_normal() -> ParamVector {
        ParamVector::normal(0.0, 1.0)
    }

    #[test]
    fn dimensions() {
        assert_eq!(Exponential.dimension(), 1);
        assert_eq!(Normal.dimension(), 2);
    }

    #[test]
    fn invalid_parameters_are_rejected() {
        let mut rng = trial_stream(1, 0);
        assert!(matches!(
            Exponential.sample(&ParamVector::exponential(0.0), 5, &mut rng),
            Err(Error::ParameterDomain(_))
        ));
        assert!(Exponential.cdf(&ParamVector::exponential(-1.0), 1.0).is_err());
        assert!(Normal.cdf(&ParamVector::normal(0.0, 0.0), 1.0).is_err());
        assert!(Normal.cdf(&ParamVector::exponential(1.0), 1.0).is_err());
        assert!(Normal.quantile(&std_normal(), 1.5).is_err());
        assert!(Exponential.quantile(&ParamVector::exponential(1.0), 0.0).is_err());
    }

    #[test]
    fn exponential_draws_are_positive() {
        let mut rng = trial_stream(11, 0);
        let xs = Exponential.sample(&ParamVector::exponential(1.0), 5, &mut rng).unwrap();
        assert_eq!(xs.len(), 5);
        assert!(xs.iter().all(|&x| x > 0.0));
    }

    #[test]
    fn sampling_means_within_clt_bound() {
        let m = 1_000_000;
        let mut rng = trial_stream(12, 0);
        let xs = Normal.sample(&std_normal(), m, &mut rng).unwrap();
        let mean = xs.iter().sum::<f64>() / m as f64;
        assert!(mean.abs() < 4e-3, "{mean}");

        let xs = Exponential.sample(&ParamVector::exponential(2.0), m, &mut rng).unwrap();
        let mean = xs.iter().sum::<f64>() / m as f64;
        assert!((mean - 0.5).abs() < 4e-3, "{mean}");
    }

    #[test]
    fn sampling_is_deterministic() {
        let a = Normal.sample(&std_normal(), 100, &mut trial_stream(3, 9)).unwrap();
        let b = Normal.sample(&std_normal(), 100, &mut trial_stream(3, 9)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn empirical_cdf_at_quartiles() {
        let m = 1_000_000usize;
        for (family, params) in [
            (Exponential, ParamVector::exponential(1.7)),
            (Normal, ParamVector::normal(0.3, 2.0)),
        ] {
            let xs = family.sample(&params, m, &mut trial_stream(21, 1)).unwrap();
            for p in [0.25, 0.5, 0.75] {
                let q = family.quantile(&params, p).unwrap();
                let frac = xs.iter().filter(|&&x| x <= q).count() as f64 / m as f64;
                let bound = 4.0 * (p * (1.0 - p) / m as f64).sqrt();
                assert!((frac - p).abs() <= bound, "{family:?} p={p}: {frac}");
            }
        }
    }

    #[test]
    fn cdf_examples() {
        let unit = ParamVector::exponential(1.0);
        assert_eq!(Exponential.cdf(&unit, 0.0).unwrap(), 0.0);
        assert!((Exponential.cdf(&unit, 3f64.ln()).unwrap() - 2.0 / 3.0).abs() < 1e-15);
        assert!((Normal.cdf(&std_normal(), 1.0).unwrap() - 0.841_344_7).abs() < 1e-7);
    }

    #[test]
    fn quantile_examples() {
        let unit = ParamVector::exponential(1.0);
        assert!((Exponential.quantile(&unit, 1.0 / 3.0).unwrap() - 0.405_465_1).abs() < 1e-7);
        assert!((Exponential.quantile(&unit, 2.0 / 3.0).unwrap() - 1.098_612_3).abs() < 1e-7);
        assert!(Normal.quantile(&std_normal(), 0.5).unwrap().abs() < 1e-15);
    }

    #[test]
    fn cdf_is_monotone_with_limits() {
        for (family, params) in [
            (Exponential, ParamVector::exponential(0.4)),
            (Normal, ParamVector::normal(-1.0, 3.0)),
        ] {
            let lo = family.quantile(&params, 1e-6).unwrap();
            let hi = family.quantile(&params, 1.0 - 1e-6).unwrap();
            let mut prev = 0.0;
            for i in 0..1000 {
                let x = lo + (hi - lo) * i as f64 / 999.0;
                let c = family.cdf(&params, x).unwrap();
                assert!(c >= prev);
                prev = c;
            }
            assert!(family.cdf(&params, -1e300).unwrap() < 1e-12);
            assert_eq!(family.cdf(&params, 1e300).unwrap(), 1.0);
        }
    }

    #[test]
    fn quantile_round_trip_grid() {
        for (family, params) in [
            (Exponential, ParamVector::exponential(0.2)),
            (Exponential, ParamVector::exponential(2.0)),
            (Normal, ParamVector::normal(0.5, 1.5)),
            (Normal, ParamVector::normal(-1.0, 0.5)),
        ] {
            for i in 0..=200 {
                let p = 1e-4 + (1.0 - 2e-4) * i as f64 / 200.0;
                let x = family.quantile(&params, p).unwrap();
                assert!((family.cdf(&params, x).unwrap() - p).abs() <= 1e-10, "{family:?} p={p}");
            }
        }
        for i in 0..=200 {
            let p = 1e-4 + (1.0 - 2e-4) * i as f64 / 200.0;
            for (a, l) in [(0.5, 0.5), (0.8175386, 0.617712), (3.0, 0.2)] {
                let g = GammaParams::new(a, l).unwrap();
                assert!((g.cdf(g.quantile(p).unwrap()) - p).abs() <= 1e-10);
            }
        }
    }
}
