//! Special functions: log-gamma, regularized incomplete gamma, standard
//! normal CDF and quantile.

use crate::{Error, Result};

const INCGAMMA_MAX_ITER: usize = 1000;
const INCGAMMA_EPS: f64 = 1e-16;
const FPMIN: f64 = 1e-300;

/// Bernoulli-number coefficients B_{2k} / (2k (2k - 1)) of the Stirling series.
const STIRLING: [f64; 8] = [
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360_360.0,
    1.0 / 156.0,
    -3617.0 / 122_400.0,
];

const STIRLING_MIN: f64 = 10.0;
const HALF_LN_TWO_PI: f64 = 0.918_938_533_204_672_8;

/// Natural logarithm of the Gamma function for `x > 0`.
///
/// Arguments below 10 are shifted up with the recurrence
/// `ln Γ(x) = ln Γ(x + k) - ln(x (x + 1) ... (x + k - 1))` and the
/// asymptotic Stirling series is evaluated at `x + k >= 10`.
pub fn log_gamma(x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::Domain(format!("log_gamma requires x > 0, got {x}")));
    }
    Ok(log_gamma_unchecked(x))
}

pub(crate) fn log_gamma_unchecked(x: f64) -> f64 {
    let mut z = x;
    let mut prod = 1.0;
    while z < STIRLING_MIN {
        prod *= z;
        z += 1.0;
    }
    let inv = 1.0 / z;
    let inv2 = inv * inv;
    let mut series = 0.0;
    let mut pow = inv;
    for c in STIRLING {
        series += c * pow;
        pow *= inv2;
    }
    (z - 0.5) * z.ln() - z + HALF_LN_TWO_PI + series - prod.ln()
}

/// Regularized lower incomplete gamma function `P(a, x)`.
pub fn regularized_gamma_p(a: f64, x: f64) -> Result<f64> {
    incomplete_gamma_pair(a, x).map(|(p, _)| p)
}

/// Regularized upper incomplete gamma function `Q(a, x) = 1 - P(a, x)`.
pub fn regularized_gamma_q(a: f64, x: f64) -> Result<f64> {
    incomplete_gamma_pair(a, x).map(|(_, q)| q)
}

/// Both `P(a, x)` and `Q(a, x)`. The series is used below `x = a + 1`,
/// Lentz's continued fraction for `Q` above it, so that the smaller of the
/// two is always computed directly.
pub(crate) fn incomplete_gamma_pair(a: f64, x: f64) -> Result<(f64, f64)> {
    if !(a > 0.0) || !a.is_finite() {
        return Err(Error::Domain(format!("incomplete gamma requires a > 0, got {a}")));
    }
    if !(x >= 0.0) {
        return Err(Error::Domain(format!("incomplete gamma requires x >= 0, got {x}")));
    }
    if x == 0.0 {
        return Ok((0.0, 1.0));
    }
    if x == f64::INFINITY {
        return Ok((1.0, 0.0));
    }
    let log_prefactor = -x + a * x.ln() - log_gamma_unchecked(a);
    if x < a + 1.0 {
        let p = lower_series(a, x, log_prefactor)?;
        Ok((p, 1.0 - p))
    } else {
        let q = upper_continued_fraction(a, x, log_prefactor)?;
        Ok((1.0 - q, q))
    }
}

fn lower_series(a: f64, x: f64, log_prefactor: f64) -> Result<f64> {
    let mut ap = a;
    let mut term = 1.0 / a;
    let mut sum = term;
    for _ in 0..INCGAMMA_MAX_ITER {
        ap += 1.0;
        term *= x / ap;
        sum += term;
        if term.abs() < sum.abs() * INCGAMMA_EPS {
            return Ok((sum.ln() + log_prefactor).exp().min(1.0));
        }
    }
    Err(Error::NoConvergence(format!("incomplete gamma series at a={a}, x={x}")))
}

fn upper_continued_fraction(a: f64, x: f64, log_prefactor: f64) -> Result<f64> {
    let mut b = x + 1.0 - a;
    let mut c = 1.0 / FPMIN;
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 1..=INCGAMMA_MAX_ITER {
        let an = -(i as f64) * (i as f64 - a);
        b += 2.0;
        d = an * d + b;
        if d.abs() < FPMIN {
            d = FPMIN;
        }
        c = b + an / c;
        if c.abs() < FPMIN {
            c = FPMIN;
        }
        d = 1.0 / d;
        let delta = d * c;
        h *= delta;
        if (delta - 1.0).abs() < INCGAMMA_EPS {
            return Ok((log_prefactor + h.ln()).exp().min(1.0));
        }
    }
    Err(Error::NoConvergence(format!("incomplete gamma continued fraction at a={a}, x={x}")))
}

const INV_SQRT_TWO_PI: f64 = 0.398_942_280_401_432_7;

pub(crate) fn std_normal_pdf(z: f64) -> f64 {
    INV_SQRT_TWO_PI * (-0.5 * z * z).exp()
}

/// Standard normal CDF through `Φ(z) = ½ Q(½, z²/2)` for `z < 0`.
pub(crate) fn std_normal_cdf(z: f64) -> f64 {
    if z.is_nan() {
        return f64::NAN;
    }
    if z == 0.0 {
        return 0.5;
    }
    // a = 1/2 is always in range and the iterations converge for every finite z.
    let tail = match incomplete_gamma_pair(0.5, 0.5 * z * z) {
        Ok((_, q)) => 0.5 * q,
        Err(_) => 0.0,
    };
    if z < 0.0 {
        tail
    } else {
        1.0 - tail
    }
}

/// Standard normal quantile: Acklam's rational approximation polished with
/// Halley steps against [`std_normal_cdf`].
pub(crate) fn std_normal_quantile(p: f64) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::Domain(format!("probability must lie in (0, 1), got {p}")));
    }
    const A: [f64; 6] = [
        -3.969_683_028_665_376e1,
        2.209_460_984_245_205e2,
        -2.759_285_104_469_687e2,
        1.383_577_518_672_69e2,
        -3.066_479_806_614_716e1,
        2.506_628_277_459_239,
    ];
    const B: [f64; 5] = [
        -5.447_609_879_822_406e1,
        1.615_858_368_580_409e2,
        -1.556_989_798_598_866e2,
        6.680_131_188_771_972e1,
        -1.328_068_155_288_572e1,
    ];
    const C: [f64; 6] = [
        -7.784_894_002_430_293e-3,
        -3.223_964_580_411_365e-1,
        -2.400_758_277_161_838,
        -2.549_732_539_343_734,
        4.374_664_141_464_968,
        2.938_163_982_698_783,
    ];
    const D: [f64; 4] = [
        7.784_695_709_041_462e-3,
        3.224_671_290_700_398e-1,
        2.445_134_137_142_996,
        3.754_408_661_907_416,
    ];
    const P_LOW: f64 = 0.024_25;

    let tail = |q: f64| {
        (((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5])
            / ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0)
    };
    let mut z = if p < P_LOW {
        tail((-2.0 * p.ln()).sqrt())
    } else if p <= 1.0 - P_LOW {
        let q = p - 0.5;
        let r = q * q;
        (((((A[0] * r + A[1]) * r + A[2]) * r + A[3]) * r + A[4]) * r + A[5]) * q
            / (((((B[0] * r + B[1]) * r + B[2]) * r + B[3]) * r + B[4]) * r + 1.0)
    } else {
        -tail((-2.0 * (-p).ln_1p()).sqrt())
    };
    for _ in 0..3 {
        let err = std_normal_cdf(z) - p;
        let pdf = std_normal_pdf(z);
        if pdf <= 0.0 {
            break;
        }
        let u = err / pdf;
        z -= u / (1.0 + 0.5 * z * u);
    }
    Ok(z)
}
