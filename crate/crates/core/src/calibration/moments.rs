use serde::{Deserialize, Serialize};

/// Streaming count, mean and sum of squared deviations.
///
/// Values are accumulated relative to a shift (the first value seen) so that
/// near-constant streams keep full precision; the reported mean adds the
/// shift back.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct MomentAccumulator {
    count: u64,
    shift: f64,
    mean: f64,
    m2: f64,
}

impl MomentAccumulator {
    pub fn new() -> Self {
        Self::default()
    }

    /// Welford update with `x`.
    pub fn push(&mut self, x: f64) {
        if self.count == 0 {
            self.shift = x;
        }
        self.count += 1;
        let y = x - self.shift;
        let delta = y - self.mean;
        self.mean += delta / self.count as f64;
        self.m2 += delta * (y - self.mean);
    }

    pub fn with(mut self, x: f64) -> Self {
        self.push(x);
        self
    }

    /// Parallel combination, equivalent to having pushed `other`'s values
    /// after this accumulator's.
    pub fn merge(&self, other: &Self) -> Self {
        if other.count == 0 {
            return *self;
        }
        if self.count == 0 {
            return *other;
        }
        let count = self.count + other.count;
        let (na, nb) = (self.count as f64, other.count as f64);
        // other's mean expressed relative to self's shift
        let delta = (other.shift - self.shift) + (other.mean - self.mean);
        let mean = self.mean + delta * (nb / count as f64);
        let m2 = self.m2 + other.m2 + delta * delta * (na * nb / count as f64);
        Self { count, shift: self.shift, mean, m2 }
    }

    pub fn count(&self) -> u64 {
        self.count
    }

    pub fn mean(&self) -> f64 {
        if self.count == 0 {
            0.0
        } else {
            self.shift + self.mean
        }
    }

    /// Sum of squared deviations from the mean.
    pub fn m2(&self) -> f64 {
        self.m2
    }

    /// Sample variance with the `count - 1` divisor; `None` below two values.
    pub fn variance(&self) -> Option<f64> {
        (self.count >= 2).then(|| self.m2 / (self.count - 1) as f64)
    }
}

impl Extend<f64> for MomentAccumulator {
    fn extend<I: IntoIterator<Item = f64>>(&mut self, iter: I) {
        for x in iter {
            self.push(x);
        }
    }
}

impl FromIterator<f64> for MomentAccumulator {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut acc = Self::new();
        acc.extend(iter);
        acc
    }
}
