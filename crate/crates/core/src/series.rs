use alloc::vec::Vec;

use crate::{Error, Result};

/// Uniformly sampled signal: sample `k` sits at `t0 + k * dt`.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeries {
    t0: f64,
    dt: f64,
    samples: Vec<f64>,
}

impl TimeSeries {
    pub fn new(t0: f64, dt: f64, samples: Vec<f64>) -> Result<Self> {
        if !t0.is_finite() {
            return Err(Error::InvalidSeries("start time must be finite"));
        }
        if !(dt.is_finite() && dt > 0.0) {
            return Err(Error::InvalidSeries("dt must be positive and finite"));
        }
        if samples.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidSeries("samples must be finite"));
        }
        Ok(Self { t0, dt, samples })
    }

    /// `len` copies of `value`.
    pub fn constant(t0: f64, dt: f64, value: f64, len: usize) -> Result<Self> {
        Self::new(t0, dt, alloc::vec![value; len])
    }

    pub fn t0(&self) -> f64 {
        self.t0
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn into_samples(self) -> Vec<f64> {
        self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn time_at(&self, index: usize) -> f64 {
        self.t0 + index as f64 * self.dt
    }

    pub fn duration(&self) -> f64 {
        self.samples.len().saturating_sub(1) as f64 * self.dt
    }

    /// Iterator over `(time, value)` pairs.
    pub fn iter(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.samples
            .iter()
            .enumerate()
            .map(move |(k, &x)| (self.time_at(k), x))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn validates() {
        assert!(TimeSeries::new(0.0, 0.0, vec![1.0]).is_err());
        assert!(TimeSeries::new(0.0, 0.1, vec![f64::INFINITY]).is_err());
        let s = TimeSeries::new(1.0, 0.5, vec![0.0, 1.0, 2.0]).unwrap();
        assert_eq!(s.time_at(2), 2.0);
        assert_eq!(s.duration(), 1.0);
    }
}
