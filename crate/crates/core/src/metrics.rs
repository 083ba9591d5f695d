use alloc::vec::Vec;
use core::fmt;

#[allow(unused_imports)] // inherent when std is linked
use num_traits::Float;

use crate::{Error, Result};

/// MAX / RMSE / MEAN of the pointwise absolute error, in the units of the inputs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetricsTriple {
    pub max_err: f64,
    pub rmse: f64,
    pub mean_err: f64,
}

pub fn compute_metrics(reference: &[f64], estimate: &[f64]) -> Result<MetricsTriple> {
    if reference.len() != estimate.len() {
        return Err(Error::LengthMismatch {
            left: reference.len(),
            right: estimate.len(),
        });
    }
    if reference.is_empty() {
        return Err(Error::Empty);
    }
    let n = reference.len() as f64;
    let (mut max_err, mut sq, mut abs) = (0.0f64, 0.0, 0.0);
    for (r, e) in reference.iter().zip(estimate) {
        let d = (r - e).abs();
        max_err = max_err.max(d);
        sq += d * d;
        abs += d;
    }
    let rmse = (sq / n).sqrt();
    let mean_err = abs / n;
    // rounding can break the power-mean ordering by an ulp
    let rmse = rmse.min(max_err).max(mean_err.min(max_err));
    Ok(MetricsTriple {
        max_err,
        rmse,
        mean_err: mean_err.min(rmse),
    })
}

/// Sample mean and standard deviation (n - 1 denominator).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeanStd {
    pub mean: f64,
    pub std: f64,
}

impl MeanStd {
    /// Order-independent: values are summed in sorted order.
    pub fn from_values(values: &[f64]) -> Result<Self> {
        if values.len() < 2 {
            return Err(Error::TooFewSamples {
                needed: 2,
                got: values.len(),
            });
        }
        let mut v: Vec<f64> = values.to_vec();
        v.sort_by(f64::total_cmp);
        let n = v.len() as f64;
        let mean = v.iter().sum::<f64>() / n;
        let mut dev: Vec<f64> = v.iter().map(|x| (x - mean) * (x - mean)).collect();
        dev.sort_by(f64::total_cmp);
        let std = (dev.iter().sum::<f64>() / (n - 1.0)).sqrt();
        Ok(Self { mean, std })
    }
}

impl fmt::Display for MeanStd {
    /// `M.MM±S.SS`
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:.2}±{:.2}", self.mean, self.std)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetricsSummary {
    pub max_err: MeanStd,
    pub rmse: MeanStd,
    pub mean_err: MeanStd,
    pub trials: usize,
}

pub fn aggregate_trials(per_trial: &[MetricsTriple]) -> Result<MetricsSummary> {
    let col = |f: fn(&MetricsTriple) -> f64| -> Vec<f64> { per_trial.iter().map(f).collect() };
    Ok(MetricsSummary {
        max_err: MeanStd::from_values(&col(|m| m.max_err))?,
        rmse: MeanStd::from_values(&col(|m| m.rmse))?,
        mean_err: MeanStd::from_values(&col(|m| m.mean_err))?,
        trials: per_trial.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::format;

    #[test]
    fn identical_is_zero() {
        let m = compute_metrics(&[1.0, 2.0], &[1.0, 2.0]).unwrap();
        assert_eq!((m.max_err, m.rmse, m.mean_err), (0.0, 0.0, 0.0));
    }

    #[test]
    fn three_four() {
        let m = compute_metrics(&[0.0, 0.0], &[3.0, 4.0]).unwrap();
        assert_eq!(m.max_err, 4.0);
        assert!((m.rmse - 12.5f64.sqrt()).abs() < 1e-15);
        assert!((m.rmse - 3.53553).abs() < 1e-5);
        assert_eq!(m.mean_err, 3.5);
    }

    #[test]
    fn errors() {
        assert!(matches!(
            compute_metrics(&[1.0], &[]),
            Err(Error::LengthMismatch { .. })
        ));
        assert_eq!(compute_metrics(&[], &[]), Err(Error::Empty));
        let t = MetricsTriple {
            max_err: 1.0,
            rmse: 1.0,
            mean_err: 1.0,
        };
        assert!(aggregate_trials(&[t]).is_err());
    }

    #[test]
    fn aggregation() {
        let t = MetricsTriple {
            max_err: 3.0,
            rmse: 2.0,
            mean_err: 1.0,
        };
        let s = aggregate_trials(&[t; 10]).unwrap();
        assert_eq!((s.max_err.std, s.rmse.std, s.mean_err.std), (0.0, 0.0, 0.0));
        let ms = MeanStd::from_values(&[1.0, 3.0]).unwrap();
        assert_eq!(ms.mean, 2.0);
        assert!((ms.std - 2f64.sqrt()).abs() < 1e-15);
        let cell = MeanStd {
            mean: 40.0,
            std: 0.7,
        };
        assert_eq!(format!("{cell}"), "40.00±0.70");
    }
}
