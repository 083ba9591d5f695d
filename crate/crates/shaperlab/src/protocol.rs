//! Repeated random sub-sampling of a record into train/test sets.

use rand::seq::{index, SliceRandom};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::rng::{derive_seed, rng_from_seed};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ProtocolParams {
    pub n_samples: usize,
    pub n_trials: usize,
    pub train_fraction: f64,
}

impl Default for ProtocolParams {
    /// 400 samples, 10 trials, 90 % training.
    fn default() -> Self {
        Self {
            n_samples: 400,
            n_trials: 10,
            train_fraction: 0.9,
        }
    }
}

/// One trial's partition. Indices point into the record and are sorted.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TrialSplit {
    pub trial_index: usize,
    pub train_indices: Vec<usize>,
    pub test_indices: Vec<usize>,
    /// Seed this trial's draw came from.
    pub seed: u64,
}

impl TrialSplit {
    pub fn sample_count(&self) -> usize {
        self.train_indices.len() + self.test_indices.len()
    }
}

/// Draws `n_samples` distinct indices per trial uniformly from
/// `0..dataset_size`, then splits them `train_fraction : 1 - train_fraction`.
///
/// Trial `i` uses seed `derive_seed(seed, i)`.
pub fn make_trial_splits(
    dataset_size: usize,
    params: &ProtocolParams,
    seed: u64,
) -> Result<Vec<TrialSplit>> {
    let ProtocolParams {
        n_samples,
        n_trials,
        train_fraction,
    } = *params;
    if n_samples > dataset_size {
        return Err(Error::InvalidArgument(format!(
            "cannot draw {n_samples} samples from a record of {dataset_size}"
        )));
    }
    if !(train_fraction > 0.0 && train_fraction < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "train fraction must lie in (0, 1), got {train_fraction}"
        )));
    }
    let n_train = (train_fraction * n_samples as f64).round() as usize;
    if n_train == 0 || n_train == n_samples {
        return Err(Error::InvalidArgument(format!(
            "{n_samples} samples at fraction {train_fraction} leave an empty side"
        )));
    }
    Ok((0..n_trials)
        .map(|i| {
            let trial_seed = derive_seed(seed, i as u64);
            let mut rng = rng_from_seed(trial_seed);
            let mut drawn = index::sample(&mut rng, dataset_size, n_samples).into_vec();
            drawn.shuffle(&mut rng);
            let mut train = drawn[..n_train].to_vec();
            let mut test = drawn[n_train..].to_vec();
            train.sort_unstable();
            test.sort_unstable();
            TrialSplit {
                trial_index: i,
                train_indices: train,
                test_indices: test,
                seed: trial_seed,
            }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeSet;

    #[test]
    fn default_protocol_sizes() {
        let splits = make_trial_splits(1000, &ProtocolParams::default(), 42).unwrap();
        assert_eq!(splits.len(), 10);
        for s in &splits {
            assert_eq!(s.train_indices.len(), 360);
            assert_eq!(s.test_indices.len(), 40);
            let all: BTreeSet<usize> = s
                .train_indices
                .iter()
                .chain(&s.test_indices)
                .copied()
                .collect();
            assert_eq!(all.len(), 400);
            assert!(all.iter().all(|&i| i < 1000));
        }
        assert!(splits
            .windows(2)
            .any(|w| w[0].train_indices != w[1].train_indices));
    }

    #[test]
    fn oversampling_rejected() {
        let p = ProtocolParams {
            n_samples: 500,
            ..ProtocolParams::default()
        };
        assert!(make_trial_splits(400, &p, 0).is_err());
    }

    #[test]
    fn deterministic() {
        let p = ProtocolParams::default();
        assert_eq!(
            make_trial_splits(800, &p, 5).unwrap(),
            make_trial_splits(800, &p, 5).unwrap()
        );
        assert_ne!(
            make_trial_splits(800, &p, 5).unwrap(),
            make_trial_splits(800, &p, 6).unwrap()
        );
    }
}
