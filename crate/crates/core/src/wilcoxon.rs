//! Wilcoxon signed-rank test for paired samples.
//!
//! Zero differences are dropped and tied magnitudes share their average rank.
//! Up to [`EXACT_LIMIT`] non-zero pairs the null distribution is enumerated
//! exactly (counting the `2^n` sign patterns by dynamic programming over rank
//! sums); above it a tie-corrected normal approximation with continuity
//! correction is used.

use alloc::vec::Vec;

#[allow(unused_imports)] // inherent when std is linked
use num_traits::Float;

use crate::{Error, Result};

pub const EXACT_LIMIT: usize = 20;
pub const MIN_PAIRS: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WilcoxonResult {
    /// Rank sum of positive differences `a - b`.
    pub r_plus: f64,
    pub r_minus: f64,
    pub p_two_sided: f64,
    /// `P(R+ >= observed)`: evidence that `a` exceeds `b`.
    pub p_one_sided: f64,
    pub n_effective: usize,
    pub exact: bool,
}

/// Average ranks (1-based) of `values`, ties sharing the mean of their positions.
pub fn average_ranks(values: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&i, &j| values[i].total_cmp(&values[j]));
    let mut ranks = alloc::vec![0.0; values.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && values[order[j + 1]] == values[order[i]] {
            j += 1;
        }
        let r = (i + j + 2) as f64 / 2.0;
        for &k in &order[i..=j] {
            ranks[k] = r;
        }
        i = j + 1;
    }
    ranks
}

/// Null distribution of the positive rank sum given doubled (integer) ranks:
/// entry `s` is `P(2 R+ = s)`.
pub fn doubled_rank_sum_distribution(doubled_ranks: &[usize]) -> Vec<f64> {
    let total: usize = doubled_ranks.iter().sum();
    let mut counts = alloc::vec![0.0f64; total + 1];
    counts[0] = 1.0;
    let mut reach = 0;
    for &r in doubled_ranks {
        for s in (0..=reach).rev() {
            let c = counts[s];
            if c != 0.0 {
                counts[s + r] += c;
            }
        }
        reach += r;
    }
    let scale = 0.5f64.powi(doubled_ranks.len() as i32);
    counts.iter().map(|c| c * scale).collect()
}

/// Tie-free null distribution: entry `s` is `P(R+ = s)` for `n` pairs.
pub fn null_distribution(n: usize) -> Vec<f64> {
    let doubled: Vec<usize> = (1..=n).map(|r| 2 * r).collect();
    doubled_rank_sum_distribution(&doubled)
        .into_iter()
        .step_by(2)
        .collect()
}

pub fn wilcoxon_signed_rank(a: &[f64], b: &[f64]) -> Result<WilcoxonResult> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch {
            left: a.len(),
            right: b.len(),
        });
    }
    if a.iter().chain(b).any(|x| !x.is_finite()) {
        return Err(Error::InvalidArgument("paired samples must be finite"));
    }
    let diffs: Vec<f64> = a
        .iter()
        .zip(b)
        .map(|(x, y)| x - y)
        .filter(|d| *d != 0.0)
        .collect();
    if diffs.is_empty() {
        return Err(Error::AllZeroDifferences);
    }
    let n = diffs.len();
    if n < MIN_PAIRS {
        return Err(Error::TooFewSamples {
            needed: MIN_PAIRS,
            got: n,
        });
    }
    let magnitudes: Vec<f64> = diffs.iter().map(|d| d.abs()).collect();
    let ranks = average_ranks(&magnitudes);
    let r_plus: f64 = ranks
        .iter()
        .zip(&diffs)
        .filter(|(_, d)| **d > 0.0)
        .map(|(r, _)| r)
        .sum();
    let total = (n * (n + 1)) as f64 / 2.0;
    let r_minus = total - r_plus;

    let (upper, lower, exact) = if n <= EXACT_LIMIT {
        let doubled: Vec<usize> = ranks.iter().map(|r| (2.0 * r).round() as usize).collect();
        let pmf = doubled_rank_sum_distribution(&doubled);
        let obs = (2.0 * r_plus).round() as usize;
        let upper: f64 = pmf[obs..].iter().sum();
        let lower: f64 = pmf[..=obs].iter().sum();
        (upper, lower, true)
    } else {
        let nf = n as f64;
        let mean = nf * (nf + 1.0) / 4.0;
        let tie_term: f64 = tie_groups(&magnitudes).map(|t| t * t * t - t).sum::<f64>() / 48.0;
        let sd = (nf * (nf + 1.0) * (2.0 * nf + 1.0) / 24.0 - tie_term).sqrt();
        let upper = normal_sf((r_plus - mean - 0.5) / sd);
        let lower = normal_sf(-(r_plus - mean + 0.5) / sd);
        (upper, lower, false)
    };
    Ok(WilcoxonResult {
        r_plus,
        r_minus,
        p_two_sided: (2.0 * upper.min(lower)).min(1.0),
        p_one_sided: upper.min(1.0),
        n_effective: n,
        exact,
    })
}

fn tie_groups(values: &[f64]) -> impl Iterator<Item = f64> {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let mut sizes = Vec::new();
    let mut i = 0;
    while i < v.len() {
        let mut j = i;
        while j + 1 < v.len() && v[j + 1] == v[i] {
            j += 1;
        }
        sizes.push((j - i + 1) as f64);
        i = j + 1;
    }
    sizes.into_iter()
}

/// Upper tail of the standard normal.
fn normal_sf(z: f64) -> f64 {
    0.5 * libm::erfc(z / core::f64::consts::SQRT_2)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ranks_with_ties() {
        assert_eq!(average_ranks(&[3.0, 1.0, 3.0, 2.0]), [3.5, 1.0, 3.5, 2.0]);
    }

    #[test]
    fn all_positive_twelve() {
        let a: Vec<f64> = (1..=12).map(|k| k as f64 + 10.0).collect();
        let b = alloc::vec![0.0; 12];
        let w = wilcoxon_signed_rank(&a, &b).unwrap();
        assert_eq!(w.r_plus, 78.0);
        assert_eq!(w.r_minus, 0.0);
        assert_eq!(w.p_one_sided, 1.0 / 4096.0);
        assert_eq!(w.p_two_sided, 2.0 / 4096.0);
        assert!(w.exact);
    }

    #[test]
    fn zero_differences() {
        let a = [1.0, 2.0, 3.0, 4.0, 5.0];
        assert_eq!(wilcoxon_signed_rank(&a, &a), Err(Error::AllZeroDifferences));
        assert!(matches!(
            wilcoxon_signed_rank(&a, &[1.0, 2.0, 3.0, 0.0, 0.0]),
            Err(Error::TooFewSamples { .. })
        ));
        assert!(matches!(
            wilcoxon_signed_rank(&a, &a[..4]),
            Err(Error::LengthMismatch { .. })
        ));
    }

    #[test]
    fn normal_approximation_for_large_n() {
        let a: Vec<f64> = (0..30).map(|k| (k as f64 * 0.37).sin()).collect();
        let b: Vec<f64> = (0..30).map(|k| (k as f64 * 0.11).cos() * 0.5).collect();
        let w = wilcoxon_signed_rank(&a, &b).unwrap();
        assert!(!w.exact);
        assert_eq!(w.r_plus + w.r_minus, 465.0);
        assert!(w.p_two_sided > 0.0 && w.p_two_sided <= 1.0);
    }
}
