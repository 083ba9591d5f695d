use alloc::vec::Vec;

#[allow(unused_imports)] // inherent when std is linked
use num_traits::Float;

use crate::TimeSeries;

/// Command applied to the plant, held between samples (zero-order hold).
#[derive(Debug, Clone, PartialEq)]
pub enum CommandSignal {
    /// Setpoint held for all time.
    Constant(f64),
    /// Sampled command; zero before the first sample, last value held after the end.
    Sampled(TimeSeries),
}

// Slack so that sample instants computed as t0 + k * dt land on k.
const GRID_SLACK: f64 = 1e-9;

impl CommandSignal {
    pub fn value_at(&self, t: f64) -> f64 {
        match self {
            CommandSignal::Constant(level) => *level,
            CommandSignal::Sampled(series) => {
                let s = series.samples();
                if s.is_empty() {
                    return 0.0;
                }
                let pos = (t - series.t0()) / series.dt() + GRID_SLACK;
                if pos < 0.0 {
                    0.0
                } else {
                    let k = pos.floor() as usize;
                    s[k.min(s.len() - 1)]
                }
            }
        }
    }

    /// Final held value.
    pub fn final_value(&self) -> f64 {
        match self {
            CommandSignal::Constant(level) => *level,
            CommandSignal::Sampled(series) => series.samples().last().copied().unwrap_or(0.0),
        }
    }

    /// Splits `[start, end]` into pieces over which the command is constant.
    /// Each piece is `(piece_start, piece_end, value)`.
    pub fn pieces(&self, start: f64, end: f64) -> Vec<(f64, f64, f64)> {
        let mut out = Vec::new();
        match self {
            CommandSignal::Constant(level) => out.push((start, end, *level)),
            CommandSignal::Sampled(series) => {
                let (t0, dt, n) = (series.t0(), series.dt(), series.len());
                let mut a = start;
                // sample boundaries strictly inside (start, end)
                let first = ((start - t0) / dt + GRID_SLACK).floor() + 1.0;
                let mut k = if first < 0.0 { 0.0 } else { first };
                while (k as usize) < n {
                    let b = t0 + k * dt;
                    if b >= end - GRID_SLACK * dt {
                        break;
                    }
                    if b > a + GRID_SLACK * dt {
                        out.push((a, b, self.value_at(a)));
                        a = b;
                    }
                    k += 1.0;
                }
                out.push((a, end, self.value_at(a)));
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn zero_order_hold() {
        let s = TimeSeries::new(0.0, 0.1, vec![1.0, 2.0, 3.0]).unwrap();
        let c = CommandSignal::Sampled(s);
        assert_eq!(c.value_at(-0.05), 0.0);
        assert_eq!(c.value_at(0.0), 1.0);
        assert_eq!(c.value_at(0.1), 2.0);
        assert_eq!(c.value_at(0.15), 2.0);
        assert_eq!(c.value_at(5.0), 3.0);
        assert_eq!(c.final_value(), 3.0);
    }

    #[test]
    fn pieces_split_on_sample_boundaries() {
        let s = TimeSeries::new(0.0, 0.1, vec![1.0, 2.0, 3.0]).unwrap();
        let c = CommandSignal::Sampled(s);
        let p = c.pieces(0.05, 0.35);
        assert_eq!(p.len(), 3);
        assert_eq!(p[0].2, 1.0);
        assert_eq!(p[1].2, 2.0);
        assert_eq!(p[2].2, 3.0);
        assert!((p[2].1 - 0.35).abs() < 1e-15);
        assert_eq!(
            CommandSignal::Constant(4.0).pieces(0.0, 1.0),
            vec![(0.0, 1.0, 4.0)]
        );
    }
}
