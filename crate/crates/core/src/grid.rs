//! Brute-force least-squares identification over a `(omega_n, zeta)` grid.
//!
//! Slow and simple; used as an independent reference for the filter-based
//! identifier and to fit evaluation plants for records without ground truth.

use alloc::vec::Vec;

use crate::dynamics::{rk4_advance, substeps_for};
use crate::ident::{Identification, Identifier, Observation};
use crate::{CommandSignal, Error, Result, SecondOrderParams};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSearch {
    pub omega_range: (f64, f64),
    pub zeta_range: (f64, f64),
    /// Grid points per axis at each level.
    pub points: usize,
    /// Zoom levels after the first; each narrows the box to two cells around the best point.
    pub refinements: usize,
}

impl GridSearch {
    pub fn new(omega_range: (f64, f64), zeta_range: (f64, f64)) -> Self {
        Self {
            omega_range,
            zeta_range,
            points: 41,
            refinements: 4,
        }
    }

    fn validate(&self) -> Result<()> {
        let (wl, wh) = self.omega_range;
        let (zl, zh) = self.zeta_range;
        if !(wl > 0.0 && wh > wl && zl >= 0.0 && zh > zl && zh < 1.0) {
            return Err(Error::InvalidArgument(
                "grid ranges must be ordered and physical",
            ));
        }
        if self.points < 3 {
            return Err(Error::InvalidArgument(
                "grid needs at least three points per axis",
            ));
        }
        Ok(())
    }

    /// Best grid point and its sum of squared errors.
    pub fn search(
        &self,
        obs: &[Observation],
        command: &CommandSignal,
    ) -> Result<(SecondOrderParams, f64)> {
        self.validate()?;
        if obs.len() < 2 {
            return Err(Error::TooFewSamples {
                needed: 2,
                got: obs.len(),
            });
        }
        let (mut wl, mut wh) = self.omega_range;
        let (mut zl, mut zh) = self.zeta_range;
        let mut best: Option<(SecondOrderParams, f64)> = None;
        for _ in 0..=self.refinements {
            let dw = (wh - wl) / (self.points - 1) as f64;
            let dz = (zh - zl) / (self.points - 1) as f64;
            for i in 0..self.points {
                for j in 0..self.points {
                    let p = SecondOrderParams::new(wl + dw * i as f64, zl + dz * j as f64)?;
                    let cost = sum_squared_error(&p, obs, command);
                    if best.is_none_or(|(_, c)| cost < c) {
                        best = Some((p, cost));
                    }
                }
            }
            let (p, _) = best.expect("grid is non-empty");
            wl = (p.omega_n() - 2.0 * dw).max(self.omega_range.0);
            wh = (p.omega_n() + 2.0 * dw).min(self.omega_range.1);
            zl = (p.zeta() - 2.0 * dz).max(self.zeta_range.0);
            zh = (p.zeta() + 2.0 * dz).min(self.zeta_range.1);
        }
        Ok(best.expect("grid is non-empty"))
    }
}

impl Identifier for GridSearch {
    fn identify(&self, obs: &[Observation], command: &CommandSignal) -> Result<Identification> {
        let (params, _) = self.search(obs, command)?;
        Ok(Identification {
            params,
            convergence: None,
        })
    }
}

/// Simulated trajectory at the observation times, starting at rest from the first measurement.
pub fn predict_at(p: &SecondOrderParams, obs: &[Observation], command: &CommandSignal) -> Vec<f64> {
    let mut out = Vec::with_capacity(obs.len());
    let Some(first) = obs.first() else {
        return out;
    };
    let mut kin = (first.z, 0.0);
    out.push(kin.0);
    for w in obs.windows(2) {
        for (a, b, u) in command.pieces(w[0].t, w[1].t) {
            kin = rk4_advance(
                kin,
                u,
                b - a,
                p.omega_n(),
                p.zeta(),
                substeps_for(b - a, p.omega_n()),
            );
        }
        out.push(kin.0);
    }
    out
}

pub fn sum_squared_error(
    p: &SecondOrderParams,
    obs: &[Observation],
    command: &CommandSignal,
) -> f64 {
    predict_at(p, obs, command)
        .iter()
        .zip(obs)
        .map(|(y, o)| (y - o.z) * (y - o.z))
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::{ident::observations, simulate_response, TimeSeries};

    #[test]
    fn recovers_noiseless_plant() {
        let truth = SecondOrderParams::new(8.0, 0.05).unwrap();
        let u = TimeSeries::constant(0.0, 0.01, 1.0, 300).unwrap();
        let y = simulate_response(&truth, &u, 0.0, 0.0).unwrap();
        let obs = observations(&y);
        let (p, cost) = GridSearch::new((2.0, 20.0), (0.0, 0.5))
            .search(&obs, &CommandSignal::Constant(1.0))
            .unwrap();
        assert!((p.omega_n() - 8.0).abs() < 0.01, "{p:?}");
        assert!((p.zeta() - 0.05).abs() < 0.002, "{p:?}");
        assert!(cost < 1e-3);
    }

    #[test]
    fn rejects_bad_ranges() {
        let g = GridSearch::new((5.0, 1.0), (0.0, 0.5));
        let obs = [Observation::new(0.0, 0.0), Observation::new(1.0, 0.0)];
        assert!(g.search(&obs, &CommandSignal::Constant(0.0)).is_err());
    }
}
