//! Joint state/parameter identification of `(omega_n, zeta)` with the UKF.
//!
//! The filter state is `[y, y', omega_n, zeta]`: the kinematic pair follows
//! the plant dynamics under the known command, the two parameters follow a
//! random walk, and only `y` is measured. One epoch is a full filtering pass
//! over the observations; each epoch restarts the kinematics from the first
//! measurement and the parameters from the previous epoch's estimate.

use alloc::vec::Vec;

use nalgebra::{DMatrix, DVector};

#[allow(unused_imports)] // inherent when std is linked
use num_traits::Float;

use crate::dynamics::{rk4_advance, substeps_for};
use crate::ukf::{ukf_predict, ukf_update};
use crate::{CommandSignal, Error, Result, SecondOrderParams, TimeSeries, UkfConfig, UkfState};

/// Index of each component in the augmented state.
pub mod state_index {
    pub const POSITION: usize = 0;
    pub const VELOCITY: usize = 1;
    pub const OMEGA_N: usize = 2;
    pub const ZETA: usize = 3;
}

pub const STATE_DIM: usize = 4;
pub const MIN_OMEGA_N: f64 = 0.01;
pub const MAX_ZETA: f64 = 0.99;
pub const MIN_OBSERVATIONS: usize = 10;

/// One displacement measurement.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Observation {
    pub t: f64,
    pub z: f64,
}

impl Observation {
    pub fn new(t: f64, z: f64) -> Self {
        Self { t, z }
    }
}

/// All samples of a series as observations.
pub fn observations(series: &TimeSeries) -> Vec<Observation> {
    series.iter().map(|(t, z)| Observation::new(t, z)).collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct IdentifyConfig {
    pub filter: UkfConfig,
    /// Initial standard deviations of `[y, y', omega_n, zeta]`. When unset
    /// they are derived from the observation noise, the data span and the guess.
    pub initial_std: Option<[f64; STATE_DIM]>,
}

impl IdentifyConfig {
    /// Default filter with the measurement noise set to `sigma` mm.
    pub fn with_sensor_noise(sigma: f64) -> Result<Self> {
        if !(sigma > 0.0 && sigma.is_finite()) {
            return Err(Error::InvalidConfig("sensor noise must be positive"));
        }
        let q = DMatrix::from_diagonal(&DVector::from_column_slice(&[1e-8, 1e-8, 1e-4, 1e-6]));
        let r = DMatrix::from_element(1, 1, sigma * sigma);
        Ok(Self {
            filter: UkfConfig::new(q, r)?,
            initial_std: None,
        })
    }

    pub fn validate(&self) -> Result<()> {
        self.filter.validate()?;
        if self.filter.state_dim() != STATE_DIM || self.filter.obs_dim() != 1 {
            return Err(Error::InvalidConfig(
                "identification needs a 4-state, 1-output filter",
            ));
        }
        if let Some(std) = self.initial_std {
            if std.iter().any(|s| !(s.is_finite() && *s >= 0.0)) {
                return Err(Error::InvalidConfig(
                    "initial standard deviations must be >= 0",
                ));
            }
        }
        Ok(())
    }

    fn initial_covariance(&self, guess: &SecondOrderParams, obs: &[Observation]) -> DMatrix<f64> {
        let std = self.initial_std.unwrap_or_else(|| {
            let (lo, hi) = obs
                .iter()
                .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), o| {
                    (a.min(o.z), b.max(o.z))
                });
            let span = (hi - lo).max(1e-6);
            [
                self.filter.observation_noise[(0, 0)].sqrt(),
                0.1 * guess.omega_n() * span,
                0.25 * guess.omega_n(),
                0.1,
            ]
        });
        DMatrix::from_diagonal(&DVector::from_iterator(
            STATE_DIM,
            std.iter().map(|s| s * s),
        ))
    }
}

impl Default for IdentifyConfig {
    /// Sensor noise 0.1 mm.
    fn default() -> Self {
        Self::with_sensor_noise(0.1).expect("default configuration is valid")
    }
}

/// Why the epoch loop stopped.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StopReason {
    /// Epoch error fell below the tolerance.
    ErrorBelowTolerance,
    /// Epoch-over-epoch improvement fell below the tolerance.
    ImprovementBelowTolerance,
    MaxEpochs,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EpochRecord {
    pub epoch: usize,
    /// Sum of absolute one-step prediction errors over the pass.
    pub error: f64,
    pub omega_n: f64,
    pub zeta: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Convergence {
    /// Accepted passes. The returned estimate is the last one.
    pub epochs: Vec<EpochRecord>,
    pub stop: StopReason,
    /// Set when the final estimate sits on a clamp bound.
    pub clamp_warning: bool,
    /// A final pass that did worse than its predecessor and was discarded.
    pub rejected: Option<EpochRecord>,
    /// Largest covariance asymmetry seen over the run.
    pub max_asymmetry: f64,
    /// Smallest covariance eigenvalue seen over the run.
    pub min_eigenvalue: f64,
}

impl Convergence {
    pub fn errors(&self) -> impl Iterator<Item = f64> + '_ {
        self.epochs.iter().map(|e| e.error)
    }
}

/// Sum of `|z - z_hat|` over paired measurement/prediction sequences.
pub fn training_error(measurements: &[f64], predictions: &[f64]) -> Result<f64> {
    if measurements.len() != predictions.len() {
        return Err(Error::LengthMismatch {
            left: measurements.len(),
            right: predictions.len(),
        });
    }
    if measurements.is_empty() {
        return Err(Error::Empty);
    }
    Ok(measurements
        .iter()
        .zip(predictions)
        .map(|(z, p)| (z - p).abs())
        .sum())
}

/// Identifies the plant from a uniformly sampled displacement record.
pub fn identify_parameters(
    data: &TimeSeries,
    command: &CommandSignal,
    initial_guess: &SecondOrderParams,
    cfg: &IdentifyConfig,
) -> Result<(SecondOrderParams, Convergence)> {
    identify_observations(&observations(data), command, initial_guess, cfg)
}

/// Identifies the plant from time-ordered, possibly irregular, observations.
pub fn identify_observations(
    obs: &[Observation],
    command: &CommandSignal,
    initial_guess: &SecondOrderParams,
    cfg: &IdentifyConfig,
) -> Result<(SecondOrderParams, Convergence)> {
    use state_index::*;

    cfg.validate()?;
    if obs.len() < MIN_OBSERVATIONS {
        return Err(Error::TooFewSamples {
            needed: MIN_OBSERVATIONS,
            got: obs.len(),
        });
    }
    if obs.iter().any(|o| !o.t.is_finite() || !o.z.is_finite()) {
        return Err(Error::InvalidSeries("observations must be finite"));
    }
    if obs.windows(2).any(|w| w[1].t <= w[0].t) {
        return Err(Error::InvalidSeries(
            "observation times must be strictly increasing",
        ));
    }

    let filter = &cfg.filter;
    let observe = |x: &DVector<f64>| DVector::from_element(1, x[POSITION]);
    let mut params = *initial_guess;
    let mut epochs: Vec<EpochRecord> = Vec::new();
    let mut max_asym: f64 = 0.0;
    let mut min_eig = f64::INFINITY;
    let mut stop = StopReason::MaxEpochs;
    let mut clamped = false;
    let mut rejected = None;

    for epoch in 1..=filter.max_epochs {
        let mean = DVector::from_column_slice(&[obs[0].z, 0.0, params.omega_n(), params.zeta()]);
        let mut state = UkfState {
            mean,
            covariance: cfg.initial_covariance(&params, obs),
        };
        let mut error = 0.0;
        for w in obs.windows(2) {
            let (t_prev, cur) = (w[0].t, w[1]);
            let pieces = command.pieces(t_prev, cur.t);
            let substeps = substeps_for(cur.t - t_prev, state.mean[OMEGA_N]);
            let transition = |x: &DVector<f64>| {
                let mut kin = (x[POSITION], x[VELOCITY]);
                for &(a, b, u) in &pieces {
                    let n = substeps_for(b - a, x[OMEGA_N]).min(substeps).max(1);
                    kin = rk4_advance(kin, u, b - a, x[OMEGA_N], x[ZETA], n);
                }
                DVector::from_column_slice(&[kin.0, kin.1, x[OMEGA_N], x[ZETA]])
            };
            let (predicted, sigma) = ukf_predict(&state, transition, filter)?;
            let z = DVector::from_element(1, cur.z);
            let corr = ukf_update(&predicted, &sigma, observe, &z, filter)?;
            error += (cur.z - corr.predicted_observation[0]).abs();
            state = corr.state;
            clamped = clamp_parameters(&mut state.mean);
            max_asym = max_asym.max(state.asymmetry());
            min_eig = min_eig.min(state.min_eigenvalue());
        }
        if !error.is_finite() {
            return Err(Error::Diverged("training error is not finite"));
        }
        params = SecondOrderParams::new(state.mean[OMEGA_N], state.mean[ZETA])
            .map_err(|_| Error::Diverged("parameter estimate left the physical range"))?;
        let record = EpochRecord {
            epoch,
            error,
            omega_n: params.omega_n(),
            zeta: params.zeta(),
        };
        if let Some(prev) = epochs.last() {
            if error > prev.error {
                params = SecondOrderParams::new(prev.omega_n, prev.zeta)?;
                rejected = Some(record);
                stop = StopReason::ImprovementBelowTolerance;
                break;
            }
        }
        let previous = epochs.last().map(|e| e.error);
        epochs.push(record);
        if error < filter.tol {
            stop = StopReason::ErrorBelowTolerance;
            break;
        }
        if let Some(prev) = previous {
            if prev - error < filter.tol {
                stop = StopReason::ImprovementBelowTolerance;
                break;
            }
        }
    }

    Ok((
        params,
        Convergence {
            epochs,
            stop,
            clamp_warning: clamped,
            rejected,
            max_asymmetry: max_asym,
            min_eigenvalue: min_eig,
        },
    ))
}

/// Clamps the parameter components; returns true if any bound was active.
fn clamp_parameters(x: &mut DVector<f64>) -> bool {
    use state_index::*;
    let mut hit = false;
    if !(x[OMEGA_N] > MIN_OMEGA_N) {
        x[OMEGA_N] = MIN_OMEGA_N * (1.0 + 1e-9);
        hit = true;
    }
    if !(x[ZETA] >= 0.0) {
        x[ZETA] = 0.0;
        hit = true;
    } else if x[ZETA] > MAX_ZETA {
        x[ZETA] = MAX_ZETA;
        hit = true;
    }
    hit
}

/// Crude `(omega_n, zeta)` from mean crossings and peak decay of the record
/// around `equilibrium`. Used to seed the filter when no guess is supplied.
///
/// Falls back to `(2 pi, 0.05)` when fewer than two half cycles are visible.
pub fn rough_guess(obs: &[Observation], equilibrium: f64) -> SecondOrderParams {
    const FALLBACK: (f64, f64) = (2.0 * core::f64::consts::PI, 0.05);
    let fallback = || SecondOrderParams::new(FALLBACK.0, FALLBACK.1).expect("valid fallback");
    let amp = obs
        .iter()
        .map(|o| (o.z - equilibrium).abs())
        .fold(0.0, f64::max);
    if !(amp > 0.0) {
        return fallback();
    }
    // hysteresis keeps noise near the crossing from counting twice
    let band = 0.1 * amp;
    let mut sign = 0i8;
    let mut crossings: Vec<f64> = Vec::new();
    let mut peaks: Vec<f64> = Vec::new();
    let mut peak = 0.0f64;
    for o in obs {
        let d = o.z - equilibrium;
        let s = if d > band {
            1
        } else if d < -band {
            -1
        } else {
            0
        };
        if s != 0 && s != sign {
            if sign != 0 {
                crossings.push(o.t);
                peaks.push(peak);
            }
            sign = s;
            peak = 0.0;
        }
        peak = peak.max(d.abs());
    }
    if crossings.len() < 3 {
        return fallback();
    }
    let half_period =
        (crossings[crossings.len() - 1] - crossings[0]) / (crossings.len() - 1) as f64;
    let omega_d = core::f64::consts::PI / half_period;
    // peaks[0] belongs to the lobe before the first crossing, which may be cut short
    let decays: Vec<f64> = peaks[1..]
        .windows(2)
        .filter(|w| w[0] > 0.0 && w[1] > 0.0)
        .map(|w| (w[0] / w[1]).ln())
        .collect();
    let delta = if decays.is_empty() {
        0.0
    } else {
        decays.iter().sum::<f64>() / decays.len() as f64
    };
    let pi = core::f64::consts::PI;
    let zeta = (delta.max(0.0) / (pi * pi + delta * delta).sqrt()).clamp(0.005, 0.5);
    let omega_n = omega_d / (1.0 - zeta * zeta).sqrt();
    SecondOrderParams::new(omega_n, zeta).unwrap_or_else(|_| fallback())
}

/// Outcome of an identifier: parameters plus the filter history when there is one.
#[derive(Debug, Clone, PartialEq)]
pub struct Identification {
    pub params: SecondOrderParams,
    pub convergence: Option<Convergence>,
}

/// Something that turns displacement observations into plant parameters.
pub trait Identifier {
    fn identify(&self, obs: &[Observation], command: &CommandSignal) -> Result<Identification>;
}

/// UKF identification from a fixed initial guess.
#[derive(Debug, Clone, PartialEq)]
pub struct UkfIdentifier {
    pub guess: SecondOrderParams,
    pub config: IdentifyConfig,
}

impl Identifier for UkfIdentifier {
    fn identify(&self, obs: &[Observation], command: &CommandSignal) -> Result<Identification> {
        let (params, conv) = identify_observations(obs, command, &self.guess, &self.config)?;
        Ok(Identification {
            params,
            convergence: Some(conv),
        })
    }
}

/// Ignores the data and returns preset parameters (a fixed, untuned design).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FixedParams(pub SecondOrderParams);

impl Identifier for FixedParams {
    fn identify(&self, _obs: &[Observation], _command: &CommandSignal) -> Result<Identification> {
        Ok(Identification {
            params: self.0,
            convergence: None,
        })
    }
}
