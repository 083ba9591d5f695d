//! Second-order plant `x'' + 2 zeta omega_n x' + omega_n^2 x = omega_n^2 u`
//! and the closed-form vibration terms of an impulse train applied to it.

use alloc::vec::Vec;

#[allow(unused_imports)] // inherent when std is linked
use num_traits::Float;

use crate::shaper::ImpulseTrain;
use crate::{Error, Result, SecondOrderParams, TimeSeries};

/// Largest `h * omega_n` used by the integrator for a single RK4 step.
pub const MAX_STEP_PHASE: f64 = 0.1;

/// Largest sample step (as `dt * omega_n`) `simulate_response` accepts.
pub const MAX_SAMPLE_PHASE: f64 = 0.5;

/// `omega_n * sqrt(1 - zeta^2)`.
pub fn damped_frequency(p: &SecondOrderParams) -> f64 {
    p.omega_d()
}

/// Number of RK4 substeps needed to cover `duration` at the given frequency.
pub fn substeps_for(duration: f64, omega_n: f64) -> usize {
    let phase = duration.abs() * omega_n.abs();
    let n = (phase / MAX_STEP_PHASE).ceil();
    if n.is_finite() && n >= 1.0 {
        n as usize
    } else {
        1
    }
}

/// Advances `(position, velocity)` by `duration` with the command held at `u`,
/// using `substeps` classical RK4 steps.
///
/// Takes raw `omega_n`/`zeta` so that filter sigma points outside the physical
/// range can still be propagated.
pub fn rk4_advance(
    state: (f64, f64),
    u: f64,
    duration: f64,
    omega_n: f64,
    zeta: f64,
    substeps: usize,
) -> (f64, f64) {
    let w2 = omega_n * omega_n;
    let c = 2.0 * zeta * omega_n;
    let accel = |x: f64, v: f64| w2 * (u - x) - c * v;
    let h = duration / substeps as f64;
    let (mut x, mut v) = state;
    for _ in 0..substeps {
        let k1x = v;
        let k1v = accel(x, v);
        let k2x = v + 0.5 * h * k1v;
        let k2v = accel(x + 0.5 * h * k1x, v + 0.5 * h * k1v);
        let k3x = v + 0.5 * h * k2v;
        let k3v = accel(x + 0.5 * h * k2x, v + 0.5 * h * k2v);
        let k4x = v + h * k3v;
        let k4v = accel(x + h * k3x, v + h * k3v);
        x += h / 6.0 * (k1x + 2.0 * k2x + 2.0 * k3x + k4x);
        v += h / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
    }
    (x, v)
}

/// Plant response to a sampled command (zero-order hold between samples).
///
/// Output sample `k` is the position at `t0 + k * dt`; sample 0 is the initial
/// position. Fails with [`Error::StepTooCoarse`] when `dt * omega_n > 0.5`.
pub fn simulate_response(
    p: &SecondOrderParams,
    input: &TimeSeries,
    initial_position: f64,
    initial_velocity: f64,
) -> Result<TimeSeries> {
    let dt = input.dt();
    let product = dt * p.omega_n();
    if product > MAX_SAMPLE_PHASE {
        return Err(Error::StepTooCoarse { product });
    }
    let substeps = substeps_for(dt, p.omega_n());
    let u = input.samples();
    let mut out = Vec::with_capacity(u.len());
    let mut state = (initial_position, initial_velocity);
    for (k, &uk) in u.iter().enumerate() {
        out.push(state.0);
        if k + 1 < u.len() {
            state = rk4_advance(state, uk, dt, p.omega_n(), p.zeta(), substeps);
        }
    }
    if out.iter().any(|x| !x.is_finite()) {
        return Err(Error::InvalidSeries("simulated response is not finite"));
    }
    TimeSeries::new(input.t0(), dt, out)
}

/// Closed-form unit-impulse response at time `t >= 0`.
pub fn impulse_response(p: &SecondOrderParams, t: f64) -> f64 {
    let wn = p.omega_n();
    let z = p.zeta();
    wn / (1.0 - z * z).sqrt() * (-z * wn * t).exp() * (p.omega_d() * t).sin()
}

/// The `C` / `S` sums of an impulse train at the given plant parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VibrationTerms {
    pub c_term: f64,
    pub s_term: f64,
    /// `atan2(c_term, s_term)`.
    pub phase: f64,
}

impl VibrationTerms {
    pub fn magnitude(&self) -> f64 {
        self.c_term.hypot(self.s_term)
    }
}

pub fn vibration_terms(p: &SecondOrderParams, train: &ImpulseTrain) -> VibrationTerms {
    let wd = p.omega_d();
    let decay = p.zeta() * p.omega_n();
    let (mut c, mut s) = (0.0, 0.0);
    for imp in train.impulses() {
        let g = imp.amplitude * (decay * imp.time).exp();
        c += g * (wd * imp.time).cos();
        s += g * (wd * imp.time).sin();
    }
    VibrationTerms {
        c_term: c,
        s_term: s,
        phase: c.atan2(s),
    }
}

/// `exp(-zeta omega_n t_N) * sqrt(C^2 + S^2)`: residual amplitude relative to
/// an unshaped unit impulse.
pub fn residual_vibration_ratio(p: &SecondOrderParams, train: &ImpulseTrain) -> f64 {
    let terms = vibration_terms(p, train);
    (-p.zeta() * p.omega_n() * train.duration()).exp() * terms.magnitude()
}

/// `V` on `npoints` uniformly spaced frequency ratios in `[lo, hi]`, damping
/// held at its nominal value. Returns `(ratio, V)` pairs.
pub fn sensitivity_curve(
    train: &ImpulseTrain,
    nominal: &SecondOrderParams,
    ratio_range: (f64, f64),
    npoints: usize,
) -> Result<Vec<(f64, f64)>> {
    let (lo, hi) = ratio_range;
    if !(lo > 0.0 && hi > lo && hi.is_finite()) {
        return Err(Error::InvalidArgument(
            "ratio range must satisfy 0 < lo < hi",
        ));
    }
    if npoints < 2 {
        return Err(Error::InvalidArgument("need at least two points"));
    }
    let step = (hi - lo) / (npoints - 1) as f64;
    (0..npoints)
        .map(|i| {
            let r = if i + 1 == npoints {
                hi
            } else {
                lo + step * i as f64
            };
            let actual = nominal.scaled_frequency(r)?;
            Ok((r, residual_vibration_ratio(&actual, train)))
        })
        .collect()
}

/// Width of the frequency-ratio interval around 1 on which `V <= threshold`.
///
/// Zero if the train does not meet the threshold at the nominal frequency.
pub fn insensitivity_bandwidth(
    train: &ImpulseTrain,
    nominal: &SecondOrderParams,
    threshold: f64,
) -> f64 {
    let v = |r: f64| {
        nominal
            .scaled_frequency(r)
            .map(|p| residual_vibration_ratio(&p, train))
            .unwrap_or(f64::INFINITY)
    };
    if v(1.0) > threshold {
        return 0.0;
    }
    const SCAN: f64 = 1e-3;
    let edge = |dir: f64| {
        let mut inside = 1.0;
        loop {
            let next = inside + dir * SCAN;
            if next <= SCAN || next > 4.0 {
                return inside;
            }
            if v(next) > threshold {
                let (mut a, mut b) = (inside, next);
                for _ in 0..60 {
                    let m = 0.5 * (a + b);
                    if v(m) <= threshold {
                        a = m;
                    } else {
                        b = m;
                    }
                }
                return 0.5 * (a + b);
            }
            inside = next;
        }
    };
    edge(1.0) - edge(-1.0)
}
