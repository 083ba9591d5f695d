//! Impulse trains and the ZV / ZVD / ZVDD shaper family.

use alloc::vec::Vec;
use core::f64::consts::PI;
use core::fmt;
use core::str::FromStr;

#[allow(unused_imports)] // inherent when std is linked
use num_traits::Float;

use crate::{Error, Result, SecondOrderParams, TimeSeries};

/// Tolerance on the amplitude sum.
pub const AMPLITUDE_SUM_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Impulse {
    pub amplitude: f64,
    /// Seconds after the first impulse.
    pub time: f64,
}

impl Impulse {
    pub fn new(amplitude: f64, time: f64) -> Self {
        Self { amplitude, time }
    }
}

/// Ordered impulses starting at `t = 0` whose amplitudes sum to one.
#[derive(Debug, Clone, PartialEq)]
pub struct ImpulseTrain {
    impulses: Vec<Impulse>,
}

impl ImpulseTrain {
    pub fn new(impulses: Vec<Impulse>) -> Result<Self> {
        let first = impulses
            .first()
            .ok_or(Error::InvalidTrain("at least one impulse is required"))?;
        if first.time != 0.0 {
            return Err(Error::InvalidTrain("first impulse must be at t = 0"));
        }
        if impulses
            .iter()
            .any(|i| !i.amplitude.is_finite() || !i.time.is_finite())
        {
            return Err(Error::InvalidTrain("non-finite impulse"));
        }
        if impulses.windows(2).any(|w| w[1].time <= w[0].time) {
            return Err(Error::InvalidTrain(
                "impulse times must be strictly increasing",
            ));
        }
        let sum: f64 = impulses.iter().map(|i| i.amplitude).sum();
        if (sum - 1.0).abs() > AMPLITUDE_SUM_TOL {
            return Err(Error::InvalidTrain("amplitudes must sum to 1"));
        }
        Ok(Self { impulses })
    }

    /// The unshaped command: a single unit impulse at `t = 0`.
    pub fn identity() -> Self {
        Self {
            impulses: alloc::vec![Impulse::new(1.0, 0.0)],
        }
    }

    pub fn impulses(&self) -> &[Impulse] {
        &self.impulses
    }

    pub fn len(&self) -> usize {
        self.impulses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.impulses.is_empty()
    }

    /// Time of the last impulse.
    pub fn duration(&self) -> f64 {
        self.impulses.last().map_or(0.0, |i| i.time)
    }

    pub fn amplitudes(&self) -> impl Iterator<Item = f64> + '_ {
        self.impulses.iter().map(|i| i.amplitude)
    }

    pub fn times(&self) -> impl Iterator<Item = f64> + '_ {
        self.impulses.iter().map(|i| i.time)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ShaperKind {
    Zv,
    Zvd,
    Zvdd,
}

impl ShaperKind {
    pub const ALL: [ShaperKind; 3] = [ShaperKind::Zv, ShaperKind::Zvd, ShaperKind::Zvdd];

    pub fn impulse_count(self) -> usize {
        match self {
            ShaperKind::Zv => 2,
            ShaperKind::Zvd => 3,
            ShaperKind::Zvdd => 4,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            ShaperKind::Zv => "zv",
            ShaperKind::Zvd => "zvd",
            ShaperKind::Zvdd => "zvdd",
        }
    }
}

impl fmt::Display for ShaperKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ShaperKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "zv" => Ok(ShaperKind::Zv),
            "zvd" => Ok(ShaperKind::Zvd),
            "zvdd" => Ok(ShaperKind::Zvdd),
            _ => Err(Error::InvalidArgument(
                "shaper kind must be zv, zvd or zvdd",
            )),
        }
    }
}

/// A designed shaper together with the parameters it was tuned for.
#[derive(Debug, Clone, PartialEq)]
pub struct ShaperDesign {
    pub kind: ShaperKind,
    pub params: SecondOrderParams,
    /// Per-half-period decay `exp(-zeta pi / sqrt(1 - zeta^2))`.
    pub k_factor: f64,
    train: ImpulseTrain,
}

impl ShaperDesign {
    pub fn train(&self) -> &ImpulseTrain {
        &self.train
    }

    pub fn into_train(self) -> ImpulseTrain {
        self.train
    }
}

/// Damping factor between successive half periods.
pub fn k_factor(zeta: f64) -> f64 {
    (-zeta * PI / (1.0 - zeta * zeta).sqrt()).exp()
}

/// Builds the impulse train for `kind` tuned to `p`.
///
/// Amplitudes are the binomial coefficients of `(1 + K)^m` normalised by
/// `(1 + K)^m` (m = 1, 2, 3 for ZV, ZVD, ZVDD), spaced every half damped period.
pub fn design_shaper(kind: ShaperKind, p: &SecondOrderParams) -> ShaperDesign {
    let k = k_factor(p.zeta());
    let half_period = PI / p.omega_d();
    let order = kind.impulse_count() - 1;
    let norm = (1.0 + k).powi(order as i32);
    let mut binom = 1.0;
    let mut impulses = Vec::with_capacity(order + 1);
    for i in 0..=order {
        impulses.push(Impulse::new(
            binom * k.powi(i as i32) / norm,
            half_period * i as f64,
        ));
        binom = binom * (order - i) as f64 / (i + 1) as f64;
    }
    // normalisation holds by construction up to rounding; fold the residue into the last term
    let sum: f64 = impulses.iter().map(|i| i.amplitude).sum();
    impulses[order].amplitude += 1.0 - sum;
    ShaperDesign {
        kind,
        params: *p,
        k_factor: k,
        train: ImpulseTrain::new(impulses).expect("designed train is valid"),
    }
}

/// Convolves a sampled command with an impulse train.
///
/// The output is `len + ceil(t_N / dt)` samples long; the input is taken as
/// zero before its start and held at its last value after its end. Impulses
/// between samples are split linearly across the two neighbouring samples.
pub fn shape_command(input: &TimeSeries, train: &ImpulseTrain) -> TimeSeries {
    let dt = input.dt();
    let u = input.samples();
    let n_in = u.len();
    let extra = if train.duration() > 0.0 {
        (train.duration() / dt - 1e-9).ceil().max(0.0) as usize
    } else {
        0
    };
    let n_out = n_in + extra;
    let at = |j: isize| -> f64 {
        if j < 0 || n_in == 0 {
            0.0
        } else {
            u[(j as usize).min(n_in - 1)]
        }
    };
    let mut out = alloc::vec![0.0; n_out];
    for imp in train.impulses() {
        let delay = imp.time / dt;
        let mut whole = delay.floor();
        let mut frac = delay - whole;
        // snap delays within rounding of a sample boundary
        if frac > 1.0 - 1e-9 {
            whole += 1.0;
            frac = 0.0;
        } else if frac < 1e-9 {
            frac = 0.0;
        }
        let whole = whole as isize;
        for (n, slot) in out.iter_mut().enumerate() {
            let j = n as isize - whole;
            let mut x = (1.0 - frac) * at(j);
            if frac > 0.0 {
                x += frac * at(j - 1);
            }
            *slot += imp.amplitude * x;
        }
    }
    TimeSeries::new(input.t0(), dt, out).expect("convolution of a finite series is finite")
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn p(w: f64, z: f64) -> SecondOrderParams {
        SecondOrderParams::new(w, z).unwrap()
    }

    #[test]
    fn undamped_zvd_and_zv() {
        let d = design_shaper(ShaperKind::Zvd, &p(5.0, 0.0));
        let a: Vec<f64> = d.train().amplitudes().collect();
        let t: Vec<f64> = d.train().times().collect();
        assert_eq!(a, vec![0.25, 0.5, 0.25]);
        assert_eq!(t, vec![0.0, PI / 5.0, 2.0 * PI / 5.0]);
        assert_eq!(d.k_factor, 1.0);
        let zv = design_shaper(ShaperKind::Zv, &p(5.0, 0.0));
        assert_eq!(zv.train().amplitudes().collect::<Vec<_>>(), vec![0.5, 0.5]);
    }

    #[test]
    fn damped_zvd_coefficients() {
        // K = exp(-0.1 pi / sqrt(0.99)) evaluated independently
        let k = (-0.1 * PI / 0.99f64.sqrt()).exp();
        let wd = 2.0 * PI * 0.99f64.sqrt();
        let expect_a = [1.0, 2.0 * k, k * k].map(|x| x / ((1.0 + k) * (1.0 + k)));
        let d = design_shaper(ShaperKind::Zvd, &p(2.0 * PI, 0.1));
        let a: Vec<f64> = d.train().amplitudes().collect();
        let t: Vec<f64> = d.train().times().collect();
        for (x, y) in a.iter().zip(expect_a) {
            assert!((x - y).abs() < 1e-14);
        }
        for (x, y) in a.iter().zip([0.33442, 0.48774, 0.17784]) {
            assert!((x - y).abs() < 1e-5, "{x} vs {y}");
        }
        for (x, y) in t.iter().zip([0.0, 0.50252, 1.00504]) {
            assert!((x - y).abs() < 1e-5, "{x} vs {y}");
        }
        assert!((t[1] - PI / wd).abs() < 1e-15);
        assert_eq!(t[2], 2.0 * t[1]);
    }

    #[test]
    fn impulse_counts() {
        for kind in ShaperKind::ALL {
            assert_eq!(
                design_shaper(kind, &p(4.0, 0.2)).train().len(),
                kind.impulse_count()
            );
        }
    }

    #[test]
    fn train_validation() {
        assert!(ImpulseTrain::new(vec![]).is_err());
        assert!(ImpulseTrain::new(vec![Impulse::new(1.0, 0.1)]).is_err());
        assert!(ImpulseTrain::new(vec![Impulse::new(0.5, 0.0), Impulse::new(0.4, 1.0)]).is_err());
        assert!(ImpulseTrain::new(vec![Impulse::new(0.5, 0.0), Impulse::new(0.5, 0.0)]).is_err());
    }

    #[test]
    fn identity_shaping_is_exact() {
        let u = TimeSeries::new(0.0, 0.01, vec![0.0, 1.0, -2.0, 3.5]).unwrap();
        assert_eq!(shape_command(&u, &ImpulseTrain::identity()), u);
    }

    #[test]
    fn undamped_zvd_staircase() {
        // pi / omega_n = 0.1 s = 10 samples, on grid
        let d = design_shaper(ShaperKind::Zvd, &p(10.0 * PI, 0.0));
        let u = TimeSeries::constant(0.0, 0.01, 1.0, 50).unwrap();
        let y = shape_command(&u, d.train());
        assert_eq!(y.len(), 70);
        let s = y.samples();
        assert!(s[..10].iter().all(|&x| (x - 0.25).abs() < 1e-15));
        assert!(s[10..20].iter().all(|&x| (x - 0.75).abs() < 1e-15));
        assert!(s[20..].iter().all(|&x| (x - 1.0).abs() < 1e-15));
    }

    #[test]
    fn off_grid_split_is_linear() {
        let train =
            ImpulseTrain::new(vec![Impulse::new(0.5, 0.0), Impulse::new(0.5, 0.025)]).unwrap();
        let u = TimeSeries::constant(0.0, 0.01, 1.0, 5).unwrap();
        let y = shape_command(&u, &train);
        assert_eq!(y.len(), 8);
        let s = y.samples();
        assert_eq!(&s[..2], &[0.5, 0.5]);
        assert!((s[2] - 0.75).abs() < 1e-12);
        assert!((s[3] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn parses_kind() {
        assert_eq!("ZVD".parse::<ShaperKind>().unwrap(), ShaperKind::Zvd);
        assert!("ei".parse::<ShaperKind>().is_err());
    }
}
