//! Unscented Kalman filter: sigma-point generation, prediction and update.
//!
//! The filter is expressed as free functions over an explicit [`UkfState`] so
//! that callers own the state machine (one per identification run).

use alloc::vec::Vec;

use nalgebra::{DMatrix, DVector};

use crate::{Error, Result};

/// Diagonal jitter added when the scaled covariance fails to factor.
pub const CHOLESKY_JITTER: f64 = 1e-9;

/// Largest tolerated `|P - P^T|` entry.
pub const SYMMETRY_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct UkfConfig {
    pub alpha: f64,
    pub beta: f64,
    pub kappa: f64,
    pub process_noise: DMatrix<f64>,
    pub observation_noise: DMatrix<f64>,
    pub max_epochs: usize,
    pub tol: f64,
}

impl UkfConfig {
    /// Spread `alpha = 0.1`, `beta = 2`, `kappa = 0`, 100 epochs, tolerance `1e-4`.
    pub fn new(process_noise: DMatrix<f64>, observation_noise: DMatrix<f64>) -> Result<Self> {
        let cfg = Self {
            alpha: 1e-1,
            beta: 2.0,
            kappa: 0.0,
            process_noise,
            observation_noise,
            max_epochs: 100,
            tol: 1e-4,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn with_spread(mut self, alpha: f64, beta: f64, kappa: f64) -> Result<Self> {
        self.alpha = alpha;
        self.beta = beta;
        self.kappa = kappa;
        self.validate()?;
        Ok(self)
    }

    pub fn state_dim(&self) -> usize {
        self.process_noise.nrows()
    }

    pub fn obs_dim(&self) -> usize {
        self.observation_noise.nrows()
    }

    /// `alpha^2 (n + kappa) - n`.
    pub fn lambda(&self, n: usize) -> f64 {
        let n = n as f64;
        self.alpha * self.alpha * (n + self.kappa) - n
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.state_dim();
        if !(self.alpha > 0.0 && self.alpha <= 1.0) {
            return Err(Error::InvalidConfig("alpha must lie in (0, 1]"));
        }
        if !self.beta.is_finite() || !self.kappa.is_finite() {
            return Err(Error::InvalidConfig("beta and kappa must be finite"));
        }
        if n == 0 || !self.process_noise.is_square() {
            return Err(Error::InvalidConfig(
                "process noise must be a non-empty square matrix",
            ));
        }
        if n as f64 + self.lambda(n) <= 0.0 {
            return Err(Error::InvalidConfig("n + lambda must be positive"));
        }
        if !is_symmetric(&self.process_noise) || min_eigenvalue(&self.process_noise) < -1e-12 {
            return Err(Error::InvalidConfig("process noise must be symmetric PSD"));
        }
        let r = &self.observation_noise;
        if r.nrows() == 0 || !r.is_square() || !is_symmetric(r) || r.clone().cholesky().is_none() {
            return Err(Error::InvalidConfig(
                "observation noise must be symmetric PD",
            ));
        }
        if self.max_epochs == 0 {
            return Err(Error::InvalidConfig("max_epochs must be at least 1"));
        }
        if !(self.tol > 0.0) {
            return Err(Error::InvalidConfig("tol must be positive"));
        }
        Ok(())
    }
}

/// Filter mean and covariance.
#[derive(Debug, Clone, PartialEq)]
pub struct UkfState {
    pub mean: DVector<f64>,
    pub covariance: DMatrix<f64>,
}

impl UkfState {
    pub fn new(mean: DVector<f64>, covariance: DMatrix<f64>) -> Result<Self> {
        if covariance.nrows() != mean.len() || !covariance.is_square() {
            return Err(Error::InvalidArgument(
                "covariance shape does not match mean",
            ));
        }
        if mean.iter().chain(covariance.iter()).any(|x| !x.is_finite()) {
            return Err(Error::InvalidArgument("state must be finite"));
        }
        if !is_symmetric(&covariance) {
            return Err(Error::InvalidArgument("covariance must be symmetric"));
        }
        Ok(Self { mean, covariance })
    }

    pub fn dim(&self) -> usize {
        self.mean.len()
    }

    /// Largest `|P_ij - P_ji|`.
    pub fn asymmetry(&self) -> f64 {
        asymmetry(&self.covariance)
    }

    pub fn min_eigenvalue(&self) -> f64 {
        min_eigenvalue(&self.covariance)
    }
}

/// `2n + 1` sigma points with their weights.
#[derive(Debug, Clone, PartialEq)]
pub struct SigmaSet {
    pub points: Vec<DVector<f64>>,
    pub mean_weights: Vec<f64>,
    pub cov_weights: Vec<f64>,
}

impl SigmaSet {
    pub fn weighted_mean(&self) -> DVector<f64> {
        weighted_mean(&self.points, &self.mean_weights)
    }
}

/// Standard scaled unscented-transform weights `(w^m, w^c)`.
pub fn ut_weights(n: usize, cfg: &UkfConfig) -> (Vec<f64>, Vec<f64>) {
    let lambda = cfg.lambda(n);
    let scale = n as f64 + lambda;
    let wi = 1.0 / (2.0 * scale);
    let mut wm = alloc::vec![wi; 2 * n + 1];
    let mut wc = wm.clone();
    wm[0] = lambda / scale;
    wc[0] = lambda / scale + (1.0 - cfg.alpha * cfg.alpha + cfg.beta);
    (wm, wc)
}

/// Points `x`, `x + L_i`, `x - L_i` where `L L^T = (n + lambda) P`.
pub fn generate_sigma_points(s: &UkfState, cfg: &UkfConfig) -> Result<SigmaSet> {
    let n = s.dim();
    let scaled = &s.covariance * (n as f64 + cfg.lambda(n));
    let factor = match scaled.clone().cholesky() {
        Some(c) => c.l(),
        None => (scaled + DMatrix::identity(n, n) * CHOLESKY_JITTER)
            .cholesky()
            .ok_or(Error::Diverged("covariance is not positive definite"))?
            .l(),
    };
    let mut points = Vec::with_capacity(2 * n + 1);
    points.push(s.mean.clone());
    for i in 0..n {
        points.push(&s.mean + factor.column(i));
    }
    for i in 0..n {
        points.push(&s.mean - factor.column(i));
    }
    let (mean_weights, cov_weights) = ut_weights(n, cfg);
    Ok(SigmaSet {
        points,
        mean_weights,
        cov_weights,
    })
}

/// Propagates sigma points through `transition` and forms the predicted
/// mean and covariance (plus process noise).
pub fn ukf_predict<F>(
    s: &UkfState,
    mut transition: F,
    cfg: &UkfConfig,
) -> Result<(UkfState, SigmaSet)>
where
    F: FnMut(&DVector<f64>) -> DVector<f64>,
{
    let sigma = generate_sigma_points(s, cfg)?;
    let points: Vec<DVector<f64>> = sigma.points.iter().map(&mut transition).collect();
    if points
        .iter()
        .any(|p| p.len() != s.dim() || p.iter().any(|x| !x.is_finite()))
    {
        return Err(Error::Diverged("propagated state is not finite"));
    }
    let mean = weighted_mean(&points, &sigma.mean_weights);
    let mut cov = weighted_cross(&points, &mean, &points, &mean, &sigma.cov_weights);
    cov += &cfg.process_noise;
    symmetrize(&mut cov);
    let propagated = SigmaSet {
        points,
        mean_weights: sigma.mean_weights,
        cov_weights: sigma.cov_weights,
    };
    Ok((
        UkfState {
            mean,
            covariance: cov,
        },
        propagated,
    ))
}

/// Result of a measurement update.
#[derive(Debug, Clone, PartialEq)]
pub struct Correction {
    pub state: UkfState,
    /// Predicted observation mean before the measurement was applied.
    pub predicted_observation: DVector<f64>,
    pub innovation_covariance: DMatrix<f64>,
}

/// Measurement update.
///
/// Observation sigma points are drawn from `predicted`, whose covariance
/// already carries the process noise; `propagated` must come from the
/// matching [`ukf_predict`] call and fixes the weights.
pub fn ukf_update<H>(
    predicted: &UkfState,
    propagated: &SigmaSet,
    mut observe: H,
    z: &DVector<f64>,
    cfg: &UkfConfig,
) -> Result<Correction>
where
    H: FnMut(&DVector<f64>) -> DVector<f64>,
{
    if z.iter().any(|x| !x.is_finite()) {
        return Err(Error::InvalidArgument("measurement must be finite"));
    }
    let points = generate_sigma_points(predicted, cfg)?.points;
    if points.len() != propagated.points.len() {
        return Err(Error::InvalidArgument(
            "sigma set does not match the predicted state",
        ));
    }
    let zs: Vec<DVector<f64>> = points.iter().map(&mut observe).collect();
    if zs.iter().any(|p| p.len() != z.len()) {
        return Err(Error::InvalidArgument("observation dimension mismatch"));
    }
    let z_hat = weighted_mean(&zs, &propagated.mean_weights);
    let mut innov_cov = weighted_cross(&zs, &z_hat, &zs, &z_hat, &propagated.cov_weights);
    innov_cov += &cfg.observation_noise;
    symmetrize(&mut innov_cov);
    let cross = weighted_cross(
        &points,
        &predicted.mean,
        &zs,
        &z_hat,
        &propagated.cov_weights,
    );
    let s_inv = innov_cov
        .clone()
        .try_inverse()
        .filter(|m| m.iter().all(|x| x.is_finite()))
        .ok_or(Error::Diverged("innovation covariance is singular"))?;
    let gain = &cross * s_inv;
    let mean = &predicted.mean + &gain * (z - &z_hat);
    let mut cov = &predicted.covariance - &gain * &innov_cov * gain.transpose();
    symmetrize(&mut cov);
    floor_eigenvalues(&mut cov);
    if mean.iter().chain(cov.iter()).any(|x| !x.is_finite()) {
        return Err(Error::Diverged("updated state is not finite"));
    }
    Ok(Correction {
        state: UkfState {
            mean,
            covariance: cov,
        },
        predicted_observation: z_hat,
        innovation_covariance: innov_cov,
    })
}

fn weighted_mean(points: &[DVector<f64>], w: &[f64]) -> DVector<f64> {
    let mut m = DVector::zeros(points[0].len());
    for (p, &wi) in points.iter().zip(w) {
        m.axpy(wi, p, 1.0);
    }
    m
}

fn weighted_cross(
    a: &[DVector<f64>],
    a_mean: &DVector<f64>,
    b: &[DVector<f64>],
    b_mean: &DVector<f64>,
    w: &[f64],
) -> DMatrix<f64> {
    let mut out = DMatrix::zeros(a_mean.len(), b_mean.len());
    for ((pa, pb), &wi) in a.iter().zip(b).zip(w) {
        let da = pa - a_mean;
        let db = pb - b_mean;
        out.ger(wi, &da, &db, 1.0);
    }
    out
}

pub(crate) fn symmetrize(m: &mut DMatrix<f64>) {
    let t = m.transpose();
    *m += t;
    *m *= 0.5;
}

fn floor_eigenvalues(m: &mut DMatrix<f64>) {
    if m.clone().cholesky().is_some() {
        return;
    }
    let eig = m.clone().symmetric_eigen();
    if eig.eigenvalues.iter().all(|&l| l >= 0.0) {
        return;
    }
    let d = DMatrix::from_diagonal(&eig.eigenvalues.map(|l| l.max(0.0)));
    *m = &eig.eigenvectors * d * eig.eigenvectors.transpose();
    symmetrize(m);
}

fn asymmetry(m: &DMatrix<f64>) -> f64 {
    let mut worst: f64 = 0.0;
    for i in 0..m.nrows() {
        for j in 0..i {
            worst = worst.max((m[(i, j)] - m[(j, i)]).abs());
        }
    }
    worst
}

fn is_symmetric(m: &DMatrix<f64>) -> bool {
    m.is_square() && asymmetry(m) <= SYMMETRY_TOL
}

fn min_eigenvalue(m: &DMatrix<f64>) -> f64 {
    m.clone().symmetric_eigen().eigenvalues.min()
}
