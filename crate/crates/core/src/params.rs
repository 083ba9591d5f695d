#[allow(unused_imports)] // inherent when std is linked
use num_traits::Float;

use crate::{Error, Result};

/// Modal pair shared by the plant, the shapers and the identifier.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SecondOrderParams {
    omega_n: f64,
    zeta: f64,
}

impl SecondOrderParams {
    /// `omega_n` in rad/s, must be positive; `zeta` in `[0, 1)`.
    pub fn new(omega_n: f64, zeta: f64) -> Result<Self> {
        if omega_n.is_finite() && omega_n > 0.0 && zeta.is_finite() && (0.0..1.0).contains(&zeta) {
            Ok(Self { omega_n, zeta })
        } else {
            Err(Error::InvalidParams { omega_n, zeta })
        }
    }

    pub fn omega_n(&self) -> f64 {
        self.omega_n
    }

    pub fn zeta(&self) -> f64 {
        self.zeta
    }

    /// Damped natural frequency `omega_n * sqrt(1 - zeta^2)`.
    pub fn omega_d(&self) -> f64 {
        self.omega_n * (1.0 - self.zeta * self.zeta).sqrt()
    }

    /// Same damping, natural frequency multiplied by `ratio`.
    pub fn scaled_frequency(&self, ratio: f64) -> Result<Self> {
        Self::new(self.omega_n * ratio, self.zeta)
    }
}
