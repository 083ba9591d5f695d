use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid plant parameters: omega_n = {omega_n}, zeta = {zeta} (need omega_n > 0 and 0 <= zeta < 1)")]
    InvalidParams { omega_n: f64, zeta: f64 },

    #[error("invalid time series: {0}")]
    InvalidSeries(&'static str),

    #[error("invalid impulse train: {0}")]
    InvalidTrain(&'static str),

    /// The sample step cannot resolve the mode; resample or simulate on a finer grid.
    #[error("step too coarse: dt * omega_n = {product:.4} exceeds 0.5; use a finer sample grid (internal substepping only covers dt * omega_n <= 0.5)")]
    StepTooCoarse { product: f64 },

    #[error("invalid configuration: {0}")]
    InvalidConfig(&'static str),

    #[error("invalid argument: {0}")]
    InvalidArgument(&'static str),

    #[error("filter diverged: {0}")]
    Diverged(&'static str),

    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("empty input")]
    Empty,

    #[error("too few samples: need at least {needed}, got {got}")]
    TooFewSamples { needed: usize, got: usize },

    #[error("all paired differences are zero")]
    AllZeroDifferences,
}

impl Error {
    /// True for failures of the numerical filter rather than of the inputs.
    pub fn is_divergence(&self) -> bool {
        matches!(self, Error::Diverged(_))
    }
}
