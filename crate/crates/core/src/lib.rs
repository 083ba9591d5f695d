//! Residual-vibration toolkit for underdamped second-order plants.
//!
//! This crate is `no_std` (it needs `alloc`). It covers:
//!
//! - plant simulation and the impulse-train vibration terms ([`dynamics`]),
//! - ZV / ZVD / ZVDD shaper design and command convolution ([`shaper`]),
//! - an unscented Kalman filter ([`ukf`]) and the joint state/parameter
//!   identifier built on it ([`ident`]), plus a brute-force grid oracle
//!   ([`grid`]),
//! - error metrics and the exact Wilcoxon signed-rank test ([`metrics`],
//!   [`wilcoxon`]).
//!
//! File formats, random sampling and the command line live in the
//! `shaperlab` crate.

#![no_std]

extern crate alloc;

pub mod command;
pub mod dynamics;
pub mod error;
pub mod grid;
pub mod ident;
pub mod metrics;
pub mod params;
pub mod series;
pub mod shaper;
pub mod ukf;
pub mod wilcoxon;

pub use command::CommandSignal;
pub use dynamics::{
    damped_frequency, insensitivity_bandwidth, residual_vibration_ratio, sensitivity_curve,
    simulate_response, vibration_terms, VibrationTerms,
};
pub use error::Error;
pub use ident::{
    identify_observations, identify_parameters, rough_guess, training_error, Convergence,
    EpochRecord, Identification, Identifier, IdentifyConfig, Observation, StopReason,
    UkfIdentifier,
};
pub use metrics::{aggregate_trials, compute_metrics, MeanStd, MetricsSummary, MetricsTriple};
pub use params::SecondOrderParams;
pub use series::TimeSeries;
pub use shaper::{design_shaper, shape_command, Impulse, ImpulseTrain, ShaperDesign, ShaperKind};
pub use ukf::{SigmaSet, UkfConfig, UkfState};
pub use wilcoxon::{wilcoxon_signed_rank, WilcoxonResult};

pub type Result<T, E = Error> = core::result::Result<T, E>;
