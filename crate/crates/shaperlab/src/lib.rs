//! Files, synthetic data, the comparison protocol and the `shaperlab` command line.

pub mod cli;
pub mod dataset;
pub mod error;
pub mod eval;
pub mod fsutil;
pub mod protocol;
pub mod report;
pub mod rng;
pub mod svg;
pub mod synth;

pub use error::{Error, Result};
