//! Modeling toolkit for twin-beam intensity-correlation experiments.
//!
//! The library evaluates the noise reduction factor (NRF) of a pair of
//! intensity-correlated beams under unbalanced detection, uncorrelated
//! optical noise, and detector noise; finds the detection-efficiency
//! balance minimizing the NRF; maps a four-wave-mixing pump-power scenario
//! onto the noise model; simulates photon-counting statistics by Monte
//! Carlo; and benchmarks four absorption estimators against the classical
//! shot-noise limit.

pub mod error;
pub mod estimators;
pub mod fwm;
pub mod montecarlo;
pub mod noise_model;
pub mod optimizer;
pub mod stats;

pub use error::{ModelError, Result};
pub use noise_model::{ChannelNoiseModel, NrfBreakdown, TwinBeamSource};
