//! Pump-power scenario for a four-wave-mixing twin-beam experiment.
//!
//! Fit parameters map pump power p and a detector condition w onto the
//! noise-model inputs: F grows as 1 + l1 p exp(l2 p), optical noise decays
//! relative to the signal as l6 exp(-l7 p), and detector noise falls off as
//! 1/p, so detector noise dominates at low power and efficiency mismatch at
//! high power.

use serde::{Deserialize, Serialize};

use crate::error::{ModelError, Result};
use crate::noise_model::{nrf_full, ChannelNoiseModel, NrfBreakdown, TwinBeamSource};

/// Fit parameters and detector condition for one experimental scenario.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PumpScenario {
    /// lambda1..lambda10, all >= 0 (mixed units).
    pub lambdas: [f64; 10],
    /// Detector condition, e.g. integration time or temperature.
    pub w: f64,
    pub eta1: f64,
    pub eta2: f64,
}

/// Default fit parameters of the worked example.
pub const DEFAULT_LAMBDAS: [f64; 10] =
    [0.00005, 0.01, 0.01, 0.5, 0.1, 1.0, 0.005, 1.001, 0.0, 0.005];

impl PumpScenario {
    pub fn new(lambdas: [f64; 10], w: f64, eta1: f64, eta2: f64) -> Result<Self> {
        let s = Self {
            lambdas,
            w,
            eta1,
            eta2,
        };
        s.validate()?;
        Ok(s)
    }

    /// The worked example's parameters with eta1 = 0.75, eta2 = 0.7, w = 1.
    pub fn default_example() -> Self {
        Self {
            lambdas: DEFAULT_LAMBDAS,
            w: 1.0,
            eta1: 0.75,
            eta2: 0.7,
        }
    }

    pub fn validate(&self) -> Result<()> {
        for (i, l) in self.lambdas.iter().enumerate() {
            if !(*l >= 0.0) || !l.is_finite() {
                return Err(ModelError::Domain(format!(
                    "lambda{} must be finite and >= 0, got {l}",
                    i + 1
                )));
            }
        }
        if !(self.w >= 0.0) || !self.w.is_finite() {
            return Err(ModelError::Domain(format!(
                "w must be finite and >= 0, got {}",
                self.w
            )));
        }
        for (name, eta) in [("eta1", self.eta1), ("eta2", self.eta2)] {
            if !(0.0..=1.0).contains(&eta) {
                return Err(ModelError::Domain(format!(
                    "{name} must lie in [0,1], got {eta}"
                )));
            }
        }
        Ok(())
    }

    /// Detector-noise Fano factor F_d(w) = 1 + lambda4 + lambda5 w.
    pub fn fano_detector(&self) -> f64 {
        1.0 + self.lambdas[3] + self.lambdas[4] * self.w
    }
}

/// Noise-model parameters at one pump power.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScenarioParams {
    pub fano: f64,
    pub fano_rho: f64,
    pub fano_d: f64,
    pub rho: f64,
    pub d: f64,
}

/// Evaluate the scenario maps at pump power p > 0.
pub fn scenario_at(p: f64, scenario: &PumpScenario) -> Result<ScenarioParams> {
    scenario.validate()?;
    if !(p > 0.0) || !p.is_finite() {
        return Err(ModelError::Domain(format!(
            "pump power must be finite and > 0 (detector-noise fraction diverges at p = 0), got {p}"
        )));
    }
    let l = &scenario.lambdas;
    Ok(ScenarioParams {
        fano: 1.0 + l[0] * p * (l[1] * p).exp(),
        fano_rho: 1.0 + l[2] * p,
        fano_d: scenario.fano_detector(),
        rho: l[5] * (-l[6] * p).exp(),
        d: (l[7] * scenario.w + l[8]) / p * (-l[9] * p).exp(),
    })
}

/// Channel noise model at one pump power: optical noise on channel 2,
/// identical detector noise on both channels.
pub fn noise_model_at(p: f64, scenario: &PumpScenario) -> Result<ChannelNoiseModel> {
    let params = scenario_at(p, scenario)?;
    ChannelNoiseModel::paper_simple(
        scenario.eta1,
        scenario.eta2,
        params.rho,
        params.fano_rho,
        params.d,
        params.fano_d,
    )
}

/// Sweep the NRF over a pump-power grid.
pub fn nrf_vs_pump(p_grid: &[f64], scenario: &PumpScenario) -> Result<Vec<(f64, NrfBreakdown)>> {
    if p_grid.is_empty() {
        return Err(ModelError::Config("pump grid must be nonempty".into()));
    }
    p_grid
        .iter()
        .map(|&p| {
            let params = scenario_at(p, scenario)?;
            let source = TwinBeamSource::new(1.0, params.fano)?;
            let noise = noise_model_at(p, scenario)?;
            Ok((p, nrf_full(&source, &noise)?))
        })
        .collect()
}

/// Pump-power grid specification for scenario sweeps.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PumpGrid {
    pub min: f64,
    pub max: f64,
    pub points: usize,
    #[serde(default = "default_scale")]
    pub scale: GridScale,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GridScale {
    Log,
    Linear,
}

fn default_scale() -> GridScale {
    GridScale::Log
}

impl PumpGrid {
    pub fn values(&self) -> Result<Vec<f64>> {
        if self.points == 0 {
            return Err(ModelError::Config("grid needs at least one point".into()));
        }
        if !(self.min > 0.0) || !(self.max >= self.min) {
            return Err(ModelError::Config(format!(
                "grid requires 0 < min <= max, got min={} max={}",
                self.min, self.max
            )));
        }
        if self.points == 1 {
            return Ok(vec![self.min]);
        }
        let n = self.points as f64 - 1.0;
        Ok((0..self.points)
            .map(|i| {
                let t = i as f64 / n;
                match self.scale {
                    GridScale::Linear => self.min + t * (self.max - self.min),
                    GridScale::Log => {
                        (self.min.ln() + t * (self.max.ln() - self.min.ln())).exp()
                    }
                }
            })
            .collect())
    }
}
