//! Config file loading and flag/file/default precedence.
//!
//! A single JSON file holds one optional block per subcommand plus a
//! top-level `seed`. Command-line flags override file values, which override
//! built-in defaults (the built-ins reproduce the bundled figure data).

use std::path::Path;

use serde::Deserialize;
use twinbeam_core::fwm::{GridScale, PumpGrid, DEFAULT_LAMBDAS};

use crate::CliError;

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub seed: Option<u64>,
    pub nrf_sweep: Option<NrfSweepConfig>,
    pub optimize_eta: Option<OptimizeEtaConfig>,
    pub scenario_sweep: Option<ScenarioSweepConfig>,
    pub simulate_nrf: Option<SimulateNrfConfig>,
    pub estimator_bench: Option<EstimatorBenchConfig>,
}

impl FileConfig {
    pub fn load(path: Option<&Path>) -> Result<Self, CliError> {
        let Some(path) = path else {
            return Ok(Self::default());
        };
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
        serde_json::from_str(&text)
            .map_err(|e| CliError::Usage(format!("invalid config {}: {e}", path.display())))
    }
}

/// Linear/log grid given as min, max, point count.
#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub min: f64,
    pub max: f64,
    pub points: usize,
    #[serde(default = "linear")]
    pub scale: GridScale,
}

fn linear() -> GridScale {
    GridScale::Linear
}

impl GridSpec {
    pub fn eta2_default() -> Self {
        GridSpec {
            min: 0.0,
            max: 1.0,
            points: 21,
            scale: GridScale::Linear,
        }
    }

    /// Parses the `--grid` flag: `[lin:|log:]MIN:MAX:POINTS`.
    pub fn parse(spec: &str) -> Result<Self, CliError> {
        let (scale, rest) = match spec.split_once(':') {
            Some(("lin", rest)) => (GridScale::Linear, rest),
            Some(("log", rest)) => (GridScale::Log, rest),
            _ => (GridScale::Linear, spec),
        };
        let parts: Vec<&str> = rest.split(':').collect();
        let [min, max, points] = parts[..] else {
            return Err(CliError::Usage(format!(
                "grid spec `{spec}` is not [lin:|log:]MIN:MAX:POINTS"
            )));
        };
        let parse_f = |s: &str| {
            s.parse::<f64>()
                .map_err(|_| CliError::Usage(format!("grid bound `{s}` is not a number")))
        };
        Ok(GridSpec {
            min: parse_f(min)?,
            max: parse_f(max)?,
            points: points
                .parse()
                .map_err(|_| CliError::Usage(format!("grid points `{points}` is not an integer")))?,
            scale,
        })
    }

    pub fn values(&self) -> Result<Vec<f64>, CliError> {
        if self.points == 0 {
            return Err(CliError::Usage("grid needs at least one point".into()));
        }
        match self.scale {
            GridScale::Linear => {
                if !(self.max >= self.min) {
                    return Err(CliError::Usage(format!(
                        "grid requires min <= max, got min={} max={}",
                        self.min, self.max
                    )));
                }
                if self.points == 1 {
                    return Ok(vec![self.min]);
                }
                let n = (self.points - 1) as f64;
                Ok((0..self.points)
                    .map(|i| self.min + (self.max - self.min) * i as f64 / n)
                    .collect())
            }
            GridScale::Log => {
                let grid = PumpGrid {
                    min: self.min,
                    max: self.max,
                    points: self.points,
                    scale: GridScale::Log,
                };
                grid.values().map_err(CliError::from)
            }
        }
    }
}

/// One analytic noise-model variant in an NRF sweep.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSpec {
    pub id: String,
    pub fano: f64,
    #[serde(default)]
    pub rho: f64,
    #[serde(default = "one")]
    pub fano_rho: f64,
    #[serde(default)]
    pub d: f64,
    #[serde(default = "one")]
    pub fano_d: f64,
}

fn one() -> f64 {
    1.0
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NrfSweepConfig {
    #[serde(default = "eta1_sweep")]
    pub eta1: f64,
    #[serde(default = "GridSpec::eta2_default")]
    pub eta2_grid: GridSpec,
    #[serde(default = "fig2_models")]
    pub models: Vec<ModelSpec>,
    #[serde(default = "mean_1e4")]
    pub mean_photons: f64,
    /// Monte Carlo trial count; simulation columns appear when set.
    pub trials: Option<usize>,
}

impl Default for NrfSweepConfig {
    fn default() -> Self {
        NrfSweepConfig {
            eta1: eta1_sweep(),
            eta2_grid: GridSpec::eta2_default(),
            models: fig2_models(),
            mean_photons: mean_1e4(),
            trials: None,
        }
    }
}

fn eta1_sweep() -> f64 {
    0.75
}

fn mean_1e4() -> f64 {
    1e4
}

/// The four bundled sweep variants: Poissonian, thermal-excess, added
/// uncorrelated optical noise, and added detector noise on top of that.
pub fn fig2_models() -> Vec<ModelSpec> {
    let base = |id: &str, fano, rho, fano_rho, d, fano_d| ModelSpec {
        id: id.to_string(),
        fano,
        rho,
        fano_rho,
        d,
        fano_d,
    };
    vec![
        base("poisson", 1.0, 0.0, 1.0, 0.0, 1.0),
        base("excess", 4.0, 0.0, 1.0, 0.0, 1.0),
        base("optical_noise", 4.0, 0.45, 1.2, 0.0, 1.0),
        base("detector_noise", 4.0, 0.45, 1.2, 0.01, 3.0),
    ]
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OptimizeEtaConfig {
    #[serde(default = "eta1_opt")]
    pub eta1: f64,
    #[serde(default = "fano_opt")]
    pub fano: f64,
    #[serde(default)]
    pub rho: f64,
}

impl Default for OptimizeEtaConfig {
    fn default() -> Self {
        OptimizeEtaConfig {
            eta1: eta1_opt(),
            fano: fano_opt(),
            rho: 0.0,
        }
    }
}

fn eta1_opt() -> f64 {
    0.7
}

fn fano_opt() -> f64 {
    10.0
}

/// Secondary sweep axis for scenario sweeps.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepAxis {
    Lambda6,
    Lambda8,
    Eta2Offset,
}

impl SweepAxis {
    pub fn as_str(&self) -> &'static str {
        match self {
            SweepAxis::Lambda6 => "lambda6",
            SweepAxis::Lambda8 => "lambda8",
            SweepAxis::Eta2Offset => "eta2_offset",
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioSweepConfig {
    #[serde(default = "default_lambdas")]
    pub lambdas: [f64; 10],
    #[serde(default = "one")]
    pub w: f64,
    #[serde(default = "eta1_sweep")]
    pub eta1: f64,
    #[serde(default = "eta2_scenario")]
    pub eta2: f64,
    #[serde(default = "pump_grid_default")]
    pub pump_grid: GridSpec,
    #[serde(default = "axis_default")]
    pub sweep_axis: SweepAxis,
    #[serde(default = "offsets_default")]
    pub sweep_values: Vec<f64>,
}

impl Default for ScenarioSweepConfig {
    fn default() -> Self {
        ScenarioSweepConfig {
            lambdas: default_lambdas(),
            w: 1.0,
            eta1: eta1_sweep(),
            eta2: eta2_scenario(),
            pump_grid: pump_grid_default(),
            sweep_axis: axis_default(),
            sweep_values: offsets_default(),
        }
    }
}

fn default_lambdas() -> [f64; 10] {
    DEFAULT_LAMBDAS
}

fn eta2_scenario() -> f64 {
    0.7
}

fn pump_grid_default() -> GridSpec {
    GridSpec {
        min: 1e-2,
        max: 1e4,
        points: 121,
        scale: GridScale::Log,
    }
}

fn axis_default() -> SweepAxis {
    SweepAxis::Eta2Offset
}

fn offsets_default() -> Vec<f64> {
    vec![-0.05, 0.0, 0.05]
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulateNrfConfig {
    #[serde(default = "trials_default")]
    pub trials: usize,
    #[serde(default = "mean_1e4")]
    pub mean_photons: f64,
    #[serde(default = "fano_sim")]
    pub fano: f64,
    #[serde(default = "eta1_sweep")]
    pub eta1: f64,
    #[serde(default = "rho_sim")]
    pub rho: f64,
    #[serde(default = "fano_rho_sim")]
    pub fano_rho: f64,
    #[serde(default)]
    pub d: f64,
    #[serde(default = "one")]
    pub fano_d: f64,
    #[serde(default = "GridSpec::eta2_default")]
    pub eta2_grid: GridSpec,
}

impl Default for SimulateNrfConfig {
    fn default() -> Self {
        SimulateNrfConfig {
            trials: trials_default(),
            mean_photons: mean_1e4(),
            fano: fano_sim(),
            eta1: eta1_sweep(),
            rho: rho_sim(),
            fano_rho: fano_rho_sim(),
            d: 0.0,
            fano_d: 1.0,
            eta2_grid: GridSpec::eta2_default(),
        }
    }
}

fn trials_default() -> usize {
    100_000
}

fn fano_sim() -> f64 {
    4.0
}

fn rho_sim() -> f64 {
    0.45
}

fn fano_rho_sim() -> f64 {
    1.2
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EstimatorBenchConfig {
    #[serde(default = "alpha_default")]
    pub alpha_values: Vec<f64>,
    /// Single-channel loss 1 - eta applied symmetrically to both arms.
    #[serde(default = "sigma_star_default")]
    pub sigma_star_values: Vec<f64>,
    #[serde(default)]
    pub epsilon: f64,
    #[serde(default = "mean_1e4")]
    pub mean_photons: f64,
    #[serde(default = "one")]
    pub fano: f64,
    #[serde(default = "trials_default")]
    pub calibration_trials: usize,
    #[serde(default = "trials_default")]
    pub measurement_trials: usize,
}

impl Default for EstimatorBenchConfig {
    fn default() -> Self {
        EstimatorBenchConfig {
            alpha_values: alpha_default(),
            sigma_star_values: sigma_star_default(),
            epsilon: 0.0,
            mean_photons: mean_1e4(),
            fano: 1.0,
            calibration_trials: trials_default(),
            measurement_trials: trials_default(),
        }
    }
}

fn alpha_default() -> Vec<f64> {
    vec![0.0, 0.1, 0.2, 0.3, 0.4]
}

fn sigma_star_default() -> Vec<f64> {
    vec![0.1, 0.3, 0.5, 0.7, 0.9]
}
