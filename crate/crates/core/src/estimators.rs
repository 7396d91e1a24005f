//! Twin-beam absorption estimators and their benchmark against the
//! shot-noise limit (SNL).
//!
//! Four estimators are compared: the direct classical ratio `alpha_c`, the
//! beam-ratio form `alpha_l`, the optimally-weighted subtraction `alpha_m`,
//! and the unbiased combination `alpha_lm`. The benchmark runs a calibration
//! phase (no sample), then a measurement phase where the beam power drifts
//! by a factor (1 + epsilon) and the probe passes through a sample of
//! absorption alpha, and reports each estimator's bias, variance, MSE, and
//! SNL-relative efficiency Gamma (MSE ratio against the drift-free direct
//! classical estimator).

use serde::{Deserialize, Serialize};

use crate::error::{ModelError, Result};
use crate::montecarlo::{
    presample, streams, thin_counts, SimulationConfig, ThinningMethod,
};
use crate::noise_model::{ChannelNoiseModel, TwinBeamSource};
use crate::stats;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Estimator {
    AlphaC,
    AlphaL,
    AlphaM,
    AlphaLm,
}

impl Estimator {
    pub const ALL: [Estimator; 4] = [
        Estimator::AlphaC,
        Estimator::AlphaL,
        Estimator::AlphaM,
        Estimator::AlphaLm,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            Estimator::AlphaC => "alpha_c",
            Estimator::AlphaL => "alpha_l",
            Estimator::AlphaM => "alpha_m",
            Estimator::AlphaLm => "alpha_lm",
        }
    }
}

/// Two-phase absorption experiment description.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AbsorptionExperiment {
    /// True sample absorption.
    pub alpha: f64,
    /// Fractional power drift between calibration and measurement.
    #[serde(default)]
    pub epsilon: f64,
    pub calibration_trials: usize,
    pub measurement_trials: usize,
    pub source: TwinBeamSource,
    pub noise: ChannelNoiseModel,
    pub seed: u64,
}

impl AbsorptionExperiment {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.alpha) {
            return Err(ModelError::Domain(format!(
                "alpha must lie in [0,1], got {}",
                self.alpha
            )));
        }
        if !(self.epsilon >= -1.0) || !self.epsilon.is_finite() {
            return Err(ModelError::Domain(format!(
                "epsilon must be finite and >= -1, got {}",
                self.epsilon
            )));
        }
        if self.calibration_trials < 2 || self.measurement_trials < 2 {
            return Err(ModelError::Config(
                "calibration and measurement phases each need >= 2 trials".into(),
            ));
        }
        self.source.validate()?;
        self.noise.validate()?;
        // the ratio estimators rely on the large-n approximation
        let n = self.source.mean_photons;
        let ref_mean = (1.0 + self.epsilon)
            * (self.noise.eta2 * (1.0 + self.noise.rho2) * n)
            + self.noise.d2 * n;
        if ref_mean < 100.0 {
            return Err(ModelError::Config(format!(
                "expected reference mean {ref_mean:.1} < 100; too small for the \
                 large-n ratio approximation"
            )));
        }
        Ok(())
    }
}

/// Per-estimator benchmark summary.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EstimatorReport {
    pub estimator: Estimator,
    pub mean: f64,
    pub variance: f64,
    pub mse: f64,
    pub bias: f64,
    /// SNL-relative efficiency: MSE over the drift-free alpha_c MSE.
    pub gamma: f64,
    /// Weight factor applied (0 for alpha_c and alpha_l).
    pub k_used: f64,
    /// gamma = <n2>/<n1> from the calibration phase.
    pub gamma_factor: f64,
}

/// Direct classical estimator, one value per trial: 1 - n'1 / <n1>.
pub fn alpha_c_per_trial(probe: &[f64], calib_mean1: f64) -> Result<Vec<f64>> {
    if !(calib_mean1 > 0.0) {
        return Err(ModelError::Domain(format!(
            "calibration mean must be > 0, got {calib_mean1}"
        )));
    }
    Ok(probe.iter().map(|&p| 1.0 - p / calib_mean1).collect())
}

pub fn estimate_alpha_c(probe: &[f64], calib_mean1: f64) -> Result<f64> {
    Ok(stats::mean(&alpha_c_per_trial(probe, calib_mean1)?))
}

/// Beam-ratio estimator per trial: 1 - gamma n'1 / n'2. Trials with a zero
/// reference count are excluded; the count of exclusions is returned.
pub fn alpha_l_per_trial(
    probe: &[f64],
    reference: &[f64],
    gamma_factor: f64,
) -> Result<(Vec<f64>, usize)> {
    ratio_per_trial(probe, reference, |p, r| 1.0 - gamma_factor * p / r)
}

pub fn estimate_alpha_l(probe: &[f64], reference: &[f64], gamma_factor: f64) -> Result<f64> {
    let (vals, _) = alpha_l_per_trial(probe, reference, gamma_factor)?;
    Ok(stats::mean(&vals))
}

/// Weighted-subtraction estimator per trial:
/// 1 - (n'1 - k (n'2 - <n'2>) + delta_e) / <n1>.
pub fn alpha_m_per_trial(
    probe: &[f64],
    reference: &[f64],
    calib_mean1: f64,
    mean_ref_meas: f64,
    k: f64,
    delta_e: f64,
) -> Result<Vec<f64>> {
    if !(calib_mean1 > 0.0) {
        return Err(ModelError::Domain(format!(
            "calibration mean must be > 0, got {calib_mean1}"
        )));
    }
    Ok(probe
        .iter()
        .zip(reference)
        .map(|(&p, &r)| 1.0 - (p - k * (r - mean_ref_meas) + delta_e) / calib_mean1)
        .collect())
}

pub fn estimate_alpha_m(
    probe: &[f64],
    reference: &[f64],
    calib_mean1: f64,
    mean_ref_meas: f64,
    k: f64,
    delta_e: f64,
) -> Result<f64> {
    Ok(stats::mean(&alpha_m_per_trial(
        probe,
        reference,
        calib_mean1,
        mean_ref_meas,
        k,
        delta_e,
    )?))
}

/// Unbiased weighted estimator per trial:
/// 1 - gamma (n'1 - k (n'2 - <n'2>) + delta_e) / n'2.
pub fn alpha_lm_per_trial(
    probe: &[f64],
    reference: &[f64],
    gamma_factor: f64,
    mean_ref_meas: f64,
    k: f64,
    delta_e: f64,
) -> Result<(Vec<f64>, usize)> {
    ratio_per_trial(probe, reference, |p, r| {
        1.0 - gamma_factor * (p - k * (r - mean_ref_meas) + delta_e) / r
    })
}

pub fn estimate_alpha_lm(
    probe: &[f64],
    reference: &[f64],
    gamma_factor: f64,
    mean_ref_meas: f64,
    k: f64,
    delta_e: f64,
) -> Result<f64> {
    let (vals, _) =
        alpha_lm_per_trial(probe, reference, gamma_factor, mean_ref_meas, k, delta_e)?;
    Ok(stats::mean(&vals))
}

fn ratio_per_trial(
    probe: &[f64],
    reference: &[f64],
    f: impl Fn(f64, f64) -> f64,
) -> Result<(Vec<f64>, usize)> {
    assert_eq!(probe.len(), reference.len());
    let mut vals = Vec::with_capacity(probe.len());
    let mut excluded = 0usize;
    for (&p, &r) in probe.iter().zip(reference) {
        if r == 0.0 {
            excluded += 1;
        } else {
            vals.push(f(p, r));
        }
    }
    if excluded * 100 > probe.len() {
        return Err(ModelError::Domain(format!(
            "{excluded} of {} trials had a zero reference count (> 1%); the \
             ratio estimators are not applicable at this photon flux",
            probe.len()
        )));
    }
    Ok((vals, excluded))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KFlavor {
    M,
    Lm,
}

/// Precision-maximizing weight: k_m = Cov(n'1,n'2)/Var(n'2), and
/// k_lm = k_m - <n'1>/<n'2>.
pub fn optimal_k(
    cov12: f64,
    var2: f64,
    mean1: f64,
    mean2: f64,
    flavor: KFlavor,
) -> Result<f64> {
    if !(var2 > 0.0) {
        return Err(ModelError::Domain(format!(
            "reference variance must be > 0, got {var2}"
        )));
    }
    let k_m = cov12 / var2;
    Ok(match flavor {
        KFlavor::M => k_m,
        KFlavor::Lm => k_m - mean1 / mean2,
    })
}

/// Closed-form SNL-relative efficiency in the balanced, noiseless case,
/// with sigma_star = 1 - eta the balanced-detection NRF.
pub fn analytic_gamma(estimator: Estimator, alpha: f64, sigma_star: f64) -> f64 {
    match estimator {
        Estimator::AlphaC => 1.0,
        Estimator::AlphaL => alpha + 2.0 * (1.0 - alpha) * sigma_star,
        Estimator::AlphaM | Estimator::AlphaLm => {
            alpha + 2.0 * (1.0 - alpha) * sigma_star * (1.0 - sigma_star / 2.0)
        }
    }
}

/// Phase offsets into the RNG stream space.
const PHASE_CALIBRATION: u64 = 0;
const PHASE_MEASUREMENT: u64 = 1;
const PHASE_BASELINE: u64 = 2;

/// Simulate one measurement-phase batch: pre-loss power scaled by
/// (1 + epsilon), the probe's optical path additionally thinned by the
/// sample's survival probability (1 - alpha) before dark counts are added.
fn simulate_measurement(
    exp: &AbsorptionExperiment,
    epsilon: f64,
    phase: u64,
) -> Result<(Vec<f64>, Vec<f64>)> {
    let scaled = TwinBeamSource::new(
        exp.source.mean_photons * (1.0 + epsilon),
        exp.source.fano,
    )?;
    let cfg = SimulationConfig {
        trials: exp.measurement_trials,
        source: scaled,
        noise: exp.noise,
        seed: exp.seed,
        thinning: ThinningMethod::Binomial,
        error_method: Default::default(),
        reuse_source_samples: true,
    };
    let pre = presample(&cfg, phase)?;
    let base = phase * streams::STREAM_SPAN;
    let m = cfg.thinning;
    let s1 = thin_counts(&pre.source, cfg.noise.eta1, cfg.seed, base + streams::THIN1, m)?;
    let s2 = thin_counts(&pre.source, cfg.noise.eta2, cfg.seed, base + streams::THIN2, m)?;
    let r1 = thin_counts(&pre.rho1, cfg.noise.eta1, cfg.seed, base + streams::THIN_RHO1, m)?;
    let r2 = thin_counts(&pre.rho2, cfg.noise.eta2, cfg.seed, base + streams::THIN_RHO2, m)?;
    // the sample sits in the probe path only, upstream of the detector
    let optical1: Vec<u64> = s1.iter().zip(&r1).map(|(&a, &b)| a + b).collect();
    let survived = thin_counts(
        &optical1,
        1.0 - exp.alpha,
        cfg.seed,
        base + streams::ABSORPTION,
        m,
    )?;
    let probe = survived
        .iter()
        .zip(&pre.dark1)
        .map(|(&s, &d)| (s + d) as f64)
        .collect();
    let reference = s2
        .iter()
        .zip(&r2)
        .zip(&pre.dark2)
        .map(|((&a, &b), &d)| (a + b + d) as f64)
        .collect();
    Ok((probe, reference))
}

fn report_from_trials(
    estimator: Estimator,
    trials: &[f64],
    alpha: f64,
    baseline_mse: f64,
    k_used: f64,
    gamma_factor: f64,
) -> EstimatorReport {
    let mean = stats::mean(trials);
    let variance = stats::sample_variance(trials);
    let bias = mean - alpha;
    let mse = variance + bias * bias;
    EstimatorReport {
        estimator,
        mean,
        variance,
        mse,
        bias,
        gamma: mse / baseline_mse,
        k_used,
        gamma_factor,
    }
}

/// Run the two-phase benchmark and report all four estimators.
///
/// Gamma uses a third, drift-free (epsilon = 0) batch of the direct
/// classical estimator as the SNL denominator, so drift-induced bias
/// penalizes the biased estimators. The weight k follows the
/// measurement-stage second moments (that is what the primes in
/// k = Cov(n'1,n'2)/Var(n'2) denote).
pub fn run_estimator_bench(exp: &AbsorptionExperiment) -> Result<Vec<EstimatorReport>> {
    exp.validate()?;

    // calibration: no sample, no drift
    let cal_cfg = SimulationConfig {
        trials: exp.calibration_trials,
        source: exp.source,
        noise: exp.noise,
        seed: exp.seed,
        thinning: ThinningMethod::Binomial,
        error_method: Default::default(),
        reuse_source_samples: true,
    };
    let pre = presample(&cal_cfg, PHASE_CALIBRATION)?;
    let counts = crate::montecarlo::detect(&cal_cfg, &pre, PHASE_CALIBRATION)?;
    let c_mean1 = stats::mean(&counts.detected1);
    let c_mean2 = stats::mean(&counts.detected2);
    if !(c_mean1 > 0.0) || !(c_mean2 > 0.0) {
        return Err(ModelError::Domain(
            "calibration produced a zero-mean channel".into(),
        ));
    }
    let gamma_factor = c_mean2 / c_mean1;

    // measurement: drifted power, sample in the probe path
    let (probe, reference) = simulate_measurement(exp, exp.epsilon, PHASE_MEASUREMENT)?;
    let m_mean2 = stats::mean(&reference);
    let m_mean1 = stats::mean(&probe);
    let cov = stats::sample_covariance(&probe, &reference);
    let var2 = stats::sample_variance(&reference);
    let k_m = optimal_k(cov, var2, m_mean1, m_mean2, KFlavor::M)?;
    let k_lm = optimal_k(cov, var2, m_mean1, m_mean2, KFlavor::Lm)?;
    // delta_e = <k dn'2> vanishes when dn'2 is centered on the batch mean
    let delta_e = 0.0;

    // drift-free direct-classical batch: the SNL reference for Gamma
    let (probe0, _) = simulate_measurement(exp, 0.0, PHASE_BASELINE)?;
    let base_trials = alpha_c_per_trial(&probe0, c_mean1)?;
    let base_mean = stats::mean(&base_trials);
    let base_var = stats::sample_variance(&base_trials);
    let baseline_mse = base_var + (base_mean - exp.alpha).powi(2);

    let c_trials = alpha_c_per_trial(&probe, c_mean1)?;
    let (l_trials, _) = alpha_l_per_trial(&probe, &reference, gamma_factor)?;
    let m_trials = alpha_m_per_trial(&probe, &reference, c_mean1, m_mean2, k_m, delta_e)?;
    let (lm_trials, _) =
        alpha_lm_per_trial(&probe, &reference, gamma_factor, m_mean2, k_lm, delta_e)?;

    Ok(vec![
        report_from_trials(
            Estimator::AlphaC,
            &c_trials,
            exp.alpha,
            baseline_mse,
            0.0,
            gamma_factor,
        ),
        report_from_trials(
            Estimator::AlphaL,
            &l_trials,
            exp.alpha,
            baseline_mse,
            0.0,
            gamma_factor,
        ),
        report_from_trials(
            Estimator::AlphaM,
            &m_trials,
            exp.alpha,
            baseline_mse,
            k_m,
            gamma_factor,
        ),
        report_from_trials(
            Estimator::AlphaLm,
            &lm_trials,
            exp.alpha,
            baseline_mse,
            k_lm,
            gamma_factor,
        ),
    ])
}
